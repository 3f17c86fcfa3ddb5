//! The running example over total order atoms: a PDS building strictly
//! monotonic stacks and an NFA for odd-length words of alternating growth.

use crate::automata::{AutomataError, FoNfa, FoPds, FoSet};
use crate::logic::Theory;

fn alphabet(theory: &Theory) -> Result<FoSet, AutomataError> {
    let mut k = FoSet::new();
    k.insert_full(theory, "k", 1)?;
    Ok(k)
}

/// `Mono`: one location `lI` without registers and the single push rule
/// `lI, k(y) -> lI, k(y') k(y)` with `y < y'`.
pub fn mono_pds(theory: &Theory) -> Result<FoPds, AutomataError> {
    let mut pds = FoPds {
        alphabet: alphabet(theory)?,
        ..FoPds::default()
    };
    pds.locations.insert_full(theory, "lI", 0)?;
    let rule = theory.ldnf_of("lt(y1,u1) & eq(v1,y1)", &["y1", "u1", "v1"])?;
    pds.push.insert(("lI".into(), "k".into(), "lI".into(), "k".into(), "k".into()), rule);
    Ok(pds)
}

/// `A`: accepts `a1 >= a2 <= a3 >= ... <= a(2n+1)` from `lI`; `l0` and `l1`
/// hold one register guessing the next letter.
pub fn nfa_a(theory: &Theory) -> Result<FoNfa, AutomataError> {
    let mut nfa = FoNfa {
        alphabet: alphabet(theory)?,
        ..FoNfa::default()
    };
    nfa.states.insert_full(theory, "lI", 0)?;
    nfa.states.insert_full(theory, "l0", 1)?;
    nfa.states.insert_full(theory, "l1", 1)?;
    nfa.finals.insert("l0".into(), theory.full(1)?);
    let t = |from: &str, to: &str| (from.to_string(), "k".to_string(), to.to_string());
    nfa.delta.insert(t("lI", "l0"), theory.ldnf_of("le(p1,y1)", &["y1", "p1"])?);
    nfa.delta.insert(
        t("l0", "l1"),
        theory.ldnf_of("eq(x1,y1) & le(y1,p1)", &["x1", "y1", "p1"])?,
    );
    nfa.delta.insert(
        t("l1", "l0"),
        theory.ldnf_of("eq(x1,y1) & le(p1,y1)", &["x1", "y1", "p1"])?,
    );
    Ok(nfa)
}
