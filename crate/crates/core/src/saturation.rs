//! Saturation of an FO-definable NFA under the rules of an FO-definable PDS,
//! yielding an NFA for the backward reachability set.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::automata::{validate, AutomataError, FoNfa, FoPds, FoSet, Triple, Violation};
use crate::logic::{Conjunct, Ldnf, LogicError, Theory};

pub type DeltaMap = BTreeMap<Triple, Ldnf>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SaturationError {
    #[error("invalid saturation input:\n{}", render_violations(.0))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Automata(#[from] AutomataError),
}

impl From<LogicError> for SaturationError {
    fn from(e: LogicError) -> SaturationError {
        SaturationError::Automata(e.into())
    }
}

fn render_violations(vs: &[Violation]) -> String {
    vs.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationResult {
    /// The input NFA with the saturated transition map.
    pub automaton: FoNfa,
    /// Loop passes, the last one (which adds nothing) included.
    pub iterations: usize,
    /// Clauses added beyond the input transitions and the pop rules.
    pub added: BTreeMap<Triple, usize>,
}

fn range(start: usize, len: usize) -> Vec<usize> {
    (start..start + len).collect()
}

type BySource<'a> = BTreeMap<(&'a str, &'a str), Vec<(&'a str, &'a Ldnf)>>;

fn by_source(delta: &DeltaMap) -> BySource<'_> {
    let mut out: BySource = BTreeMap::new();
    for ((from, letter, to), d) in delta {
        out.entry((from, letter)).or_default().push((to, d));
    }
    out
}

fn merge_into(acc: &mut DeltaMap, key: Triple, d: Ldnf) -> Result<(), LogicError> {
    if d.is_empty() {
        return Ok(());
    }
    match acc.get_mut(&key) {
        Some(existing) => existing.union_in_place(&d),
        None => {
            acc.insert(key, d);
            Ok(())
        }
    }
}

/// `forced` with the first NFA step taken from `first` and the second from
/// `second`. Since forced is a union over pairs of transitions, it is
/// linear in each argument separately.
fn forced_with(
    theory: &Theory,
    pds: &FoPds,
    states: &FoSet,
    first: &DeltaMap,
    second: &DeltaMap,
) -> Result<DeltaMap, AutomataError> {
    let (first, second) = (by_source(first), by_source(second));
    let dim = |set: &FoSet, kind, label: &str| {
        set.dim(label).ok_or_else(|| AutomataError::UnknownIndex {
            kind,
            label: label.to_string(),
        })
    };
    let mut out = DeltaMap::new();
    for ((l, k, l2, k1, k2), rule) in &pds.push {
        let Some(steps1) = first.get(&(l2.as_str(), k1.as_str())) else {
            continue;
        };
        let (dx, dy) = (dim(states, "state", l)?, dim(&pds.alphabet, "letter", k)?);
        let (dx2, dy1, dy2) = (
            dim(states, "state", l2)?,
            dim(&pds.alphabet, "letter", k1)?,
            dim(&pds.alphabet, "letter", k2)?,
        );
        for &(l3, alpha1) in steps1 {
            let Some(steps2) = second.get(&(l3, k2.as_str())) else {
                continue;
            };
            let dx3 = dim(states, "state", l3)?;
            for &(target, alpha2) in steps2 {
                let dt = dim(states, "state", target)?;
                // layout: x, y, x', then the bound blocks x'', y', y'', x'''
                let x = range(0, dx);
                let y = range(dx, dy);
                let xt = range(dx + dy, dt);
                let mut next = dx + dy + dt;
                let mut block = |len: usize| {
                    let b = range(next, len);
                    next += len;
                    b
                };
                let (x2, y1, y2, x3) = (block(dx2), block(dy1), block(dy2), block(dx3));
                let width = next;
                let push_map = [&x[..], &y, &x2, &y1, &y2].concat();
                let alpha1_map = [&x2[..], &y1, &x3].concat();
                let alpha2_map = [&x3[..], &y2, &xt].concat();
                let forced = theory.conjoin_project(
                    width,
                    &[
                        Conjunct::new(rule, push_map),
                        Conjunct::new(alpha1, alpha1_map),
                        Conjunct::new(alpha2, alpha2_map),
                    ],
                    &range(0, dx + dy + dt),
                )?;
                merge_into(&mut out, (l.clone(), k.clone(), target.to_string()), forced)?;
            }
        }
    }
    Ok(out)
}

/// The transitions forced by one push rule followed by two transitions of
/// `delta`: `(l, k, l')` gets `∃ x'' y' y'' x'''. push(x,y,x'',y',y'') ∧
/// delta(x'',y',x''') ∧ delta(x''',y'',x')`.
pub fn forced(theory: &Theory, pds: &FoPds, states: &FoSet, delta: &DeltaMap) -> Result<DeltaMap, AutomataError> {
    forced_with(theory, pds, states, delta, delta)
}

/// Runs the saturation loop on a validated (PDS, NFA) pair.
///
/// Passes are Jacobi-style: pass `i + 1` adds `forced(δ_i)`. Each pass is
/// evaluated semi-naively as `forced(Δ, δ_i) ∪ forced(δ_i, Δ)` where `Δ` is
/// what the previous pass added, which yields the same sequence `δ_i`.
pub fn saturate(theory: &Theory, pds: &FoPds, nfa: &FoNfa) -> Result<SaturationResult, SaturationError> {
    let report = validate(theory, pds, nfa);
    if !report.is_empty() {
        return Err(SaturationError::Invalid(report));
    }
    let mut delta = nfa.delta.clone();
    for (key, d) in &pds.pop {
        merge_into(&mut delta, key.clone(), d.clone())?;
    }
    let base = delta.clone();
    let mut iterations = 0;
    let mut fresh: Option<DeltaMap> = None;
    loop {
        iterations += 1;
        let produced = match &fresh {
            None => forced(theory, pds, &nfa.states, &delta)?,
            Some(new) => {
                let mut out = forced_with(theory, pds, &nfa.states, new, &delta)?;
                for (key, d) in forced_with(theory, pds, &nfa.states, &delta, new)? {
                    merge_into(&mut out, key, d)?;
                }
                out
            }
        };
        let mut added = DeltaMap::new();
        for (key, d) in produced {
            let new = match delta.get(&key) {
                Some(existing) => d.difference(existing)?,
                None => d,
            };
            if !new.is_empty() {
                added.insert(key, new);
            }
        }
        if added.is_empty() {
            break;
        }
        for (key, d) in &added {
            merge_into(&mut delta, key.clone(), d.clone())?;
        }
        fresh = Some(added);
    }
    let added = delta
        .iter()
        .filter_map(|(key, d)| {
            let before = base.get(key).map_or(0, Ldnf::len);
            (d.len() > before).then(|| (key.clone(), d.len() - before))
        })
        .collect();
    Ok(SaturationResult {
        automaton: FoNfa {
            delta,
            ..nfa.clone()
        },
        iterations,
        added,
    })
}
