//! Queries answered through saturation: membership in the backward
//! reachability set, location reachability and regular-target reachability.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::atoms::ConcreteAtom;
use crate::automata::{nfa_accepts, nfa_nonempty_from, product_nfa, AutomataError, Configuration, FoNfa, FoPds};
use crate::logic::{Conjunct, Ldnf, Theory};
use crate::saturation::{saturate, SaturationError, SaturationResult};

/// Name of the synthesized state that accepts any remaining stack.
pub const SINK: &str = "__sink";

/// Atoms of the bottom stack letter in a location reachability query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bottom {
    /// Some tuple of the letter's component.
    Any,
    Atoms(Vec<ConcreteAtom>),
}

fn range(start: usize, len: usize) -> Vec<usize> {
    (start..start + len).collect()
}

/// A theory together with a cache of saturation results per (PDS, NFA) pair.
pub struct Engine {
    theory: Theory,
    cache: Mutex<HashMap<(FoPds, FoNfa), Arc<SaturationResult>>>,
}

impl Engine {
    pub fn new(theory: Theory) -> Engine {
        Engine {
            theory,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    pub fn saturate(&self, pds: &FoPds, nfa: &FoNfa) -> Result<Arc<SaturationResult>, SaturationError> {
        let key = (pds.clone(), nfa.clone());
        if let Some(found) = self.cache.lock().unwrap().get(&key) {
            return Ok(found.clone());
        }
        let result = Arc::new(saturate(&self.theory, pds, nfa)?);
        self.cache.lock().unwrap().insert(key, result.clone());
        Ok(result)
    }

    /// Whether `c` can reach a configuration accepted by `nfa`.
    pub fn prestar_member(&self, pds: &FoPds, nfa: &FoNfa, c: &Configuration) -> Result<bool, SaturationError> {
        let saturated = self.saturate(pds, nfa)?;
        Ok(accepts_configuration(&self.theory, &saturated.automaton, c)?)
    }

    /// Whether some configuration `p(ā) | bottom(b̄)` reaches location `q`
    /// with any stack.
    pub fn reach_decision(
        &self,
        pds: &FoPds,
        p: &str,
        bottom_letter: &str,
        bottom: &Bottom,
        q: &str,
    ) -> Result<bool, SaturationError> {
        let theory = &self.theory;
        let xi_p = &pds.locations.require("location", p)?.constraint;
        let letter = pds.alphabet.require("letter", bottom_letter)?;
        let y = match bottom {
            Bottom::Any => letter.constraint.clone(),
            Bottom::Atoms(atoms) => {
                if atoms.len() != letter.dim {
                    return Err(AutomataError::DimensionMismatch {
                        what: format!("letter `{bottom_letter}`"),
                        expected: letter.dim,
                        found: atoms.len(),
                    }
                    .into());
                }
                let clause = Ldnf::singleton(theory.atoms().complete_clause_of(atoms).map_err(AutomataError::from)?);
                clause.intersection(&letter.constraint)?
            }
        };
        let target = target_nfa(theory, pds, q)?;
        let saturated = self.saturate(pds, &target)?;
        let b = &saturated.automaton;
        let (dp, dk) = (xi_p.width(), letter.dim);
        for ((from, k, to), delta) in &b.delta {
            if from != p || k != bottom_letter {
                continue;
            }
            let Some(fin) = b.finals.get(to) else {
                continue;
            };
            let dt = fin.width();
            let witness = theory.conjoin_project(
                dp + dk + dt,
                &[
                    Conjunct::new(xi_p, range(0, dp)),
                    Conjunct::new(&y, range(dp, dk)),
                    Conjunct::new(delta, range(0, dp + dk + dt)),
                    Conjunct::new(fin, range(dp + dk, dt)),
                ],
                &[],
            )?;
            if !witness.is_empty() {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Whether some configuration accepted by `c` reaches one accepted by `b`.
    pub fn decision_reachability(&self, pds: &FoPds, b: &FoNfa, c: &FoNfa) -> Result<bool, SaturationError> {
        let theory = &self.theory;
        let saturated = self.saturate(pds, b)?;
        let product = product_nfa(theory, &saturated.automaton, c)?;
        let eq = theory.ldnf_of("eq(a,b)", &["a", "b"])?;
        let mut starts = Vec::new();
        for (p, loc) in &pds.locations.components {
            let Some(in_c) = c.states.get(p) else {
                continue;
            };
            if in_c.dim != loc.dim {
                return Err(AutomataError::DimensionMismatch {
                    what: format!("state `{p}` of the source automaton"),
                    expected: loc.dim,
                    found: in_c.dim,
                }
                .into());
            }
            let d = loc.dim;
            let mut conjuncts = vec![Conjunct::new(&loc.constraint, range(0, d))];
            conjuncts.extend((0..d).map(|i| Conjunct::new(&eq, vec![i, d + i])));
            let start = theory.conjoin_project(2 * d, &conjuncts, &range(0, 2 * d))?;
            starts.push((format!("{p}*{p}"), start));
        }
        Ok(nfa_nonempty_from(theory, &product, &starts)?)
    }
}

/// Whether `nfa` accepts the stack of `c` from the state of `c`.
pub fn accepts_configuration(theory: &Theory, nfa: &FoNfa, c: &Configuration) -> Result<bool, AutomataError> {
    nfa_accepts(theory, nfa, (&c.location, &c.state_atoms), &c.stack)
}

/// The NFA accepting `{q} × Γ*` over the locations of `pds`: the location
/// components become states, `q` is final, and a final sink of dimension 0
/// reads any letter.
pub fn target_nfa(theory: &Theory, pds: &FoPds, q: &str) -> Result<FoNfa, AutomataError> {
    let xi_q = pds.locations.require("location", q)?;
    let mut nfa = FoNfa {
        alphabet: pds.alphabet.clone(),
        states: pds.locations.clone(),
        ..FoNfa::default()
    };
    nfa.states.insert(SINK, 0, Ldnf::truth())?;
    nfa.finals.insert(q.to_string(), xi_q.constraint.clone());
    nfa.finals.insert(SINK.to_string(), Ldnf::truth());
    let dq = xi_q.dim;
    for (k, letter) in &pds.alphabet.components {
        let dk = letter.dim;
        let leave = theory.conjoin_project(
            dq + dk,
            &[
                Conjunct::new(&xi_q.constraint, range(0, dq)),
                Conjunct::new(&letter.constraint, range(dq, dk)),
            ],
            &range(0, dq + dk),
        )?;
        nfa.delta.insert((q.to_string(), k.clone(), SINK.to_string()), leave);
        nfa.delta.insert((SINK.to_string(), k.clone(), SINK.to_string()), letter.constraint.clone());
    }
    Ok(nfa)
}

pub fn prestar_member(theory: &Theory, pds: &FoPds, nfa: &FoNfa, c: &Configuration) -> Result<bool, SaturationError> {
    let saturated = saturate(theory, pds, nfa)?;
    Ok(accepts_configuration(theory, &saturated.automaton, c)?)
}
