use std::fmt;

use crate::logic::{Ldnf, Theory};

use super::{FoNfa, FoPds, FoSet};

/// One reason why a (PDS, NFA) pair is not a valid saturation input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownIndex { what: String, label: String },
    WidthMismatch { what: String, expected: usize, found: usize },
    BlockRestriction { what: String, block: &'static str },
    FinalsOutsideStates { state: String },
    WidthBudget { what: String, width: usize, budget: usize },
    AlphabetMismatch,
    MissingState { location: String },
    LocationDimension { location: String, location_dim: usize, state_dim: usize },
    LocationNotEntailed { location: String },
    IncomingToLocation { from: String, letter: String, to: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownIndex { what, label } => write!(f, "{what}: unknown index `{label}`"),
            Violation::WidthMismatch { what, expected, found } => {
                write!(f, "{what}: formula over {found} variables, expected {expected}")
            }
            Violation::BlockRestriction { what, block } => {
                write!(f, "{what}: {block} block is not contained in its component")
            }
            Violation::FinalsOutsideStates { state } => {
                write!(f, "final constraint of `{state}` is not contained in the state constraint")
            }
            Violation::WidthBudget { what, width, budget } => {
                write!(f, "{what}: needs width {width}, budget is {budget}")
            }
            Violation::AlphabetMismatch => write!(f, "PDS and NFA alphabets differ"),
            Violation::MissingState { location } => write!(f, "location `{location}` is not an NFA state"),
            Violation::LocationDimension { location, location_dim, state_dim } => write!(
                f,
                "location `{location}` has dimension {location_dim} but the NFA state has {state_dim}"
            ),
            Violation::LocationNotEntailed { location } => {
                write!(f, "location constraint of `{location}` is not contained in the state constraint")
            }
            Violation::IncomingToLocation { from, letter, to } => {
                write!(f, "incoming transition to P-state: ({from}, {letter}, {to})")
            }
        }
    }
}

struct Block<'a> {
    name: &'static str,
    set: &'a FoSet,
    label: &'a str,
    kind: &'static str,
}

/// Checks that every index exists, widths add up, and every clause
/// restricts to its components on each block.
fn check_family(theory: &Theory, what: String, blocks: &[Block], d: &Ldnf, out: &mut Vec<Violation>) {
    let mut dims = Vec::with_capacity(blocks.len());
    for b in blocks {
        match b.set.get(b.label) {
            Some(c) => dims.push(c.dim),
            None => {
                out.push(Violation::UnknownIndex {
                    what: format!("{what} ({})", b.kind),
                    label: b.label.to_string(),
                });
                return;
            }
        }
    }
    let width: usize = dims.iter().sum();
    if d.width() != width {
        out.push(Violation::WidthMismatch {
            what,
            expected: width,
            found: d.width(),
        });
        return;
    }
    if width > theory.max_width() {
        out.push(Violation::WidthBudget {
            what: what.clone(),
            width,
            budget: theory.max_width(),
        });
    }
    let vocab = theory.vocabulary();
    let mut start = 0;
    for (b, &dim) in blocks.iter().zip(&dims) {
        let vars: Vec<usize> = (start..start + dim).collect();
        let constraint = &b.set.get(b.label).unwrap().constraint;
        if d.clauses().iter().any(|c| !constraint.contains(&c.restrict(vocab, &vars))) {
            out.push(Violation::BlockRestriction {
                what: what.clone(),
                block: b.name,
            });
        }
        start += dim;
    }
}

fn check_set(theory: &Theory, what: &str, set: &FoSet, out: &mut Vec<Violation>) {
    for (label, c) in &set.components {
        if c.constraint.width() != c.dim {
            out.push(Violation::WidthMismatch {
                what: format!("{what} `{label}`"),
                expected: c.dim,
                found: c.constraint.width(),
            });
        }
        if c.dim > theory.max_width() {
            out.push(Violation::WidthBudget {
                what: format!("{what} `{label}`"),
                width: c.dim,
                budget: theory.max_width(),
            });
        }
    }
}

pub fn validate_nfa(theory: &Theory, nfa: &FoNfa) -> Vec<Violation> {
    let mut out = Vec::new();
    check_set(theory, "letter", &nfa.alphabet, &mut out);
    check_set(theory, "state", &nfa.states, &mut out);
    for (state, fin) in &nfa.finals {
        match nfa.states.get(state) {
            None => out.push(Violation::UnknownIndex {
                what: "final".into(),
                label: state.clone(),
            }),
            Some(c) if c.dim != fin.width() => out.push(Violation::WidthMismatch {
                what: format!("final `{state}`"),
                expected: c.dim,
                found: fin.width(),
            }),
            Some(c) => {
                if !fin.clauses().iter().all(|cl| c.constraint.contains(cl)) {
                    out.push(Violation::FinalsOutsideStates { state: state.clone() });
                }
            }
        }
    }
    for ((from, letter, to), d) in &nfa.delta {
        let blocks = [
            Block { name: "source", set: &nfa.states, label: from, kind: "state" },
            Block { name: "letter", set: &nfa.alphabet, label: letter, kind: "letter" },
            Block { name: "target", set: &nfa.states, label: to, kind: "state" },
        ];
        check_family(theory, format!("transition ({from}, {letter}, {to})"), &blocks, d, &mut out);
    }
    out
}

pub fn validate_pds(theory: &Theory, pds: &FoPds) -> Vec<Violation> {
    let mut out = Vec::new();
    check_set(theory, "letter", &pds.alphabet, &mut out);
    check_set(theory, "location", &pds.locations, &mut out);
    for ((l, k, l2, k1, k2), d) in &pds.push {
        let blocks = [
            Block { name: "source", set: &pds.locations, label: l, kind: "location" },
            Block { name: "popped letter", set: &pds.alphabet, label: k, kind: "letter" },
            Block { name: "target", set: &pds.locations, label: l2, kind: "location" },
            Block { name: "first pushed letter", set: &pds.alphabet, label: k1, kind: "letter" },
            Block { name: "second pushed letter", set: &pds.alphabet, label: k2, kind: "letter" },
        ];
        check_family(theory, format!("push rule ({l}, {k}, {l2}, {k1}, {k2})"), &blocks, d, &mut out);
    }
    for ((l, k, l2), d) in &pds.pop {
        let blocks = [
            Block { name: "source", set: &pds.locations, label: l, kind: "location" },
            Block { name: "popped letter", set: &pds.alphabet, label: k, kind: "letter" },
            Block { name: "target", set: &pds.locations, label: l2, kind: "location" },
        ];
        check_family(theory, format!("pop rule ({l}, {k}, {l2})"), &blocks, d, &mut out);
    }
    out
}

/// Everything saturation relies on: both machines well formed over one
/// alphabet, locations among the NFA states with contained constraints, no
/// NFA transition into a location, and the widths saturation will need
/// within budget. An empty report means valid.
pub fn validate(theory: &Theory, pds: &FoPds, nfa: &FoNfa) -> Vec<Violation> {
    let mut out = validate_pds(theory, pds);
    out.extend(validate_nfa(theory, nfa));
    if pds.alphabet != nfa.alphabet {
        out.push(Violation::AlphabetMismatch);
    }
    for (loc, c) in &pds.locations.components {
        match nfa.states.get(loc) {
            None => out.push(Violation::MissingState { location: loc.clone() }),
            Some(s) if s.dim != c.dim => out.push(Violation::LocationDimension {
                location: loc.clone(),
                location_dim: c.dim,
                state_dim: s.dim,
            }),
            Some(s) => {
                if !c.constraint.clauses().iter().all(|cl| s.constraint.contains(cl)) {
                    out.push(Violation::LocationNotEntailed { location: loc.clone() });
                }
            }
        }
    }
    for (from, letter, to) in nfa.delta.keys() {
        if pds.locations.contains(to) {
            out.push(Violation::IncomingToLocation {
                from: from.clone(),
                letter: letter.clone(),
                to: to.clone(),
            });
        }
    }
    // forced() conjoins a push rule with two transitions into arbitrary states
    let max_state = nfa.states.components.values().map(|c| c.dim).max().unwrap_or(0);
    for ((l, k, l2, k1, k2), d) in &pds.push {
        let width = d.width() + 2 * max_state;
        if width > theory.max_width() && pds.locations.contains(l) && pds.locations.contains(l2) {
            out.push(Violation::WidthBudget {
                what: format!("saturation step for push rule ({l}, {k}, {l2}, {k1}, {k2})"),
                width,
                budget: theory.max_width(),
            });
        }
    }
    out
}
