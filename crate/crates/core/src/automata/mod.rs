//! FO-definable sets, NFA and pushdown systems as indexed families of ldnfs.

mod json;
mod ops;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::atoms::{AtomsError, ConcreteAtom};
use crate::logic::{Ldnf, LogicError, Theory};

pub use json::{nfa_to_json, pds_to_json, set_to_json};
pub use ops::{nfa_accepts, nfa_nonempty, nfa_nonempty_from, orbit_count, product_nfa, Acceptor, AcceptSets};
pub use validate::{validate, validate_nfa, validate_pds, Violation};

/// `(source, letter, target)` index triple of a transition family.
pub type Triple = (String, String, String);
/// `(location, letter, location', first pushed, second pushed)`; the first
/// pushed letter ends up on top.
pub type PushKey = (String, String, String, String, String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Atoms(#[from] AtomsError),
    #[error("unknown {kind} `{label}`")]
    UnknownIndex { kind: &'static str, label: String },
    #[error("{what}: expected {expected} atoms, got {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("the automata are over different alphabets")]
    AlphabetMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Component {
    pub dim: usize,
    pub constraint: Ldnf,
}

/// A finite indexed union of definable sets of atom tuples.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FoSet {
    pub components: BTreeMap<String, Component>,
}

impl FoSet {
    pub fn new() -> FoSet {
        FoSet::default()
    }

    /// Adds (or replaces) a component; the constraint's width must be `dim`.
    pub fn insert(&mut self, label: impl Into<String>, dim: usize, constraint: Ldnf) -> Result<(), AutomataError> {
        if constraint.width() != dim {
            return Err(LogicError::WidthMismatch {
                left: dim,
                right: constraint.width(),
            }
            .into());
        }
        self.components.insert(label.into(), Component { dim, constraint });
        Ok(())
    }

    /// Adds an unconstrained component.
    pub fn insert_full(&mut self, theory: &Theory, label: impl Into<String>, dim: usize) -> Result<(), AutomataError> {
        let full = theory.full(dim)?;
        self.insert(label, dim, full)
    }

    pub fn get(&self, label: &str) -> Option<&Component> {
        self.components.get(label)
    }

    pub fn dim(&self, label: &str) -> Option<usize> {
        self.components.get(label).map(|c| c.dim)
    }

    pub fn labels(&self) -> impl Iterator<Item = &String> {
        self.components.keys()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.components.contains_key(label)
    }

    pub(crate) fn require(&self, kind: &'static str, label: &str) -> Result<&Component, AutomataError> {
        self.components.get(label).ok_or_else(|| AutomataError::UnknownIndex {
            kind,
            label: label.to_string(),
        })
    }
}

/// FO-definable NFA. Missing transition entries denote the empty ldnf.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FoNfa {
    pub alphabet: FoSet,
    pub states: FoSet,
    pub finals: BTreeMap<String, Ldnf>,
    /// Entry `(l, k, l')` is over the state block of `l`, then the letter
    /// block of `k`, then the state block of `l'`.
    pub delta: BTreeMap<Triple, Ldnf>,
}

impl FoNfa {
    pub fn transition(&self, from: &str, letter: &str, to: &str) -> Option<&Ldnf> {
        self.delta.get(&(from.to_string(), letter.to_string(), to.to_string()))
    }
}

/// FO-definable pushdown system with push and pop rules.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FoPds {
    pub alphabet: FoSet,
    pub locations: FoSet,
    /// Entry `(l, k, l', k', k'')` is over the blocks `x, y, x', y', y''`.
    pub push: BTreeMap<PushKey, Ldnf>,
    /// Entry `(l, k, l')` is over the blocks `x, y, x'`.
    pub pop: BTreeMap<Triple, Ldnf>,
}

/// A configuration `(location(atoms), stack)` with the stack top first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub location: String,
    pub state_atoms: Vec<ConcreteAtom>,
    pub stack: Vec<(String, Vec<ConcreteAtom>)>,
}

fn fmt_atoms(f: &mut fmt::Formatter<'_>, atoms: &[ConcreteAtom]) -> fmt::Result {
    let parts: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
    write!(f, "({})", parts.join(","))
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.location)?;
        if !self.state_atoms.is_empty() {
            fmt_atoms(f, &self.state_atoms)?;
        }
        f.write_str(" |")?;
        for (letter, atoms) in &self.stack {
            write!(f, " {letter}")?;
            fmt_atoms(f, atoms)?;
        }
        Ok(())
    }
}
