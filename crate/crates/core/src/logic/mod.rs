//! Formulas over an atom vocabulary, complete clauses, and the legal
//! disjunctive normal form (ldnf) with quantifier elimination.

mod clause;
mod formula;
mod ldnf;
mod theory;

use thiserror::Error;

use crate::atoms::AtomsError;

pub use clause::{Clause, Literal};
pub use formula::{parse_expr, Expr, Formula};
pub use ldnf::Ldnf;
pub use theory::{Conjunct, Theory, DEFAULT_MAX_WIDTH};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("width {width} exceeds the width budget {budget}")]
    WidthExceeded { width: usize, budget: usize },
    #[error("malformed clause: {0}")]
    Malformed(String),
    #[error("inconsistent clause")]
    Inconsistent,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
    #[error("width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error(transparent)]
    Atoms(#[from] AtomsError),
}
