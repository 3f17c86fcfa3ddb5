//! Symbolic backward reachability for pushdown systems whose control
//! locations and stack letters carry tuples of atoms from a homogeneous
//! structure.

pub mod atoms;
pub mod logic;
pub mod automata;
pub mod examples;
pub mod saturation;
pub mod reachability;
pub mod oracle;
