//! Misère Sprouts analysis.
//!
//! * [`position`]: the string notation, validation and canonical forms.
//! * [`movegen`]: legal moves and independent lands.
//! * [`trees`]: interned canonical and reduced canonical trees.
//! * [`solver`]: outcome search over (lands, *0/*1 parity, tree list) nodes.
//! * [`store`]: basis and proof files.

pub mod budget;
pub mod movegen;
pub mod position;
pub mod solver;
pub mod store;
pub mod trees;

#[cfg(test)]
mod test_support;

pub use budget::{Budget, BudgetExceeded};
pub use position::{parse, render, Position};
pub use trees::{Outcome, TreeId, TreeStore};

