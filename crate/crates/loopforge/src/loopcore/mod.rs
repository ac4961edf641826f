//! Cayley tables and the algebraic checks that turn a table into a verdict:
//! latin/loop validation, commutativity, associativity, subloop closure,
//! unbreakability, multiplication group and its classification, and
//! canonical forms under isomorphism (identity fixed at 0).

mod analyze;
mod canonical;
mod table;

pub use analyze::{
    analyze, is_unbreakable, multiplication_group, subloop_closure, GroupClassName, LoopReport,
};
pub use canonical::{canonical_form, is_canonical};
pub use table::{CayleyTable, LatinViolation, Line, TableError, Validation};

pub use crate::permgroup::GroupClass;
