//! Permutations and permutation groups over `{0..n-1}`.
//!
//! Composition is fixed crate-wide to `(f * g)(x) = f(g(x))`: the right
//! factor acts first. Group orders are exact [`num_bigint::BigUint`] values
//! computed from a strong generating set.

mod perm;
mod piccard;
mod sgs;

pub use perm::{sequence_parity, Cycle, Parity, PermError, Permutation};
pub use piccard::{distance, piccard_alternating, piccard_symmetric, PiccardError};
pub use sgs::{factorial, sgs_from_generators, GroupClass, GroupDescriptor, GroupError};
