//! Exact construction and verification of unbreakable finite loops.
//!
//! A loop is unbreakable when its only subloops are itself and the trivial
//! one-element loop. This crate builds such loops for every order `n >= 5`
//! and certifies their algebraic properties by exact computation:
//!
//! * [`permgroup`] — permutation arithmetic, deterministic Schreier-Sims,
//!   symmetric/alternating classification and Piccard's generation criteria;
//! * [`loopcore`] — Cayley tables, loop validation, subloop closure,
//!   multiplication groups, isomorphism canonicalization;
//! * [`construct_odd`] — template-based commutative loops of odd order with
//!   multiplication group `S_n` or `A_n`;
//! * [`construct_even`] — latin-rectangle loops of even order with
//!   multiplication group `S_n`, plus a generator certificate;
//! * [`search`] — isomorph-free enumeration and census of small loops.
//!
//! All group orders are exact big integers; nothing is sampled or
//! approximated in the verification paths.

pub mod construct_even;
pub mod construct_odd;
pub mod loopcore;
pub mod permgroup;
pub mod search;

pub use loopcore::{CayleyTable, GroupClass, LoopReport, TableError, Validation};
pub use permgroup::{GroupDescriptor, Parity, PermError, Permutation};

/// Version tag written into every JSON document this crate emits.
pub const JSON_SCHEMA_VERSION: u32 = 1;
