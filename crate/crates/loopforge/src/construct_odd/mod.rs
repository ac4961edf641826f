//! Commutative unbreakable loops of odd order, built from partially
//! defined symmetric tables ("templates") whose open band is completed by
//! a deterministic constraint search.
//!
//! Route by order and target group:
//! * `n = 5` — the unique nonassociative unbreakable loop, from the search
//!   module (symmetric group only; no alternating loop exists at 5);
//! * `7 <= n <= 19` — simplified template plus filtered completion, with a
//!   direct search fallback;
//! * `21 <= n` symmetric — template, repeating-pattern tiling, residual
//!   search with an odd row-6 segment;
//! * `21 <= n <= 41` alternating — simplified template (central triangle
//!   pinned from 25 up) with every applicable row segment even;
//! * `43 <= n` alternating — augmented template with reusable blocks
//!   between junction interfaces.

mod fill;
mod template;
mod zone;

use std::fmt;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::loopcore::{is_unbreakable, CayleyTable, GroupClass};

pub use fill::{fill_alternating, fill_symmetric};
pub use template::{
    build_augmented_template, build_simplified_template, build_template, zone_row_parity,
    RowParityError, TemplateError,
};
pub use zone::{
    complete_zone, for_each_completion, parity_window, Completion, PartialCayleyTable,
    PartialTableError, ZoneConstraints,
};

/// Requested multiplication group for a construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetGroup {
    Symmetric,
    Alternating,
}

impl TargetGroup {
    pub fn group_class(self) -> GroupClass {
        match self {
            TargetGroup::Symmetric => GroupClass::Symmetric,
            TargetGroup::Alternating => GroupClass::Alternating,
        }
    }
}

impl fmt::Display for TargetGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetGroup::Symmetric => write!(f, "symmetric"),
            TargetGroup::Alternating => write!(f, "alternating"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("no {target} unbreakable loop of order {n}: {reason}")]
    Infeasible {
        n: usize,
        target: String,
        reason: String,
    },
    #[error("internal search failure for order {n}: {detail}")]
    SearchFailed { n: usize, detail: String },
    #[error(transparent)]
    Template(#[from] TemplateError),
}

/// The unique nonassociative unbreakable loop of order 5.
fn order_five_loop() -> CayleyTable {
    let mut found = None;
    crate::search::enumerate_loops(5, false, |t| {
        if !t.is_associative() && is_unbreakable(t) {
            found = Some(t.clone());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })
    .expect("order 5 is enumerable");
    found.expect("one nonassociative unbreakable loop of order 5 exists")
}

/// Builds a nonassociative unbreakable loop of odd order `n >= 5` whose
/// multiplication group matches `target`; commutative for `n >= 7`.
pub fn construct_odd_loop(n: usize, target: TargetGroup) -> Result<CayleyTable, ConstructError> {
    if n % 2 == 0 || n < 5 {
        return Err(ConstructError::Infeasible {
            n,
            target: target.to_string(),
            reason: "this constructor serves odd orders n >= 5".into(),
        });
    }
    if n == 5 {
        return match target {
            TargetGroup::Symmetric => Ok(order_five_loop()),
            TargetGroup::Alternating => Err(ConstructError::Infeasible {
                n,
                target: target.to_string(),
                reason: "the alternating group A_5 is not the multiplication group of any order-5 loop"
                    .into(),
            }),
        };
    }
    match target {
        TargetGroup::Symmetric if n >= 21 => fill_symmetric(n),
        TargetGroup::Alternating if n >= 43 => fill_alternating(n),
        _ => fill::fill_intermediate(n, target),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loopcore::{analyze, multiplication_group, GroupClassName};

    #[test]
    fn order_five_is_the_known_one() {
        let t = construct_odd_loop(5, TargetGroup::Symmetric).unwrap();
        let report = analyze(&t);
        assert!(report.is_loop && report.unbreakable && !report.associative);
        assert_eq!(report.group_class, Some(GroupClassName::Symmetric));
        assert!(matches!(
            construct_odd_loop(5, TargetGroup::Alternating),
            Err(ConstructError::Infeasible { .. })
        ));
    }

    #[test]
    fn even_orders_are_rejected() {
        assert!(matches!(
            construct_odd_loop(6, TargetGroup::Symmetric),
            Err(ConstructError::Infeasible { .. })
        ));
    }

    #[test]
    fn smallest_template_symmetric_loop() {
        let t = construct_odd_loop(21, TargetGroup::Symmetric).unwrap();
        assert!(t.is_commutative());
        assert!(is_unbreakable(&t));
        assert_eq!(multiplication_group(&t).classify(), GroupClass::Symmetric);
        // The row-p segment is the bottom row of the repeating pattern.
        let vals: Vec<usize> = (11..=16).map(|c| t.get(10, c)).collect();
        assert_eq!(vals, vec![1, 2, 0, 3, 4, 5]);
    }

    #[test]
    fn alternating_loop_of_order_seven() {
        let t = construct_odd_loop(7, TargetGroup::Alternating).unwrap();
        assert!(t.is_commutative());
        assert!(is_unbreakable(&t));
        assert_eq!(multiplication_group(&t).classify(), GroupClass::Alternating);
    }

    #[test]
    fn zone_row_parity_matches_action_parity_on_a_built_loop() {
        let t = construct_odd_loop(21, TargetGroup::Symmetric).unwrap();
        let n = t.order();
        let p = (n - 1) / 2;
        for i in 6..=n - 2 {
            if i == p + 2 || i == p + 4 {
                continue;
            }
            let segment = zone_row_parity(&t, i).unwrap();
            assert_eq!(segment, t.left_action(i).parity(), "row {i}");
        }
    }
}
