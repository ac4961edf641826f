use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::permgroup::{sgs_from_generators, GroupClass, GroupDescriptor, Parity, Permutation};
use crate::JSON_SCHEMA_VERSION;

use super::table::{CayleyTable, Validation};

/// Group classification tag as it appears in JSON reports; the exact order
/// is carried separately as a decimal string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupClassName {
    Symmetric,
    Alternating,
    Other,
}

impl From<&GroupClass> for GroupClassName {
    fn from(class: &GroupClass) -> GroupClassName {
        match class {
            GroupClass::Symmetric => GroupClassName::Symmetric,
            GroupClass::Alternating => GroupClassName::Alternating,
            GroupClass::Other(_) => GroupClassName::Other,
        }
    }
}

/// Verification verdict for one table. Group fields are present only when
/// the table is a loop; `right_parities` only when it is noncommutative.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoopReport {
    pub schema: u32,
    pub order: usize,
    pub is_latin: bool,
    pub is_loop: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity: Option<usize>,
    pub commutative: bool,
    pub associative: bool,
    pub unbreakable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_class: Option<GroupClassName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_order: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left_parities: Option<Vec<Parity>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right_parities: Option<Vec<Parity>>,
}

impl LoopReport {
    pub fn group_order_value(&self) -> Option<BigUint> {
        self.group_order
            .as_ref()
            .and_then(|s| s.parse::<BigUint>().ok())
    }
}

/// Smallest multiplicatively closed subset of `G` containing `seed`,
/// returned sorted. In a finite quasigroup such a set is automatically
/// closed under both divisions and contains the identity.
pub fn subloop_closure(t: &CayleyTable, seed: &[usize]) -> Vec<usize> {
    let mask = closure_mask(t, seed);
    (0..t.order()).filter(|&x| mask >> x & 1 == 1).collect()
}

fn closure_mask(t: &CayleyTable, seed: &[usize]) -> u128 {
    let n = t.order();
    assert!(n <= 128, "closure mask supports order <= 128");
    assert!(!seed.is_empty(), "seed must be nonempty");
    let mut mask: u128 = 0;
    let mut queue: Vec<usize> = Vec::new();
    for &s in seed {
        if mask >> s & 1 == 0 {
            mask |= 1 << s;
            queue.push(s);
        }
    }
    let mut members: Vec<usize> = queue.clone();
    while let Some(a) = queue.pop() {
        let mut idx = 0;
        while idx < members.len() {
            let b = members[idx];
            idx += 1;
            for v in [t.get(a, b), t.get(b, a)] {
                if mask >> v & 1 == 0 {
                    mask |= 1 << v;
                    members.push(v);
                    queue.push(v);
                }
            }
        }
    }
    mask
}

/// True iff every single non-identity element generates the whole loop.
pub fn is_unbreakable(t: &CayleyTable) -> bool {
    let identity = t
        .validate()
        .identity()
        .expect("is_unbreakable requires a loop");
    let n = t.order();
    let full: u128 = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    (0..n)
        .filter(|&k| k != identity)
        .all(|k| closure_mask(t, &[k]) == full)
}

/// The group generated by all left and right actions. For a commutative
/// table the right actions coincide with the left ones and are dropped.
pub fn multiplication_group(t: &CayleyTable) -> GroupDescriptor {
    let n = t.order();
    let mut gens: Vec<Permutation> = Vec::new();
    for a in 0..n {
        gens.push(t.left_action(a));
    }
    if !t.is_commutative() {
        for a in 0..n {
            gens.push(t.right_action(a));
        }
    }
    gens.retain(|g| !g.is_identity());
    gens.dedup();
    sgs_from_generators(n, &gens).expect("actions share the table degree")
}

/// Runs every check and aggregates the verdicts.
pub fn analyze(t: &CayleyTable) -> LoopReport {
    let n = t.order();
    let validation = t.validate();
    let mut report = LoopReport {
        schema: JSON_SCHEMA_VERSION,
        order: n,
        is_latin: validation.is_latin(),
        is_loop: validation.is_loop(),
        identity: validation.identity(),
        commutative: false,
        associative: false,
        unbreakable: false,
        group_class: None,
        group_order: None,
        left_parities: None,
        right_parities: None,
    };
    if let Validation::Loop { .. } = validation {
        report.commutative = t.is_commutative();
        report.associative = t.is_associative();
        report.unbreakable = is_unbreakable(t);
        let gd = multiplication_group(t);
        let class = gd.classify();
        report.group_class = Some(GroupClassName::from(&class));
        report.group_order = Some(gd.order().to_string());
        report.left_parities = Some((0..n).map(|a| t.left_action(a).parity()).collect());
        if !report.commutative {
            report.right_parities = Some((0..n).map(|a| t.right_action(a).parity()).collect());
        }
    }
    report
}
