use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use super::perm::{Parity, Permutation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("generator degree {found} does not match group degree {expected}")]
    DegreeMismatch { expected: usize, found: usize },
}

/// Classification of a permutation group on `n` points by exact order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupClass {
    Symmetric,
    Alternating,
    Other(BigUint),
}

impl fmt::Display for GroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupClass::Symmetric => write!(f, "symmetric"),
            GroupClass::Alternating => write!(f, "alternating"),
            GroupClass::Other(order) => write!(f, "other({order})"),
        }
    }
}

pub fn factorial(n: usize) -> BigUint {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= BigUint::from(k);
    }
    acc
}

/// One level of the stabilizer chain: the subgroup fixing all earlier base
/// points, its orbit of `base`, and a transversal `u_beta` with
/// `u_beta(base) = beta`.
struct Level {
    base: usize,
    gens: Vec<Permutation>,
    orbit: Vec<usize>,
    transversal: Vec<Option<Permutation>>,
}

impl Level {
    fn new(base: usize, degree: usize) -> Level {
        let mut transversal = vec![None; degree];
        transversal[base] = Some(Permutation::identity(degree));
        Level {
            base,
            gens: Vec::new(),
            orbit: vec![base],
            transversal,
        }
    }
}

struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    fn new(degree: usize) -> StabChain {
        StabChain {
            degree,
            levels: Vec::new(),
        }
    }

    /// Sifts `g` through levels `start..`, returning the residue and the
    /// level index at which sifting stopped (levels.len() if it ran out).
    fn sift_from(&self, start: usize, g: Permutation) -> (Permutation, usize) {
        let mut h = g;
        for (idx, level) in self.levels.iter().enumerate().skip(start) {
            let img = h.apply(level.base);
            match &level.transversal[img] {
                None => return (h, idx),
                Some(u) => h = u.inverse().after(&h),
            }
        }
        let end = self.levels.len();
        (h, end)
    }

    fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        self.sift_from(0, g.clone()).0.is_identity()
    }

    fn insert(&mut self, g: Permutation) {
        if g.is_identity() {
            return;
        }
        let (residue, stuck) = self.sift_from(0, g);
        if residue.is_identity() {
            return;
        }
        self.add_residue(0, residue, stuck);
    }

    /// Installs a sift residue that got stuck at `stuck` while being sifted
    /// from level `from`, then re-closes the affected levels bottom-up.
    fn add_residue(&mut self, from: usize, residue: Permutation, stuck: usize) {
        if stuck == self.levels.len() {
            let pt = residue
                .first_moved_point()
                .expect("non-identity residue moves a point");
            let degree = self.degree;
            self.levels.push(Level::new(pt, degree));
        }
        for l in from..=stuck {
            self.levels[l].gens.push(residue.clone());
        }
        for l in (from..=stuck).rev() {
            self.close_level(l);
        }
    }

    /// Deterministic breadth-first orbit and transversal of level `k`.
    fn recompute_orbit(&mut self, k: usize) {
        let degree = self.degree;
        let level = &mut self.levels[k];
        level.transversal = vec![None; degree];
        level.transversal[level.base] = Some(Permutation::identity(degree));
        level.orbit = vec![level.base];
        let mut qi = 0;
        while qi < level.orbit.len() {
            let beta = level.orbit[qi];
            qi += 1;
            let u_beta = level.transversal[beta].clone().expect("orbit point has transversal");
            for s in &level.gens {
                let gamma = s.apply(beta);
                if level.transversal[gamma].is_none() {
                    level.transversal[gamma] = Some(s.after(&u_beta));
                    level.orbit.push(gamma);
                }
            }
        }
    }

    /// Ensures every Schreier generator of level `k` sifts to identity
    /// through the levels below, assuming those levels are already closed.
    fn close_level(&mut self, k: usize) {
        self.recompute_orbit(k);
        let mut oi = 0;
        while oi < self.levels[k].orbit.len() {
            let beta = self.levels[k].orbit[oi];
            oi += 1;
            for gi in 0..self.levels[k].gens.len() {
                let level = &self.levels[k];
                let s = &level.gens[gi];
                let u_beta = level.transversal[beta].as_ref().expect("orbit point");
                let gamma = s.apply(beta);
                let u_gamma = level.transversal[gamma].as_ref().expect("orbit closed under gens");
                let schreier = u_gamma.inverse().after(s).after(u_beta);
                if schreier.is_identity() {
                    continue;
                }
                let (residue, stuck) = self.sift_from(k + 1, schreier);
                if residue.is_identity() {
                    continue;
                }
                self.add_residue(k + 1, residue, stuck);
            }
        }
    }

    fn order(&self) -> BigUint {
        let mut acc = BigUint::one();
        for level in &self.levels {
            acc *= BigUint::from(level.orbit.len());
        }
        acc
    }
}

/// A permutation group given by a base and strong generating set, with
/// exact order and a membership test by sifting.
pub struct GroupDescriptor {
    degree: usize,
    order: BigUint,
    chain: StabChain,
}

impl GroupDescriptor {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// Base points of the stabilizer chain, in chain order.
    pub fn base(&self) -> Vec<usize> {
        self.chain.levels.iter().map(|l| l.base).collect()
    }

    /// The strong generators, deduplicated and sorted.
    pub fn strong_generators(&self) -> Vec<Permutation> {
        let set: BTreeSet<Permutation> = self
            .chain
            .levels
            .iter()
            .flat_map(|l| l.gens.iter().cloned())
            .collect();
        set.into_iter().collect()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.chain.contains(g)
    }

    pub fn is_trivial(&self) -> bool {
        self.order.is_one()
    }

    /// `Symmetric` iff the order is `n!`; `Alternating` iff the order is
    /// `n!/2` and every strong generator is even; anything else reports its
    /// exact order.
    pub fn classify(&self) -> GroupClass {
        let full = factorial(self.degree);
        if self.order == full {
            return GroupClass::Symmetric;
        }
        if self.degree >= 2 && self.order == &full / 2u8 {
            let all_even = self
                .strong_generators()
                .iter()
                .all(|g| g.parity() == Parity::Even);
            if all_even {
                return GroupClass::Alternating;
            }
        }
        GroupClass::Other(self.order.clone())
    }
}

impl fmt::Debug for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupDescriptor")
            .field("degree", &self.degree)
            .field("order", &self.order)
            .field("base", &self.base())
            .finish()
    }
}

/// Deterministic Schreier-Sims over the given generators. Base points are
/// picked greedily as the first point moved by each non-sifting residue, so
/// the result depends only on the generator input order.
pub fn sgs_from_generators(
    degree: usize,
    gens: &[Permutation],
) -> Result<GroupDescriptor, GroupError> {
    let mut chain = StabChain::new(degree);
    for g in gens {
        if g.degree() != degree {
            return Err(GroupError::DegreeMismatch {
                expected: degree,
                found: g.degree(),
            });
        }
        chain.insert(g.clone());
    }
    let order = chain.order();
    Ok(GroupDescriptor {
        degree,
        order,
        chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(degree: usize, cycle: &[usize]) -> Permutation {
        Permutation::from_cycle(degree, cycle).unwrap()
    }

    /// Brute-force closure of a generator set; only usable at tiny degrees.
    pub(crate) fn brute_closure(degree: usize, gens: &[Permutation]) -> BTreeSet<Permutation> {
        let mut elements: BTreeSet<Permutation> = BTreeSet::new();
        elements.insert(Permutation::identity(degree));
        let mut queue: Vec<Permutation> = gens.to_vec();
        while let Some(g) = queue.pop() {
            if elements.contains(&g) {
                continue;
            }
            for e in elements.iter() {
                let prod = g.after(e);
                if !elements.contains(&prod) {
                    queue.push(prod);
                }
            }
            elements.insert(g);
        }
        // One more pass so products of everything are present.
        loop {
            let mut added = Vec::new();
            for a in elements.iter() {
                for b in gens {
                    let prod = b.after(a);
                    if !elements.contains(&prod) {
                        added.push(prod);
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            elements.extend(added);
        }
        elements
    }

    #[test]
    fn symmetric_group_of_degree_five() {
        let gens = [cyc(5, &[0, 1]), cyc(5, &[0, 1, 2, 3, 4])];
        let gd = sgs_from_generators(5, &gens).unwrap();
        assert_eq!(gd.order(), &BigUint::from(120u32));
        assert_eq!(gd.classify(), GroupClass::Symmetric);
        assert_eq!(brute_closure(5, &gens).len(), 120);
    }

    #[test]
    fn cyclic_group_of_order_three() {
        let gens = [cyc(3, &[0, 1, 2])];
        let gd = sgs_from_generators(3, &gens).unwrap();
        assert_eq!(gd.order(), &BigUint::from(3u32));
        assert_eq!(gd.classify(), GroupClass::Alternating);
    }

    #[test]
    fn alternating_group_from_three_cycles() {
        let gens = [cyc(5, &[0, 1, 2]), cyc(5, &[2, 3, 4])];
        let gd = sgs_from_generators(5, &gens).unwrap();
        assert_eq!(gd.order(), &BigUint::from(60u32));
        assert_eq!(gd.classify(), GroupClass::Alternating);
        assert_eq!(brute_closure(5, &gens).len(), 60);
    }

    #[test]
    fn trivial_group_from_empty_generators() {
        let gd = sgs_from_generators(4, &[]).unwrap();
        assert!(gd.is_trivial());
        assert_eq!(gd.order(), &BigUint::one());
        assert!(gd.contains(&Permutation::identity(4)));
        assert!(!gd.contains(&cyc(4, &[0, 1])));
    }

    #[test]
    fn degree_mismatch_is_an_error() {
        let err = sgs_from_generators(4, &[cyc(5, &[0, 1])]).unwrap_err();
        assert_eq!(err, GroupError::DegreeMismatch { expected: 4, found: 5 });
    }

    #[test]
    fn membership_agrees_with_brute_closure() {
        let gens = [cyc(6, &[0, 1, 2]), cyc(6, &[3, 4]), cyc(6, &[1, 3])];
        let gd = sgs_from_generators(6, &gens).unwrap();
        let closure = brute_closure(6, &gens);
        assert_eq!(BigUint::from(closure.len()), *gd.order());
        // Spot-check membership on every element of the closure and on a
        // few outsiders.
        for g in closure.iter().take(200) {
            assert!(gd.contains(g));
        }
        let outside = cyc(6, &[0, 5]);
        assert_eq!(gd.contains(&outside), closure.contains(&outside));
    }

    #[test]
    fn strong_generators_sift_to_identity() {
        let gens = [cyc(7, &[0, 1, 2, 3, 4, 5, 6]), cyc(7, &[0, 1])];
        let gd = sgs_from_generators(7, &gens).unwrap();
        for g in gd.strong_generators() {
            assert!(gd.contains(&g));
        }
        // Order equals the product of fundamental orbit sizes, which for
        // S_7 is 7!.
        assert_eq!(gd.order(), &factorial(7));
    }

    #[test]
    fn other_classification_carries_order() {
        // Z_2^3 acting on 6 points via three disjoint transpositions has
        // order 8, neither symmetric nor alternating.
        let gens = [cyc(6, &[0, 1]), cyc(6, &[2, 3]), cyc(6, &[4, 5])];
        let gd = sgs_from_generators(6, &gens).unwrap();
        assert_eq!(gd.classify(), GroupClass::Other(BigUint::from(8u32)));
    }
}
