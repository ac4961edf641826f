use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("images of length {len} are not a bijection on 0..{len}: value {value} repeats")]
    NotBijection { len: usize, value: usize },
    #[error("image {value} out of range for degree {degree}")]
    OutOfRange { value: usize, degree: usize },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("cycle contains repeated or out-of-range point {point}")]
    BadCycle { point: usize },
}

/// Parity of a permutation. The parity of a product is the XOR of the
/// factor parities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_inversions(count: usize) -> Parity {
        if count % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn combine(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_even(self) -> bool {
        self == Parity::Even
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// Parity of an arbitrary sequence of distinct values, by inversion count.
pub fn sequence_parity(values: &[usize]) -> Parity {
    let mut inversions = 0usize;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            if values[i] > values[j] {
                inversions += 1;
            }
        }
    }
    Parity::of_inversions(inversions)
}

/// A cycle of a permutation, written starting at its minimum element.
pub type Cycle = Vec<usize>;

/// A bijection on `{0..degree-1}`, stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Permutation {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Permutation, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n {
                return Err(PermError::OutOfRange {
                    value: v,
                    degree: n,
                });
            }
            if seen[v] {
                return Err(PermError::NotBijection { len: n, value: v });
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds the permutation with the given cycle on `{0..degree-1}`,
    /// fixing everything else.
    pub fn from_cycle(degree: usize, cycle: &[usize]) -> Result<Permutation, PermError> {
        let mut images: Vec<usize> = (0..degree).collect();
        for (k, &pt) in cycle.iter().enumerate() {
            if pt >= degree {
                return Err(PermError::BadCycle { point: pt });
            }
            let next = cycle[(k + 1) % cycle.len()];
            if images[pt] != pt && cycle.len() > 1 {
                return Err(PermError::BadCycle { point: pt });
            }
            images[pt] = next;
        }
        Permutation::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Smallest point `x` with `f(x) != x`, if any.
    pub fn first_moved_point(&self) -> Option<usize> {
        self.images.iter().enumerate().find(|(i, &v)| *i != v).map(|(i, _)| i)
    }

    /// `(f * g)(x) = f(g(x))`: `g` acts first.
    pub fn compose(&self, g: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != g.degree() {
            return Err(PermError::DegreeMismatch {
                left: self.degree(),
                right: g.degree(),
            });
        }
        Ok(self.after(g))
    }

    /// Infallible composition for callers that already hold same-degree
    /// permutations. Same convention as [`Permutation::compose`].
    pub(crate) fn after(&self, g: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), g.degree());
        Permutation {
            images: g.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v] = i;
        }
        Permutation { images }
    }

    pub fn pow(&self, mut k: usize) -> Permutation {
        let mut acc = Permutation::identity(self.degree());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = base.after(&acc);
            }
            base = base.after(&base);
            k >>= 1;
        }
        acc
    }

    /// Disjoint cycles covering the non-fixed points. Each cycle starts at
    /// its minimum element; cycles are sorted by first element.
    pub fn cycle_decomposition(&self) -> Vec<Cycle> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Parity via cycle type: even iff the number of even-length cycles is
    /// even. Cross-checked against the inversion count in debug builds.
    pub fn parity(&self) -> Parity {
        let even_length_cycles = self
            .cycle_decomposition()
            .iter()
            .filter(|c| c.len() % 2 == 0)
            .count();
        let result = Parity::of_inversions(even_length_cycles);
        debug_assert_eq!(result, sequence_parity(&self.images), "parity rules disagree");
        result
    }

    /// Cycle notation, e.g. `(0 1 4)(2 3)`; the identity prints as `()`.
    pub fn cycle_notation(&self) -> String {
        let cycles = self.cycle_decomposition();
        if cycles.is_empty() {
            return "()".to_string();
        }
        let mut out = String::new();
        for cycle in cycles {
            out.push('(');
            for (k, pt) in cycle.iter().enumerate() {
                if k > 0 {
                    out.push(' ');
                }
                out.push_str(&pt.to_string());
            }
            out.push(')');
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// One-line image list `[i0 i1 ... i(n-1)]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, v) in self.images.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cyc(degree: usize, cycle: &[usize]) -> Permutation {
        Permutation::from_cycle(degree, cycle).unwrap()
    }

    #[test]
    fn compose_identity() {
        let id = Permutation::identity(5);
        let g = cyc(5, &[0, 1, 2]);
        assert_eq!(id.compose(&g).unwrap(), g);
    }

    #[test]
    fn compose_applies_right_factor_first() {
        let f = cyc(3, &[0, 1]);
        let g = cyc(3, &[1, 2]);
        // f(g(x)): 0 -> g 0 -> f 1; 1 -> g 2 -> f 2; 2 -> g 1 -> f 0.
        assert_eq!(f.compose(&g).unwrap().images(), &[1, 2, 0]);
    }

    #[test]
    fn squaring_a_five_cycle() {
        let c = cyc(5, &[0, 1, 2, 3, 4]);
        let sq = c.compose(&c).unwrap();
        assert_eq!(sq, cyc(5, &[0, 2, 4, 1, 3]));
    }

    #[test]
    fn compose_degree_mismatch() {
        let f = Permutation::identity(3);
        let g = Permutation::identity(4);
        assert!(matches!(
            f.compose(&g),
            Err(PermError::DegreeMismatch { left: 3, right: 4 })
        ));
    }

    #[test]
    fn parity_basics() {
        assert_eq!(Permutation::identity(4).parity(), Parity::Even);
        assert_eq!(cyc(4, &[0, 1]).parity(), Parity::Odd);
        // A 3-cycle is even, at any degree that contains it.
        assert_eq!(cyc(7, &[2, 3, 6]).parity(), Parity::Even);
        assert_eq!(cyc(9, &[2, 3, 6]).parity(), Parity::Even);
    }

    #[test]
    fn cycle_decomposition_shapes() {
        assert!(Permutation::identity(6).cycle_decomposition().is_empty());
        let p = Permutation::from_images(vec![1, 0, 3, 2]).unwrap();
        assert_eq!(p.cycle_decomposition(), vec![vec![0, 1], vec![2, 3]]);
        let q = cyc(7, &[4, 6, 5]);
        // Starts at the minimum element of the cycle.
        assert_eq!(q.cycle_decomposition(), vec![vec![4, 6, 5]]);
    }

    #[test]
    fn cycle_notation_format() {
        let p = Permutation::from_images(vec![1, 0, 3, 2]).unwrap();
        assert_eq!(p.cycle_notation(), "(0 1)(2 3)");
        assert_eq!(Permutation::identity(3).cycle_notation(), "()");
        assert_eq!(p.to_string(), "[1 0 3 2]");
    }

    #[test]
    fn inverse_and_pow() {
        let c = cyc(5, &[0, 1, 2, 3, 4]);
        assert!(c.compose(&c.inverse()).unwrap().is_identity());
        assert_eq!(c.pow(5), Permutation::identity(5));
        assert_eq!(c.pow(2), c.after(&c));
    }

    #[test]
    fn from_images_rejects_non_bijections() {
        assert!(Permutation::from_images(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_images(vec![0, 3]).is_err());
    }

    fn arb_perm(max_degree: usize) -> impl Strategy<Value = Permutation> {
        (1..=max_degree).prop_flat_map(|n| {
            Just((0..n).collect::<Vec<_>>())
                .prop_shuffle()
                .prop_map(|v| Permutation::from_images(v).unwrap())
        })
    }

    proptest! {
        #[test]
        fn parity_is_multiplicative((f, g) in (1usize..=12).prop_flat_map(|n| {
            let p = Just((0..n).collect::<Vec<_>>()).prop_shuffle()
                .prop_map(|v| Permutation::from_images(v).unwrap());
            let q = Just((0..n).collect::<Vec<_>>()).prop_shuffle()
                .prop_map(|v| Permutation::from_images(v).unwrap());
            (p, q)
        })) {
            let fg = f.compose(&g).unwrap();
            prop_assert_eq!(fg.parity(), f.parity().combine(g.parity()));
        }

        #[test]
        fn inverse_roundtrip(p in arb_perm(12)) {
            prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
            prop_assert!(p.inverse().compose(&p).unwrap().is_identity());
        }

        #[test]
        fn cycles_cover_moved_points(p in arb_perm(12)) {
            let mut moved: Vec<usize> = (0..p.degree()).filter(|&x| p.apply(x) != x).collect();
            let mut from_cycles: Vec<usize> =
                p.cycle_decomposition().into_iter().flatten().collect();
            moved.sort_unstable();
            from_cycles.sort_unstable();
            prop_assert_eq!(moved, from_cycles);
        }
    }
}
