//! Piccard's criteria for generating `A_n` or `S_n` from an n-cycle plus a
//! short cycle, stated in terms of gcd conditions on point distances.

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PiccardError {
    #[error("n = {n} must be odd and at least 5")]
    BadOddDegree { n: usize },
    #[error("n = {n} must be even and at least 10")]
    BadEvenDegree { n: usize },
    #[error("points must be pairwise distinct and less than n = {n}")]
    BadPoints { n: usize },
}

/// The unique `d` in `{0..n-1}` with `(a + d) mod n = b`.
pub fn distance(a: usize, b: usize, n: usize) -> usize {
    debug_assert!(a < n && b < n);
    (b + n - a) % n
}

/// Whether `<(0 1 ... n-1), (a b c)>` is the alternating group `A_n`:
/// true iff `gcd(a, b, c) = 1`.
pub fn piccard_alternating(
    n: usize,
    a: usize,
    b: usize,
    c: usize,
) -> Result<bool, PiccardError> {
    if n < 5 || n % 2 == 0 {
        return Err(PiccardError::BadOddDegree { n });
    }
    if a >= n || b >= n || c >= n || a == b || a == c || b == c {
        return Err(PiccardError::BadPoints { n });
    }
    Ok(a.gcd(&b).gcd(&c) == 1)
}

/// Whether `<(0 1 ... n-1), (a b c d e)>` is the symmetric group `S_n`:
/// true iff the distances from `a` to the other four points and `n` have
/// gcd 1.
pub fn piccard_symmetric(n: usize, cycle5: [usize; 5]) -> Result<bool, PiccardError> {
    if n < 10 || n % 2 != 0 {
        return Err(PiccardError::BadEvenDegree { n });
    }
    for (i, &x) in cycle5.iter().enumerate() {
        if x >= n {
            return Err(PiccardError::BadPoints { n });
        }
        if cycle5[..i].contains(&x) {
            return Err(PiccardError::BadPoints { n });
        }
    }
    let a = cycle5[0];
    let mut g = n;
    for &x in &cycle5[1..] {
        g = g.gcd(&distance(a, x, n));
    }
    Ok(g == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::{sgs_from_generators, GroupClass, Permutation};

    #[test]
    fn distance_examples() {
        assert_eq!(distance(3, 3, 7), 0);
        assert_eq!(distance(0, 4, 10), 4);
        assert_eq!(distance(8, 2, 10), 4);
    }

    #[test]
    fn alternating_gcd_cases() {
        assert_eq!(piccard_alternating(5, 1, 2, 3), Ok(true));
        assert_eq!(piccard_alternating(9, 0, 3, 6), Ok(false));
        assert_eq!(piccard_alternating(7, 2, 4, 6), Ok(false));
    }

    #[test]
    fn alternating_rejects_bad_input() {
        assert!(piccard_alternating(6, 0, 1, 2).is_err());
        assert!(piccard_alternating(3, 0, 1, 2).is_err());
        assert!(piccard_alternating(7, 1, 1, 2).is_err());
        assert!(piccard_alternating(7, 1, 2, 7).is_err());
    }

    #[test]
    fn symmetric_gcd_cases() {
        assert_eq!(piccard_symmetric(10, [0, 1, 2, 3, 4]), Ok(true));
        assert_eq!(piccard_symmetric(10, [0, 2, 4, 6, 8]), Ok(false));
        assert_eq!(piccard_symmetric(12, [0, 4, 8, 2, 6]), Ok(false));
    }

    #[test]
    fn symmetric_rejects_bad_input() {
        assert!(piccard_symmetric(9, [0, 1, 2, 3, 4]).is_err());
        assert!(piccard_symmetric(8, [0, 1, 2, 3, 4]).is_err());
        assert!(piccard_symmetric(10, [0, 1, 2, 3, 3]).is_err());
    }

    fn n_cycle(n: usize) -> Permutation {
        let cycle: Vec<usize> = (0..n).collect();
        Permutation::from_cycle(n, &cycle).unwrap()
    }

    #[test]
    fn alternating_predicate_matches_direct_classification() {
        // Every distinct triple at small odd n; the full sweep over larger n
        // lives in the acceptance suite.
        for n in [5usize, 7] {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if a == b || a == c || b == c {
                            continue;
                        }
                        let psi = Permutation::from_cycle(n, &[a, b, c]).unwrap();
                        let gd = sgs_from_generators(n, &[n_cycle(n), psi]).unwrap();
                        let got = gd.classify() == GroupClass::Alternating;
                        assert_eq!(
                            piccard_alternating(n, a, b, c).unwrap(),
                            got,
                            "n={n} triple=({a},{b},{c})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn symmetric_predicate_matches_direct_classification() {
        let n = 10;
        // Sweep a deterministic slice of 5-cycles.
        for a in 0..n {
            for step in 1..n {
                let pts = [
                    a,
                    (a + step) % n,
                    (a + 2 * step) % n,
                    (a + 3 * step) % n,
                    (a + 4 * step) % n,
                ];
                let mut sorted = pts;
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != 5 {
                    continue;
                }
                let psi = Permutation::from_cycle(n, &pts).unwrap();
                let gd = sgs_from_generators(n, &[n_cycle(n), psi]).unwrap();
                let got = gd.classify() == GroupClass::Symmetric;
                assert_eq!(piccard_symmetric(n, pts).unwrap(), got, "pts={pts:?}");
            }
        }
    }
}
