//! Shared inputs for the benchmark targets.

use loopforge::permgroup::Permutation;

/// Generators of the symmetric group on `n` points: a transposition and
/// the full cycle.
pub fn symmetric_generators(n: usize) -> Vec<Permutation> {
    let cycle: Vec<usize> = (0..n).collect();
    vec![
        Permutation::from_cycle(n, &[0, 1]).expect("transposition"),
        Permutation::from_cycle(n, &cycle).expect("n-cycle"),
    ]
}
