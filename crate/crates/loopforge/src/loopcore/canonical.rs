use std::ops::ControlFlow;

use super::table::{CayleyTable, Validation};

/// Walks all relabelings of `{1..n-1}` (identity fixed at 0) in
/// lexicographic order of the label images.
fn for_each_relabeling<F>(n: usize, f: &mut F) -> ControlFlow<()>
where
    F: FnMut(&[usize], &[usize]) -> ControlFlow<()>,
{
    fn recurse<F>(
        pos: usize,
        sigma: &mut Vec<usize>,
        inv: &mut Vec<usize>,
        used: &mut Vec<bool>,
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[usize], &[usize]) -> ControlFlow<()>,
    {
        let n = sigma.len();
        if pos == n {
            return f(sigma, inv);
        }
        for v in 1..n {
            if used[v] {
                continue;
            }
            used[v] = true;
            sigma[pos] = v;
            inv[v] = pos;
            recurse(pos + 1, sigma, inv, used, f)?;
            used[v] = false;
        }
        ControlFlow::Continue(())
    }

    if n <= 1 {
        let sigma: Vec<usize> = (0..n).collect();
        return f(&sigma, &sigma);
    }
    let mut sigma: Vec<usize> = (0..n).collect();
    let mut inv: Vec<usize> = (0..n).collect();
    let mut used = vec![false; n];
    recurse(1, &mut sigma, &mut inv, &mut used, f)
}

/// Compares the relabeling of `t` under `sigma` against `best`, updating
/// `best` in place if strictly smaller. Returns true if `best` changed.
fn improve(t: &CayleyTable, sigma: &[usize], inv: &[usize], best: &mut [usize]) -> bool {
    let n = t.order();
    for idx in 0..n * n {
        let v = sigma[t.get(inv[idx / n], inv[idx % n])];
        if v > best[idx] {
            return false;
        }
        if v < best[idx] {
            // Strictly smaller: materialize the rest of this relabeling.
            best[idx] = v;
            for rest in idx + 1..n * n {
                best[rest] = sigma[t.get(inv[rest / n], inv[rest % n])];
            }
            return true;
        }
    }
    false
}

/// Lexicographically minimal table (row-major) over all relabelings of
/// `{1..n-1}` with the identity fixed at 0. Two loops with identity 0 are
/// isomorphic iff their canonical forms are equal. Exhaustive with prefix
/// pruning; intended for n <= 8.
pub fn canonical_form(t: &CayleyTable) -> CayleyTable {
    assert_eq!(
        t.validate(),
        Validation::Loop { identity: 0 },
        "canonical_form requires a loop with identity 0"
    );
    let n = t.order();
    let mut best = t.cells().to_vec();
    let _ = for_each_relabeling(n, &mut |sigma, inv| {
        improve(t, sigma, inv, &mut best);
        ControlFlow::Continue(())
    });
    CayleyTable::from_cells(n, best).expect("relabeling preserves range")
}

/// True iff `t` equals its own canonical form. Exits as soon as any
/// relabeling is strictly smaller, with a cheap necessary test on cell
/// [1,1] first.
pub fn is_canonical(t: &CayleyTable) -> bool {
    let n = t.order();
    if n <= 2 {
        return true;
    }
    debug_assert_eq!(t.validate(), Validation::Loop { identity: 0 });
    // Cell [1,1] of a relabeling can be made 0 whenever some nonzero u has
    // u*u = 0, and 2 otherwise (never 1: x*x = x forces x = identity).
    let diag_zero = (1..n).any(|u| t.get(u, u) == 0);
    let best_11 = if diag_zero { 0 } else { 2 };
    if t.get(1, 1) > best_11 {
        return false;
    }
    let mut minimal = true;
    let _ = for_each_relabeling(n, &mut |sigma, inv| {
        for idx in 0..n * n {
            let v = sigma[t.get(inv[idx / n], inv[idx % n])];
            if v > t.cells()[idx] {
                return ControlFlow::Continue(());
            }
            if v < t.cells()[idx] {
                minimal = false;
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    minimal
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relabel(t: &CayleyTable, sigma: &[usize]) -> CayleyTable {
        let n = t.order();
        let mut inv = vec![0; n];
        for (i, &v) in sigma.iter().enumerate() {
            inv[v] = i;
        }
        let mut cells = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                cells[i * n + j] = sigma[t.get(inv[i], inv[j])];
            }
        }
        CayleyTable::from_cells(n, cells).unwrap()
    }

    #[test]
    fn idempotent() {
        let t = CayleyTable::cyclic(5);
        let c = canonical_form(&t);
        assert_eq!(canonical_form(&c), c);
    }

    #[test]
    fn relabelings_share_a_canonical_form() {
        let t = CayleyTable::cyclic(5);
        let c = canonical_form(&t);
        for sigma in [vec![0, 2, 1, 4, 3], vec![0, 4, 3, 2, 1], vec![0, 3, 1, 4, 2]] {
            let r = relabel(&t, &sigma);
            assert_eq!(r.validate(), Validation::Loop { identity: 0 });
            assert_eq!(canonical_form(&r), c);
        }
    }

    #[test]
    fn is_canonical_matches_definition() {
        let t = CayleyTable::cyclic(6);
        let c = canonical_form(&t);
        assert!(is_canonical(&c));
        let shuffled = relabel(&t, &[0, 3, 1, 5, 2, 4]);
        assert_eq!(is_canonical(&shuffled), shuffled == c);
    }
}
