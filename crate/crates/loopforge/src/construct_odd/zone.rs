use std::collections::BTreeMap;
use std::ops::{ControlFlow, RangeInclusive};

use thiserror::Error;

use crate::loopcore::CayleyTable;
use crate::permgroup::{sequence_parity, Parity};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartialTableError {
    #[error("cell [{row},{col}] is already defined")]
    AlreadyDefined { row: usize, col: usize },
    #[error("value {value} at [{row},{col}] duplicates an entry in its row or column")]
    Conflict { row: usize, col: usize, value: usize },
    #[error("value {value} out of range for order {order}")]
    OutOfRange { value: usize, order: usize },
    #[error("table still has undefined cells")]
    Incomplete,
}

/// A partially defined Cayley table. In symmetric mode every write to
/// `[i,j]` also writes `[j,i]`, and defined cells never violate a latin
/// constraint (duplicates are rejected at write time).
#[derive(Clone)]
pub struct PartialCayleyTable {
    n: usize,
    symmetric: bool,
    cells: Vec<Option<usize>>,
    row_mask: Vec<u128>,
    col_mask: Vec<u128>,
}

impl PartialCayleyTable {
    pub fn new(n: usize, symmetric: bool) -> PartialCayleyTable {
        assert!(n >= 1 && n <= 128, "order out of supported range");
        PartialCayleyTable {
            n,
            symmetric,
            cells: vec![None; n * n],
            row_mask: vec![0; n],
            col_mask: vec![0; n],
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn get(&self, i: usize, j: usize) -> Option<usize> {
        self.cells[i * self.n + j]
    }

    fn set_one(&mut self, i: usize, j: usize, v: usize) -> Result<(), PartialTableError> {
        if v >= self.n {
            return Err(PartialTableError::OutOfRange {
                value: v,
                order: self.n,
            });
        }
        if self.cells[i * self.n + j].is_some() {
            return Err(PartialTableError::AlreadyDefined { row: i, col: j });
        }
        if (self.row_mask[i] | self.col_mask[j]) >> v & 1 == 1 {
            return Err(PartialTableError::Conflict {
                row: i,
                col: j,
                value: v,
            });
        }
        self.cells[i * self.n + j] = Some(v);
        self.row_mask[i] |= 1 << v;
        self.col_mask[j] |= 1 << v;
        Ok(())
    }

    fn clear_one(&mut self, i: usize, j: usize) {
        if let Some(v) = self.cells[i * self.n + j].take() {
            self.row_mask[i] &= !(1 << v);
            self.col_mask[j] &= !(1 << v);
        }
    }

    /// Defines `[i,j]` (and `[j,i]` in symmetric mode), failing on any
    /// latin conflict among defined cells.
    pub fn set(&mut self, i: usize, j: usize, v: usize) -> Result<(), PartialTableError> {
        self.set_one(i, j, v)?;
        if self.symmetric && i != j {
            if let Err(e) = self.set_one(j, i, v) {
                self.clear_one(i, j);
                return Err(e);
            }
        }
        Ok(())
    }

    /// Clears `[i,j]` (and its mirror in symmetric mode).
    pub fn clear(&mut self, i: usize, j: usize) {
        self.clear_one(i, j);
        if self.symmetric && i != j {
            self.clear_one(j, i);
        }
    }

    /// Redefines an already-defined cell, conflict-checked.
    pub fn replace(&mut self, i: usize, j: usize, v: usize) -> Result<(), PartialTableError> {
        let old = self.get(i, j);
        self.clear(i, j);
        match self.set(i, j, v) {
            Ok(()) => Ok(()),
            Err(e) => {
                if let Some(old) = old {
                    self.set(i, j, old).expect("restoring previous value");
                }
                Err(e)
            }
        }
    }

    /// Defines the cell, or verifies the existing value matches.
    pub fn set_or_verify(&mut self, i: usize, j: usize, v: usize) -> Result<(), PartialTableError> {
        match self.get(i, j) {
            Some(existing) if existing == v => Ok(()),
            Some(_) => Err(PartialTableError::Conflict {
                row: i,
                col: j,
                value: v,
            }),
            None => self.set(i, j, v),
        }
    }

    /// Searches the row and column of `[i,j]` for the cell currently
    /// holding `v`, for conflict reporting.
    pub fn find_in_lines(&self, i: usize, j: usize, v: usize) -> Option<(usize, usize)> {
        for c in 0..self.n {
            if self.get(i, c) == Some(v) {
                return Some((i, c));
            }
        }
        for r in 0..self.n {
            if self.get(r, j) == Some(v) {
                return Some((r, j));
            }
        }
        None
    }

    /// Bitmask of values admissible at `[i,j]` under the latin constraints
    /// (both mirror lines in symmetric mode).
    pub fn candidates(&self, i: usize, j: usize) -> u128 {
        let full: u128 = if self.n == 128 {
            u128::MAX
        } else {
            (1u128 << self.n) - 1
        };
        let mut used = self.row_mask[i] | self.col_mask[j];
        if self.symmetric {
            used |= self.row_mask[j] | self.col_mask[i];
        }
        !used & full
    }

    /// Undefined positions in row-major order; in symmetric mode only the
    /// upper half (`i <= j`) is listed.
    pub fn undefined_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            let j0 = if self.symmetric { i } else { 0 };
            for j in j0..self.n {
                if self.get(i, j).is_none() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(|c| c.is_some())
    }

    pub fn to_table(&self) -> Result<CayleyTable, PartialTableError> {
        let cells: Option<Vec<usize>> = self.cells.iter().copied().collect();
        let cells = cells.ok_or(PartialTableError::Incomplete)?;
        Ok(CayleyTable::from_cells(self.n, cells).expect("cells range-checked on write"))
    }
}

impl std::fmt::Debug for PartialCayleyTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "PartialCayleyTable(order {}, symmetric {})", self.n, self.symmetric)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| match self.get(i, j) {
                    Some(v) => v.to_string(),
                    None => "?".to_string(),
                })
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

/// The columns whose entries decide the parity of `L_i` for a
/// template-shaped row: `n-i ..= min(n-i+5, n-1)`.
pub fn parity_window(n: usize, i: usize) -> RangeInclusive<usize> {
    debug_assert!(i >= 1 && i < n);
    (n - i)..=(n - i + 5).min(n - 1)
}

/// Constraints handed to the zone solver.
#[derive(Debug, Clone, Default)]
pub struct ZoneConstraints {
    /// Require `[i,j] != 0` whenever `i + j = n` (the unbreakability
    /// condition for template loops).
    pub forbid_zero_on_antidiagonal: bool,
    /// Required parity of the window segment of each listed row.
    pub row_parity_targets: BTreeMap<usize, Parity>,
}

#[derive(Debug)]
pub enum Completion {
    Table(CayleyTable),
    Unsatisfiable,
}

struct Solver<'a> {
    pt: PartialCayleyTable,
    constraints: &'a ZoneConstraints,
    cells: Vec<(usize, usize)>,
    /// Remaining undefined cells in each targeted row's window.
    window_remaining: BTreeMap<usize, usize>,
}

impl<'a> Solver<'a> {
    fn new(
        pt: &PartialCayleyTable,
        constraints: &'a ZoneConstraints,
        rows: Option<RangeInclusive<usize>>,
    ) -> Option<Solver<'a>> {
        let mut cells = pt.undefined_cells();
        if let Some(range) = rows {
            cells.retain(|(i, _)| range.contains(i));
        }
        let mut window_remaining = BTreeMap::new();
        for (&row, &target) in &constraints.row_parity_targets {
            let window = parity_window(pt.order(), row);
            let remaining = window.clone().filter(|&c| pt.get(row, c).is_none()).count();
            if remaining == 0 {
                // Window already fully defined: check now.
                let values: Vec<usize> = window.map(|c| pt.get(row, c).unwrap()).collect();
                if sequence_parity(&values) != target {
                    return None;
                }
            } else {
                window_remaining.insert(row, remaining);
            }
        }
        Some(Solver {
            pt: pt.clone(),
            constraints,
            cells,
            window_remaining,
        })
    }

    fn window_ok(&self, row: usize) -> bool {
        let target = self.constraints.row_parity_targets[&row];
        let values: Vec<usize> = parity_window(self.pt.order(), row)
            .map(|c| self.pt.get(row, c).expect("window complete"))
            .collect();
        sequence_parity(&values) == target
    }

    /// Decrements window counters touched by defining `[i,j]` (and its
    /// mirror). Returns the rows whose windows just completed, or None if a
    /// completed window violates its parity target.
    fn note_assign(&mut self, i: usize, j: usize) -> Option<Vec<usize>> {
        let n = self.pt.order();
        let mut completed = Vec::new();
        let mut affected = vec![(i, j)];
        if self.pt.is_symmetric() && i != j {
            affected.push((j, i));
        }
        for (r, c) in affected {
            if r >= 1 && r < n && parity_window(n, r).contains(&c) {
                if let Some(rem) = self.window_remaining.get_mut(&r) {
                    *rem -= 1;
                    if *rem == 0 {
                        completed.push(r);
                    }
                }
            }
        }
        for &r in &completed {
            if !self.window_ok(r) {
                self.undo_note(i, j);
                return None;
            }
        }
        Some(completed)
    }

    fn undo_note(&mut self, i: usize, j: usize) {
        let n = self.pt.order();
        let mut affected = vec![(i, j)];
        if self.pt.is_symmetric() && i != j {
            affected.push((j, i));
        }
        for (r, c) in affected {
            if r >= 1 && r < n && parity_window(n, r).contains(&c) {
                if let Some(rem) = self.window_remaining.get_mut(&r) {
                    *rem += 1;
                }
            }
        }
    }

    fn candidates(&self, i: usize, j: usize) -> u128 {
        let mut mask = self.pt.candidates(i, j);
        if self.constraints.forbid_zero_on_antidiagonal && i + j == self.pt.order() {
            mask &= !1;
        }
        mask
    }

    /// Every undefined cell sharing a line with `i` or `j` must still have
    /// a candidate.
    fn forward_ok(&self, from: usize, i: usize, j: usize) -> bool {
        for &(a, b) in &self.cells[from..] {
            if a == i || a == j || b == i || b == j {
                if self.candidates(a, b) == 0 {
                    return false;
                }
            }
        }
        true
    }

    fn search<F>(&mut self, idx: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&PartialCayleyTable) -> ControlFlow<()>,
    {
        if idx == self.cells.len() {
            return visit(&self.pt);
        }
        let (i, j) = self.cells[idx];
        let mask = self.candidates(i, j);
        let mut v = mask;
        while v != 0 {
            let value = v.trailing_zeros() as usize;
            v &= v - 1;
            if self.pt.set(i, j, value).is_err() {
                continue;
            }
            match self.note_assign(i, j) {
                None => {
                    self.pt.clear(i, j);
                    continue;
                }
                Some(_) => {}
            }
            if self.forward_ok(idx + 1, i, j) {
                let flow = self.search(idx + 1, visit);
                if flow.is_break() {
                    self.undo_note(i, j);
                    self.pt.clear(i, j);
                    return ControlFlow::Break(());
                }
            }
            self.undo_note(i, j);
            self.pt.clear(i, j);
        }
        ControlFlow::Continue(())
    }
}

/// Depth-first completion of the undefined cells in row-major order,
/// values tried ascending; deterministic. Streams every solution to
/// `visit` until it breaks.
pub fn for_each_completion<F>(pt: &PartialCayleyTable, constraints: &ZoneConstraints, mut visit: F)
where
    F: FnMut(&CayleyTable) -> ControlFlow<()>,
{
    solve_rows(pt, constraints, None, |solved| {
        let table = solved.to_table().expect("full solve completes the table");
        visit(&table)
    });
}

/// First completion in deterministic search order, or `Unsatisfiable`.
pub fn complete_zone(pt: &PartialCayleyTable, constraints: &ZoneConstraints) -> Completion {
    let mut found = None;
    for_each_completion(pt, constraints, |t| {
        found = Some(t.clone());
        ControlFlow::Break(())
    });
    match found {
        Some(t) => Completion::Table(t),
        None => Completion::Unsatisfiable,
    }
}

/// Solver restricted to the undefined cells whose row lies in `rows`
/// (all cells when `rows` is None). Solutions are handed over as partial
/// tables since a restricted solve need not complete the whole table.
pub(crate) fn solve_rows<F>(
    pt: &PartialCayleyTable,
    constraints: &ZoneConstraints,
    rows: Option<RangeInclusive<usize>>,
    mut visit: F,
) where
    F: FnMut(&PartialCayleyTable) -> ControlFlow<()>,
{
    let Some(mut solver) = Solver::new(pt, constraints, rows) else {
        return;
    };
    let _ = solver.search(0, &mut visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loopcore::Validation;

    #[test]
    fn set_rejects_conflicts_and_mirrors_writes() {
        let mut pt = PartialCayleyTable::new(5, true);
        pt.set(1, 2, 4).unwrap();
        assert_eq!(pt.get(2, 1), Some(4));
        assert_eq!(
            pt.set(1, 3, 4),
            Err(PartialTableError::Conflict {
                row: 1,
                col: 3,
                value: 4
            })
        );
        // Column 1 already holds 4 via the mirror.
        assert_eq!(
            pt.set(3, 1, 4),
            Err(PartialTableError::Conflict {
                row: 3,
                col: 1,
                value: 4
            })
        );
        pt.clear(1, 2);
        assert_eq!(pt.get(2, 1), None);
        pt.set(3, 1, 4).unwrap();
    }

    #[test]
    fn complete_a_small_symmetric_square() {
        // Fix row 0 and column 0 to the identity and let the solver fill
        // the rest of a symmetric latin square of order 5.
        let mut pt = PartialCayleyTable::new(5, true);
        for j in 0..5 {
            if j == 0 {
                pt.set(0, 0, 0).unwrap();
            } else {
                pt.set(0, j, j).unwrap();
            }
        }
        match complete_zone(&pt, &ZoneConstraints::default()) {
            Completion::Table(t) => {
                assert_eq!(t.validate(), Validation::Loop { identity: 0 });
                assert!(t.is_commutative());
            }
            Completion::Unsatisfiable => panic!("order-5 symmetric completion exists"),
        }
    }

    #[test]
    fn overconstrained_cell_is_unsatisfiable() {
        // [0,1] would need a value outside both its row and column, but
        // 0 and 1 are both taken.
        let mut pt = PartialCayleyTable::new(2, false);
        pt.set(0, 0, 0).unwrap();
        pt.set(1, 1, 1).unwrap();
        match complete_zone(&pt, &ZoneConstraints::default()) {
            Completion::Unsatisfiable => {}
            Completion::Table(t) => panic!("expected unsat, got\n{t:?}"),
        }
    }

    #[test]
    fn parity_targets_filter_solutions() {
        // Order 7 symmetric with identity row/column; ask for an odd window
        // on row 1 -- window(7, 1) = {6}, a single cell, whose "segment"
        // has even parity always; the target Odd must then be unsat.
        let mut pt = PartialCayleyTable::new(7, true);
        pt.set(0, 0, 0).unwrap();
        for j in 1..7 {
            pt.set(0, j, j).unwrap();
        }
        let mut c = ZoneConstraints::default();
        c.row_parity_targets.insert(1, Parity::Odd);
        match complete_zone(&pt, &c) {
            Completion::Unsatisfiable => {}
            Completion::Table(_) => panic!("single-cell window can never be odd"),
        }
        // And Even is satisfiable.
        let mut c = ZoneConstraints::default();
        c.row_parity_targets.insert(1, Parity::Even);
        assert!(matches!(complete_zone(&pt, &c), Completion::Table(_)));
    }

    #[test]
    fn solutions_stream_deterministically() {
        let mut pt = PartialCayleyTable::new(4, false);
        for j in 0..4 {
            pt.set(0, j, j).unwrap();
            if j > 0 {
                pt.set(j, 0, j).unwrap();
            }
        }
        let mut first_run = Vec::new();
        for_each_completion(&pt, &ZoneConstraints::default(), |t| {
            first_run.push(t.clone());
            ControlFlow::Continue(())
        });
        let mut second_run = Vec::new();
        for_each_completion(&pt, &ZoneConstraints::default(), |t| {
            second_run.push(t.clone());
            ControlFlow::Continue(())
        });
        assert!(!first_run.is_empty());
        assert_eq!(first_run, second_run);
        // Reduced latin squares of order 4.
        assert_eq!(first_run.len(), 4);
    }
}
