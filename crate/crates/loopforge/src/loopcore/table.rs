use std::fmt;

use thiserror::Error;

use crate::permgroup::Permutation;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("cell [{row},{col}] holds {value}, out of range for order {order}")]
    CellOutOfRange {
        row: usize,
        col: usize,
        value: usize,
        order: usize,
    },
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("table must have at least one row")]
    Empty,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

/// Whether a duplicate value was found along a row or a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Line {
    Row,
    Column,
}

/// Witness for a failed latin check: `value` occurs twice in the given
/// row or column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatinViolation {
    pub line: Line,
    pub index: usize,
    pub value: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validation {
    NotLatin(LatinViolation),
    LatinNotLoop,
    Loop { identity: usize },
}

impl Validation {
    pub fn identity(&self) -> Option<usize> {
        match self {
            Validation::Loop { identity } => Some(*identity),
            _ => None,
        }
    }

    pub fn is_loop(&self) -> bool {
        matches!(self, Validation::Loop { .. })
    }

    pub fn is_latin(&self) -> bool {
        !matches!(self, Validation::NotLatin(_))
    }
}

/// An `n x n` operation table over `{0..n-1}`, row-major: `get(a, b) = a*b`.
/// Construction checks shape and cell range only; latin and loop structure
/// are checked by [`CayleyTable::validate`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CayleyTable {
    n: usize,
    cells: Vec<usize>,
}

impl CayleyTable {
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<CayleyTable, TableError> {
        let n = rows.len();
        if n == 0 {
            return Err(TableError::Empty);
        }
        let mut cells = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(TableError::RaggedRow {
                    row: i,
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, v) in row.into_iter().enumerate() {
                if v >= n {
                    return Err(TableError::CellOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                        order: n,
                    });
                }
                cells.push(v);
            }
        }
        Ok(CayleyTable { n, cells })
    }

    pub fn from_cells(n: usize, cells: Vec<usize>) -> Result<CayleyTable, TableError> {
        if n == 0 {
            return Err(TableError::Empty);
        }
        if cells.len() != n * n {
            return Err(TableError::RaggedRow {
                row: cells.len() / n,
                expected: n,
                found: cells.len() % n,
            });
        }
        for (idx, &v) in cells.iter().enumerate() {
            if v >= n {
                return Err(TableError::CellOutOfRange {
                    row: idx / n,
                    col: idx % n,
                    value: v,
                    order: n,
                });
            }
        }
        Ok(CayleyTable { n, cells })
    }

    /// The addition table of `Z_n`.
    pub fn cyclic(n: usize) -> CayleyTable {
        let cells = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i + j) % n))
            .collect();
        CayleyTable { n, cells }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> usize {
        self.cells[a * self.n + b]
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn row(&self, a: usize) -> &[usize] {
        &self.cells[a * self.n..(a + 1) * self.n]
    }

    /// Latin and loop structure check. A `NotLatin` verdict carries a
    /// duplicated (line, value) witness; a `Loop` verdict carries the
    /// identity element.
    pub fn validate(&self) -> Validation {
        let n = self.n;
        for i in 0..n {
            let mut seen = vec![false; n];
            for j in 0..n {
                let v = self.get(i, j);
                if seen[v] {
                    return Validation::NotLatin(LatinViolation {
                        line: Line::Row,
                        index: i,
                        value: v,
                    });
                }
                seen[v] = true;
            }
        }
        for j in 0..n {
            let mut seen = vec![false; n];
            for i in 0..n {
                let v = self.get(i, j);
                if seen[v] {
                    return Validation::NotLatin(LatinViolation {
                        line: Line::Column,
                        index: j,
                        value: v,
                    });
                }
                seen[v] = true;
            }
        }
        for e in 0..n {
            let row_ok = (0..n).all(|j| self.get(e, j) == j);
            if row_ok && (0..n).all(|i| self.get(i, e) == i) {
                return Validation::Loop { identity: e };
            }
        }
        Validation::LatinNotLoop
    }

    /// `L_a(b) = a*b`. The table must be latin in row `a`.
    pub fn left_action(&self, a: usize) -> Permutation {
        Permutation::from_images(self.row(a).to_vec())
            .expect("left action of a latin table row is a permutation")
    }

    /// `R_a(b) = b*a`. The table must be latin in column `a`.
    pub fn right_action(&self, a: usize) -> Permutation {
        let col: Vec<usize> = (0..self.n).map(|b| self.get(b, a)).collect();
        Permutation::from_images(col).expect("right action of a latin table column is a permutation")
    }

    /// True iff the table is symmetric.
    pub fn is_commutative(&self) -> bool {
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }

    /// Full triple enumeration; no shortcuts.
    pub fn is_associative(&self) -> bool {
        for a in 0..self.n {
            for b in 0..self.n {
                let ab = self.get(a, b);
                for c in 0..self.n {
                    if self.get(ab, c) != self.get(a, self.get(b, c)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Text format: line 1 is `n`, then `n` lines of `n` space-separated
    /// cell values.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.n.to_string());
        out.push('\n');
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    out.push(' ');
                }
                out.push_str(&self.get(i, j).to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<CayleyTable, TableError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(TableError::Parse {
            line: 1,
            column: 1,
            message: "missing order line".into(),
        })?;
        let n: usize = header.trim().parse().map_err(|_| TableError::Parse {
            line: 1,
            column: 1,
            message: format!("expected an integer order, found {header:?}"),
        })?;
        if n == 0 {
            return Err(TableError::Parse {
                line: 1,
                column: 1,
                message: "order must be positive".into(),
            });
        }
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let line_no = i + 2;
            let line = lines.next().ok_or(TableError::Parse {
                line: line_no,
                column: 1,
                message: format!("missing row {i} of {n}"),
            })?;
            let mut row = Vec::with_capacity(n);
            for (k, token) in line.split_whitespace().enumerate() {
                let v: usize = token.parse().map_err(|_| TableError::Parse {
                    line: line_no,
                    column: k + 1,
                    message: format!("expected an integer cell, found {token:?}"),
                })?;
                if v >= n {
                    return Err(TableError::Parse {
                        line: line_no,
                        column: k + 1,
                        message: format!("cell value {v} out of range for order {n}"),
                    });
                }
                row.push(v);
            }
            if row.len() != n {
                return Err(TableError::Parse {
                    line: line_no,
                    column: row.len() + 1,
                    message: format!("row has {} cells, expected {n}", row.len()),
                });
            }
            rows.push(row);
        }
        for (extra, line) in lines.enumerate() {
            if !line.trim().is_empty() {
                return Err(TableError::Parse {
                    line: n + 2 + extra,
                    column: 1,
                    message: "unexpected trailing content".into(),
                });
            }
        }
        CayleyTable::from_rows(rows)
    }
}

impl fmt::Debug for CayleyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CayleyTable(order {})", self.n)?;
        for i in 0..self.n {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}
