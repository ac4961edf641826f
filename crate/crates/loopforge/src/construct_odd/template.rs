use thiserror::Error;

use crate::loopcore::CayleyTable;
use crate::permgroup::{sequence_parity, Parity};

use super::zone::{parity_window, PartialCayleyTable, PartialTableError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TemplateError {
    #[error("order {n} must be odd and at least {min}")]
    BadOrder { n: usize, min: usize },
    #[error(
        "order {n} is too small for this template: cell [{row},{col}] = {value} \
         collides with [{other_row},{other_col}]"
    )]
    Collision {
        n: usize,
        row: usize,
        col: usize,
        value: usize,
        other_row: usize,
        other_col: usize,
    },
}

/// Symmetric placement with collision reporting that names both cells.
struct Builder {
    pt: PartialCayleyTable,
}

impl Builder {
    fn new(n: usize) -> Builder {
        Builder {
            pt: PartialCayleyTable::new(n, true),
        }
    }

    fn collision(&self, i: usize, j: usize, v: usize) -> TemplateError {
        let (other_row, other_col) = self.pt.find_in_lines(i, j, v).unwrap_or((i, j));
        TemplateError::Collision {
            n: self.pt.order(),
            row: i,
            col: j,
            value: v,
            other_row,
            other_col,
        }
    }

    fn place(&mut self, i: usize, j: usize, v: usize) -> Result<(), TemplateError> {
        match self.pt.set(i, j, v) {
            Ok(()) => Ok(()),
            Err(PartialTableError::Conflict { .. }) | Err(PartialTableError::AlreadyDefined { .. }) => {
                Err(self.collision(i, j, v))
            }
            Err(e) => unreachable!("template builder: {e}"),
        }
    }

    fn replace(&mut self, i: usize, j: usize, v: usize) -> Result<(), TemplateError> {
        self.pt
            .replace(i, j, v)
            .map_err(|_| self.collision(i, j, v))
    }
}

/// Base region shared by all odd templates: `[i,j] = i+j mod n` wherever
/// `i+j <= n-1` or `i+j >= n+6`, then the three fixed deviations in rows
/// 1, 2 and column n-1 (the last one only when the cell exists).
fn base_region(b: &mut Builder, n: usize, p: usize) -> Result<(), TemplateError> {
    for i in 0..n {
        for j in i..n {
            if i + j <= n - 1 || i + j >= n + 6 {
                b.place(i, j, (i + j) % n)?;
            }
        }
    }
    b.replace(1, 2, 0)?;
    b.replace(1, p + 2, 3)?;
    if p + 4 <= n - 1 {
        b.replace(p + 4, n - 1, 5)?;
    }
    Ok(())
}

fn central_triangle(b: &mut Builder, p: usize) -> Result<(), TemplateError> {
    let cells = [
        (p + 1, p + 1, 3),
        (p + 1, p + 2, 0),
        (p + 1, p + 3, 5),
        (p + 1, p + 4, 4),
        (p + 1, p + 5, 2),
        (p + 2, p + 2, 5),
        (p + 2, p + 3, 4),
        (p + 2, p + 4, p + 3),
        (p + 3, p + 3, 1),
    ];
    for (i, j, v) in cells {
        b.place(i, j, v)?;
    }
    Ok(())
}

/// The template for odd `n`: base region, top-right/bottom-left regions
/// (rows 1-5 of the zone), and the central triangle. Every cell with
/// `n <= i+j <= n+5` not listed here stays undefined and must later be
/// filled with a value from `{0..5}`.
pub fn build_template(n: usize) -> Result<PartialCayleyTable, TemplateError> {
    if n < 13 || n % 2 == 0 {
        return Err(TemplateError::BadOrder { n, min: 13 });
    }
    let p = (n - 1) / 2;
    let mut b = Builder::new(n);
    base_region(&mut b, n, p)?;
    let top_right = [
        (1, n - 1, p + 3),
        (2, n - 2, 1),
        (2, n - 1, 3),
        (3, n - 3, 1),
        (3, n - 2, 2),
        (3, n - 1, 0),
        (4, n - 4, 1),
        (4, n - 3, 0),
        (4, n - 2, 3),
        (4, n - 1, 2),
        (5, n - 5, 2),
        (5, n - 4, 0),
        (5, n - 3, 3),
        (5, n - 2, 4),
        (5, n - 1, 1),
    ];
    for (i, j, v) in top_right {
        b.place(i, j, v)?;
    }
    central_triangle(&mut b, p)?;
    Ok(b.pt)
}

/// The augmented template: the template plus fixed zone rows at both ends
/// of the undefined band, leaving every row and column that meets the
/// central triangle completely specified.
pub fn build_augmented_template(n: usize) -> Result<PartialCayleyTable, TemplateError> {
    if n < 43 || n % 2 == 0 {
        return Err(TemplateError::BadOrder { n, min: 43 });
    }
    let p = (n - 1) / 2;
    let mut b = Builder {
        pt: build_template(n)?,
    };
    let top = [
        (6, n - 6, 3),
        (6, n - 5, 1),
        (6, n - 4, 5),
        (6, n - 3, 2),
        (6, n - 2, 0),
        (6, n - 1, 4),
        (7, n - 7, 1),
        (7, n - 6, 2),
        (7, n - 5, 0),
        (7, n - 4, 3),
        (7, n - 3, 4),
        (7, n - 2, 5),
        (8, n - 4, 4),
        (8, n - 3, 5),
        (9, n - 4, 2),
    ];
    for (i, j, v) in top {
        b.place(i, j, v)?;
    }
    let above_triangle = [
        (p, p + 1, 1),
        (p, p + 2, 2),
        (p, p + 3, 0),
        (p, p + 4, 3),
        (p, p + 5, 4),
        (p, p + 6, 5),
        (p - 1, p + 2, 1),
        (p - 1, p + 3, 2),
        (p - 1, p + 4, 0),
        (p - 1, p + 5, 3),
        (p - 1, p + 6, 4),
        (p - 1, p + 7, 5),
        (p - 2, p + 3, 3),
        (p - 2, p + 4, 1),
        (p - 2, p + 5, 5),
        (p - 3, p + 4, 2),
        (p - 3, p + 5, 0),
        (p - 4, p + 5, 1),
    ];
    for (i, j, v) in above_triangle {
        b.place(i, j, v)?;
    }
    Ok(b.pt)
}

/// The simplified template for intermediate odd orders: the base region
/// plus the three zone cells forced by rows 1-2 and the parity of `L_2`.
/// Everything with `i, j >= 3` in the band stays undefined; the central
/// triangle can optionally be pinned to its template values.
pub fn build_simplified_template(
    n: usize,
    pin_triangle: bool,
) -> Result<PartialCayleyTable, TemplateError> {
    if n < 7 || n % 2 == 0 {
        return Err(TemplateError::BadOrder { n, min: 7 });
    }
    let p = (n - 1) / 2;
    let mut b = Builder::new(n);
    base_region(&mut b, n, p)?;
    b.place(1, n - 1, p + 3)?;
    b.place(2, n - 2, 1)?;
    b.place(2, n - 1, 3)?;
    if pin_triangle {
        central_triangle(&mut b, p)?;
    }
    Ok(b.pt)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RowParityError {
    #[error("row {i} is outside the applicable range for order {n}")]
    NotApplicable { i: usize, n: usize },
    #[error("row {i} segment is not a permutation of 0..=5; table is not template-shaped")]
    NotTemplateShaped { i: usize },
}

/// Parity of the six-cell segment `[i, n-i ..= n-i+5]` as a permutation of
/// `{0..5}`. For a template-shaped loop this equals the parity of `L_i`
/// whenever `i` is in `{6..n-2}` minus `{p+2, p+4}`.
pub fn zone_row_parity(t: &CayleyTable, i: usize) -> Result<Parity, RowParityError> {
    let n = t.order();
    if n < 13 || n % 2 == 0 {
        return Err(RowParityError::NotApplicable { i, n });
    }
    let p = (n - 1) / 2;
    if i < 6 || i > n - 2 || i == p + 2 || i == p + 4 {
        return Err(RowParityError::NotApplicable { i, n });
    }
    let values: Vec<usize> = parity_window(n, i).map(|c| t.get(i, c)).collect();
    let mut sorted = values.clone();
    sorted.sort_unstable();
    if sorted != [0, 1, 2, 3, 4, 5] {
        return Err(RowParityError::NotTemplateShaped { i });
    }
    Ok(sequence_parity(&values))
}

/// Whether the parity of `L_i` is decided by its window segment: all cells
/// of row `i` outside the window must follow the base rule `i+j mod n`.
/// This automatically excludes the rows the template overrides.
pub(crate) fn lemma_row_applicable(pt: &PartialCayleyTable, i: usize) -> bool {
    let n = pt.order();
    if i < 1 || i > n - 2 {
        return false;
    }
    let window = parity_window(n, i);
    for j in 0..n {
        if window.contains(&j) {
            continue;
        }
        if pt.get(i, j) != Some((i + j) % n) {
            return false;
        }
    }
    true
}
