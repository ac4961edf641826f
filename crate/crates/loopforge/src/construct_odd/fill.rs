use std::collections::BTreeMap;
use std::fs;
use std::ops::ControlFlow;
use std::path::PathBuf;
use std::sync::OnceLock;

use crate::loopcore::{is_unbreakable, multiplication_group, CayleyTable, GroupClass, Validation};
use crate::permgroup::Parity;

use super::template::{
    build_augmented_template, build_simplified_template, build_template, lemma_row_applicable,
};
use super::zone::{
    complete_zone, for_each_completion, parity_window, solve_rows, Completion, PartialCayleyTable,
    ZoneConstraints,
};
use super::{ConstructError, TargetGroup};

/// The four-row repeating pattern that fills the zone upwards from row p;
/// row `p - s` (mod 4 alignment) takes `REPEATING_PATTERN[s mod 4]` on its
/// window columns.
const REPEATING_PATTERN: [[usize; 6]; 4] = [
    [1, 2, 0, 3, 4, 5],
    [1, 2, 0, 5, 3, 4],
    [3, 2, 0, 4, 1, 5],
    [1, 3, 0, 5, 4, 2],
];

/// Zone content of the two full rows at a block junction.
const JUNCTION_ROW: [usize; 6] = [1, 2, 0, 3, 4, 5];
/// Low-antidiagonal cells pinned above a junction (rows J-1, J-2, J-3);
/// together with the junction rows they make every antidiagonal the
/// responsibility of exactly one block.
const PIN_ROWS: [&[usize]; 3] = [&[3, 1, 5], &[2, 0], &[1]];

/// Body rows per reusable block; junctions repeat every `BLOCK_SPAN` rows.
const BLOCK_HEIGHT: usize = 4;
const BLOCK_SPAN: usize = BLOCK_HEIGHT + 2;
/// Topmost row a junction may occupy without clashing with the fixed
/// template rows 8 and 9.
const MIN_TOP_JUNCTION: usize = 12;
/// Order at which the reusable block is derived; its zone coordinates are
/// order-independent.
const BLOCK_REF_ORDER: usize = 43;

fn w_col(n: usize, r: usize, d: usize) -> usize {
    n - r + d
}

/// Even-parity targets for every row whose action parity is decided by its
/// window segment.
fn even_targets(pt: &PartialCayleyTable) -> BTreeMap<usize, Parity> {
    let n = pt.order();
    (1..n - 1)
        .filter(|&i| lemma_row_applicable(pt, i))
        .map(|i| (i, Parity::Even))
        .collect()
}

/// Full verification of a constructed odd-order loop against its target.
fn verify_odd(t: &CayleyTable, want: &GroupClass) -> bool {
    if t.validate() != (Validation::Loop { identity: 0 }) || !t.is_commutative() {
        return false;
    }
    if !is_unbreakable(t) {
        return false;
    }
    if want == &GroupClass::Alternating {
        let all_even = (0..t.order()).all(|a| t.left_action(a).parity() == Parity::Even);
        if !all_even {
            return false;
        }
    }
    &multiplication_group(t).classify() == want
}

/// Commutative unbreakable loop of odd order `n >= 21` with symmetric
/// multiplication group: tile the repeating pattern upward from row p, then
/// complete the residual rows next to the top-right region by search, with
/// the row-6 segment forced odd.
pub fn fill_symmetric(n: usize) -> Result<CayleyTable, ConstructError> {
    if n < 21 || n % 2 == 0 {
        return Err(ConstructError::Infeasible {
            n,
            target: TargetGroup::Symmetric.to_string(),
            reason: "the template route needs odd n >= 21".into(),
        });
    }
    let template = build_template(n)?;
    if let Some(t) = load_cached(CacheKind::Sym, n, &template, &GroupClass::Symmetric) {
        return Ok(t);
    }
    let p = (n - 1) / 2;
    let mut cutoffs = Vec::new();
    let mut c = 14;
    while c <= p {
        cutoffs.push(c);
        c += 4;
    }
    cutoffs.push(p + 1); // no tiling at all
    for cutoff in cutoffs {
        let mut pt = template.clone();
        if cutoff <= p && tile_pattern(&mut pt, cutoff).is_err() {
            continue;
        }
        let mut constraints = ZoneConstraints {
            forbid_zero_on_antidiagonal: true,
            ..Default::default()
        };
        constraints.row_parity_targets.insert(6, Parity::Odd);
        if let Completion::Table(t) = complete_zone(&pt, &constraints) {
            if verify_odd(&t, &GroupClass::Symmetric) {
                store_cached(CacheKind::Sym, n, &template, &t);
                return Ok(t);
            }
        }
    }
    Err(ConstructError::SearchFailed {
        n,
        detail: "symmetric zone completion not found".into(),
    })
}

/// Writes the repeating pattern on rows `cutoff..=p`.
fn tile_pattern(pt: &mut PartialCayleyTable, cutoff: usize) -> Result<(), ConstructError> {
    let n = pt.order();
    let p = (n - 1) / 2;
    for i in cutoff..=p {
        let pattern = REPEATING_PATTERN[(p - i) % 4];
        for (d, &v) in pattern.iter().enumerate() {
            pt.set(i, w_col(n, i, d), v)
                .map_err(|e| ConstructError::SearchFailed {
                    n,
                    detail: format!("tiling conflict at row {i}: {e}"),
                })?;
        }
    }
    Ok(())
}

/// Commutative unbreakable loop of odd order `n >= 43` with alternating
/// multiplication group: every applicable row segment is constrained even.
/// The band is split by junctions every `BLOCK_SPAN` rows; the reusable
/// block fills the slots between junctions and a searched cap joins the
/// topmost junction to the fixed rows 6-9. Fewer junctions (down to a
/// whole-band search) are tried if a configuration fails.
pub fn fill_alternating(n: usize) -> Result<CayleyTable, ConstructError> {
    if n < 43 || n % 2 == 0 {
        return Err(ConstructError::Infeasible {
            n,
            target: TargetGroup::Alternating.to_string(),
            reason: "the augmented-template route needs odd n >= 43".into(),
        });
    }
    let aug = build_augmented_template(n)?;
    if let Some(t) = load_cached(CacheKind::Alt, n, &aug, &GroupClass::Alternating) {
        return Ok(t);
    }
    let p = (n - 1) / 2;
    let k_max = if p >= MIN_TOP_JUNCTION + 1 + BLOCK_SPAN {
        (p - 1 - MIN_TOP_JUNCTION) / BLOCK_SPAN
    } else {
        0
    };
    for k in (0..=k_max).rev() {
        let mut pt = aug.clone();
        let t0 = p - 1 - k * BLOCK_SPAN;
        if place_junction_scaffold(&mut pt, t0, k).is_err() {
            continue;
        }
        if k > 0 {
            let Some(block) = block_rows() else {
                continue;
            };
            if write_blocks(&mut pt, t0, k, block).is_err() {
                continue;
            }
        }
        let constraints = ZoneConstraints {
            forbid_zero_on_antidiagonal: true,
            row_parity_targets: even_targets(&pt),
        };
        if let Completion::Table(t) = complete_zone(&pt, &constraints) {
            if verify_odd(&t, &GroupClass::Alternating) {
                store_cached(CacheKind::Alt, n, &aug, &t);
                return Ok(t);
            }
        }
    }
    Err(ConstructError::SearchFailed {
        n,
        detail: "alternating zone completion not found".into(),
    })
}

/// Junction rows at `t0 + span*i` for each block, plus the pin triangle
/// above the topmost junction (the pins of lower junctions lie inside
/// block bodies and arrive with the block content).
fn place_junction_scaffold(
    pt: &mut PartialCayleyTable,
    t0: usize,
    blocks: usize,
) -> Result<(), super::zone::PartialTableError> {
    let n = pt.order();
    for b in 0..blocks {
        let t = t0 + b * BLOCK_SPAN;
        for r in [t, t + 1] {
            for (d, &v) in JUNCTION_ROW.iter().enumerate() {
                pt.set_or_verify(r, w_col(n, r, d), v)?;
            }
        }
    }
    if blocks > 0 {
        for (k, vals) in PIN_ROWS.iter().enumerate() {
            let r = t0 - 1 - k;
            for (d, &v) in vals.iter().enumerate() {
                pt.set_or_verify(r, w_col(n, r, d), v)?;
            }
        }
    }
    Ok(())
}

fn write_blocks(
    pt: &mut PartialCayleyTable,
    t0: usize,
    blocks: usize,
    block: &[[usize; 6]],
) -> Result<(), super::zone::PartialTableError> {
    let n = pt.order();
    for b in 0..blocks {
        let base = t0 + b * BLOCK_SPAN + 2;
        for (ri, vals) in block.iter().enumerate() {
            let r = base + ri;
            for (d, &v) in vals.iter().enumerate() {
                pt.set_or_verify(r, w_col(n, r, d), v)?;
            }
        }
    }
    Ok(())
}

/// The reusable block: derived once per process (or loaded from the cache
/// directory) by solving the first block slot at the reference order with
/// both boundaries pinned to the junction interface.
fn block_rows() -> Option<&'static Vec<[usize; 6]>> {
    static BLOCK: OnceLock<Option<Vec<[usize; 6]>>> = OnceLock::new();
    BLOCK
        .get_or_init(|| {
            if let Some(block) = load_block_fragment() {
                return Some(block);
            }
            let block = derive_block()?;
            store_block_fragment(&block);
            Some(block)
        })
        .as_ref()
}

fn block_slot_rows() -> (usize, usize) {
    let p = (BLOCK_REF_ORDER - 1) / 2;
    let t0 = p - 1 - BLOCK_SPAN;
    (t0 + 2, t0 + 1 + BLOCK_SPAN - 1)
}

fn derive_block() -> Option<Vec<[usize; 6]>> {
    let n = BLOCK_REF_ORDER;
    let p = (n - 1) / 2;
    let t0 = p - 1 - BLOCK_SPAN;
    let mut pt = build_augmented_template(n).ok()?;
    place_junction_scaffold(&mut pt, t0, 1).ok()?;
    let constraints = ZoneConstraints {
        forbid_zero_on_antidiagonal: true,
        row_parity_targets: even_targets(&pt),
    };
    let (lo, hi) = block_slot_rows();
    let mut solved: Option<Vec<[usize; 6]>> = None;
    solve_rows(&pt, &constraints, Some(lo..=hi), |state| {
        let mut rows = Vec::with_capacity(BLOCK_HEIGHT);
        for r in lo..=hi {
            let mut vals = [0usize; 6];
            for (d, slot) in vals.iter_mut().enumerate() {
                *slot = state.get(r, w_col(n, r, d)).expect("block row solved");
            }
            rows.push(vals);
        }
        solved = Some(rows);
        ControlFlow::Break(())
    });
    solved
}

// ---------------------------------------------------------------------
// Derived-pattern cache: zone fragments under $LOOPFORGE_CACHE.

#[derive(Clone, Copy)]
enum CacheKind {
    Sym,
    Alt,
    AltIntermediate,
    SymIntermediate,
}

impl CacheKind {
    fn tag(self) -> &'static str {
        match self {
            CacheKind::Sym => "sym",
            CacheKind::Alt => "alt",
            CacheKind::AltIntermediate => "alt-mid",
            CacheKind::SymIntermediate => "sym-mid",
        }
    }
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os("LOOPFORGE_CACHE").map(PathBuf::from)
}

/// A cached zone fill: for each listed row, the values of its parity
/// window, leftmost column first.
pub(crate) struct ZoneFragment {
    pub n: usize,
    pub rows: BTreeMap<usize, Vec<usize>>,
}

impl ZoneFragment {
    pub(crate) fn from_table(n: usize, rows: impl Iterator<Item = usize>, t: &CayleyTable) -> ZoneFragment {
        let mut map = BTreeMap::new();
        for r in rows {
            let vals: Vec<usize> = parity_window(n, r).map(|c| t.get(r, c)).collect();
            map.insert(r, vals);
        }
        ZoneFragment { n, rows: map }
    }

    pub(crate) fn to_text(&self) -> String {
        let lo = self.rows.keys().next().copied().unwrap_or(0);
        let hi = self.rows.keys().next_back().copied().unwrap_or(0);
        let mut out = format!("zone-fragment n={} rows={}..{}\n", self.n, lo, hi);
        for (r, vals) in &self.rows {
            out.push_str(&r.to_string());
            for v in vals {
                out.push(' ');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub(crate) fn from_text(text: &str) -> Option<ZoneFragment> {
        let mut lines = text.lines();
        let header = lines.next()?;
        let rest = header.strip_prefix("zone-fragment n=")?;
        let (n_str, _) = rest.split_once(" rows=")?;
        let n: usize = n_str.parse().ok()?;
        let mut rows = BTreeMap::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let r: usize = it.next()?.parse().ok()?;
            let vals: Vec<usize> = it.map(|v| v.parse().ok()).collect::<Option<_>>()?;
            rows.insert(r, vals);
        }
        Some(ZoneFragment { n, rows })
    }

    /// Plays the fragment onto a template; every value must either fill an
    /// undefined cell or match the existing one.
    pub(crate) fn apply(&self, pt: &mut PartialCayleyTable) -> bool {
        if pt.order() != self.n {
            return false;
        }
        for (&r, vals) in &self.rows {
            let window = parity_window(self.n, r);
            if window.clone().count() != vals.len() {
                return false;
            }
            for (c, &v) in window.zip(vals.iter()) {
                if pt.set_or_verify(r, c, v).is_err() {
                    return false;
                }
            }
        }
        true
    }
}

fn fragment_path(kind: CacheKind, n: usize) -> Option<PathBuf> {
    cache_dir().map(|d| d.join(format!("odd-{}-{n}.zf", kind.tag())))
}

/// Rows that still have undefined cells in the template (upper half).
fn open_rows(pt: &PartialCayleyTable) -> Vec<usize> {
    let mut rows: Vec<usize> = pt.undefined_cells().iter().map(|&(i, _)| i).collect();
    rows.dedup();
    rows
}

fn load_cached(
    kind: CacheKind,
    n: usize,
    template: &PartialCayleyTable,
    want: &GroupClass,
) -> Option<CayleyTable> {
    let path = fragment_path(kind, n)?;
    let text = fs::read_to_string(path).ok()?;
    let fragment = ZoneFragment::from_text(&text)?;
    let mut pt = template.clone();
    if !fragment.apply(&mut pt) || !pt.is_complete() {
        return None;
    }
    let t = pt.to_table().ok()?;
    // A stale or corrupted fragment is simply ignored; verification is the
    // gate, not the file.
    verify_odd(&t, want).then_some(t)
}

fn store_cached(kind: CacheKind, n: usize, template: &PartialCayleyTable, t: &CayleyTable) {
    let Some(path) = fragment_path(kind, n) else {
        return;
    };
    if let Some(dir) = path.parent() {
        if fs::create_dir_all(dir).is_err() {
            return;
        }
    }
    let fragment = ZoneFragment::from_table(n, open_rows(template).into_iter(), t);
    let _ = fs::write(path, fragment.to_text());
}

fn block_fragment_path() -> Option<PathBuf> {
    cache_dir().map(|d| d.join(format!("block-h{BLOCK_HEIGHT}.zf")))
}

fn load_block_fragment() -> Option<Vec<[usize; 6]>> {
    let path = block_fragment_path()?;
    let text = fs::read_to_string(path).ok()?;
    let fragment = ZoneFragment::from_text(&text)?;
    if fragment.n != BLOCK_REF_ORDER {
        return None;
    }
    let (lo, hi) = block_slot_rows();
    let mut rows = Vec::with_capacity(BLOCK_HEIGHT);
    for r in lo..=hi {
        let vals = fragment.rows.get(&r)?;
        if vals.len() != 6 {
            return None;
        }
        let mut arr = [0usize; 6];
        arr.copy_from_slice(vals);
        rows.push(arr);
    }
    // Validate against a scaffolded reference template before trusting it.
    let mut pt = build_augmented_template(BLOCK_REF_ORDER).ok()?;
    place_junction_scaffold(&mut pt, (BLOCK_REF_ORDER - 1) / 2 - 1 - BLOCK_SPAN, 1).ok()?;
    write_blocks(&mut pt, (BLOCK_REF_ORDER - 1) / 2 - 1 - BLOCK_SPAN, 1, &rows).ok()?;
    Some(rows)
}

fn store_block_fragment(block: &[[usize; 6]]) {
    let Some(path) = block_fragment_path() else {
        return;
    };
    if let Some(dir) = path.parent() {
        if fs::create_dir_all(dir).is_err() {
            return;
        }
    }
    let (lo, _) = block_slot_rows();
    let mut rows = BTreeMap::new();
    for (i, vals) in block.iter().enumerate() {
        rows.insert(lo + i, vals.to_vec());
    }
    let fragment = ZoneFragment {
        n: BLOCK_REF_ORDER,
        rows,
    };
    let _ = fs::write(path, fragment.to_text());
}

// ---------------------------------------------------------------------
// Intermediate odd orders: simplified template plus filtered search.

/// Routes odd orders outside the two main template regimes: the simplified
/// template is completed under parity constraints and candidates are
/// verified until one matches the target; a direct search over commutative
/// reduced squares is the fallback when the template itself is infeasible
/// (n = 7) or exhausted.
pub(crate) fn fill_intermediate(n: usize, target: TargetGroup) -> Result<CayleyTable, ConstructError> {
    let want = target.group_class();
    let kind = match target {
        TargetGroup::Symmetric => CacheKind::SymIntermediate,
        TargetGroup::Alternating => CacheKind::AltIntermediate,
    };
    if let Ok(template) = build_simplified_template(n, n >= 25) {
        if let Some(t) = load_cached(kind, n, &template, &want) {
            return Ok(t);
        }
        let mut constraints = ZoneConstraints {
            forbid_zero_on_antidiagonal: true,
            ..Default::default()
        };
        match target {
            TargetGroup::Alternating => {
                constraints.row_parity_targets = even_targets(&template);
            }
            TargetGroup::Symmetric => {
                if lemma_row_applicable(&template, 6) {
                    constraints.row_parity_targets.insert(6, Parity::Odd);
                }
            }
        }
        let mut found = None;
        for_each_completion(&template, &constraints, |t| {
            if verify_odd(t, &want) {
                found = Some(t.clone());
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        if let Some(t) = found {
            store_cached(kind, n, &template, &t);
            return Ok(t);
        }
    }
    match crate::search::first_commutative_unbreakable(n, &want) {
        Some(t) => Ok(t),
        None => Err(ConstructError::SearchFailed {
            n,
            detail: format!("no commutative unbreakable loop with {want} group found"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeating_pattern_rows_are_even_permutations() {
        use crate::permgroup::sequence_parity;
        for row in REPEATING_PATTERN {
            assert_eq!(sequence_parity(&row), Parity::Even);
        }
    }

    #[test]
    fn tiling_respects_latin_constraints() {
        let mut pt = build_template(29).unwrap();
        tile_pattern(&mut pt, 14).unwrap();
        // Row p window is the bottom pattern row.
        let n = 29;
        let p = 14;
        let vals: Vec<usize> = (0..6).map(|d| pt.get(p, w_col(n, p, d)).unwrap()).collect();
        assert_eq!(vals, vec![1, 2, 0, 3, 4, 5]);
    }

    #[test]
    fn fragment_text_roundtrip() {
        let t = fill_symmetric(21).expect("order 21 fills");
        let template = build_template(21).unwrap();
        let fragment = ZoneFragment::from_table(21, open_rows(&template).into_iter(), &t);
        let text = fragment.to_text();
        assert!(text.starts_with("zone-fragment n=21 rows="));
        let back = ZoneFragment::from_text(&text).unwrap();
        let mut pt = template.clone();
        assert!(back.apply(&mut pt));
        assert!(pt.is_complete());
        assert_eq!(pt.to_table().unwrap(), t);
    }
}
