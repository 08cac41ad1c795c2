//! `E^1`-page bookkeeping for the discriminant spectral sequence: Borel–Moore
//! classes of the strata `F_(k1,k2,h)`, their regrouping into columns by
//! `L = k1 + k2 + h`, and the admissibility scan for differentials.
//!
//! Rendering follows the printed tables: a class of Borel–Moore degree `D`
//! and Hodge type `Q(a)` in the column at position `p` (counting from 1) is
//! drawn in row `D - 2v - p` as `Q(a - v)`, i.e. everything is twisted by
//! `Q(-v)` and the row is the `q` of `E^1_{p,q}`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::m0n::{equivariant_poincare_m0n, EquivariantPoincare, M0nError};
use crate::series::GradedTateSeries;
use crate::symfunc::{hall_inner_product_induced, SymError};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("type {0} has fewer than three ruling lines")]
    TooFewLines(ConfigurationType),
    #[error("M_0,{found} data supplied for type {ty}")]
    DegreeMismatch { ty: ConfigurationType, found: u32 },
    #[error("column L = {0} is below 3")]
    SmallColumn(u32),
    #[error(transparent)]
    M0n(#[from] M0nError),
    #[error(transparent)]
    Sym(#[from] SymError),
}

/// `k1` singular points on `E_n`, `k2` off `E_n` on distinct ruling lines,
/// and `h` ruling lines carrying two singular points each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfigurationType {
    pub k1: u32,
    pub k2: u32,
    pub h: u32,
}

impl ConfigurationType {
    pub fn new(k1: u32, k2: u32, h: u32) -> Self {
        ConfigurationType { k1, k2, h }
    }

    pub fn is_valid(&self) -> bool {
        self.k1 + self.k2 + 2 * self.h >= 1
    }

    pub fn codimension(&self) -> u32 {
        3 * self.k1 + 3 * self.k2 + 5 * self.h
    }

    pub fn points(&self) -> u32 {
        self.k1 + self.k2 + 2 * self.h
    }

    /// Number of ruling lines met, the column index `L`.
    pub fn lines(&self) -> u32 {
        self.k1 + self.k2 + self.h
    }
}

impl fmt::Display for ConfigurationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.k1, self.k2, self.h)
    }
}

/// Weighted inverse lexicographic order: codimension, then number of
/// points, then larger `k1` (equivalently smaller `k2`) first.
pub fn type_order(a: &ConfigurationType, b: &ConfigurationType) -> Ordering {
    a.codimension()
        .cmp(&b.codimension())
        .then(a.points().cmp(&b.points()))
        .then(a.h.cmp(&b.h))
        .then(a.k2.cmp(&b.k2))
        .then(b.k1.cmp(&a.k1))
}

impl PartialOrd for ConfigurationType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ConfigurationType {
    fn cmp(&self, other: &Self) -> Ordering {
        type_order(self, other)
    }
}

/// All types with `k1 + k2 + h = l`.
pub fn types_with_lines(l: u32) -> Vec<ConfigurationType> {
    let mut out = Vec::new();
    for h in 0..=l {
        for k2 in 0..=l - h {
            out.push(ConfigurationType::new(l - h - k2, k2, h));
        }
    }
    out.sort();
    out
}

fn check_type(c: &ConfigurationType, ep: &EquivariantPoincare) -> Result<(), SpectralError> {
    if c.lines() < 3 {
        return Err(SpectralError::TooFewLines(*c));
    }
    if ep.n != c.lines() {
        return Err(SpectralError::DegreeMismatch {
            ty: *c,
            found: ep.n,
        });
    }
    Ok(())
}

/// Multiplicities `m_i = <H^i(M_{0,L}), s_{1^k1} s_{1^k2} s_h>`, indexed by
/// cohomological degree `i`.
pub fn invariant_multiplicities(
    c: &ConfigurationType,
    ep: &EquivariantPoincare,
) -> Result<BTreeMap<usize, i128>, SpectralError> {
    check_type(c, ep)?;
    let mut out = BTreeMap::new();
    for (&i, layer) in &ep.layers {
        let m = hall_inner_product_induced(layer, c.k1, c.k2, c.h)?;
        if m != 0 {
            out.insert(i, m);
        }
    }
    Ok(out)
}

/// Twisted Borel–Moore Hodge–Grothendieck series of `X_(k1,k2,h)`:
/// `L^{-k2-h} t^{2k2+2h} (L^{-1} t^3 + L^{-3} t^6) * sum_j m_{L-3-j} L^{-j} t^{L-3+j}`.
pub fn twisted_config_homology(
    c: &ConfigurationType,
    ep: &EquivariantPoincare,
) -> Result<GradedTateSeries, SpectralError> {
    let mults = invariant_multiplicities(c, ep)?;
    let top = (c.lines() - 3) as usize;
    let shift_t = 2 * (c.k2 + c.h) as usize;
    let shift_l = -((c.k2 + c.h) as i32);
    let truncation = shift_t + 6 + 2 * top;
    let mut out = GradedTateSeries::zero(truncation);
    for (&i, &m) in &mults {
        let j = top - i;
        let degree = top + j;
        for (pgl_t, pgl_l) in [(3usize, -1i32), (6, -3)] {
            out.add_term(shift_t + pgl_t + degree, shift_l + pgl_l - j as i32, m);
        }
    }
    Ok(out)
}

/// One Borel–Moore class of a stratum, before rendering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StratumClass {
    /// Absolute Borel–Moore degree.
    pub bm_degree: i64,
    /// `w` such that the class is `Q(-w)` after twisting by `Q(-v)`.
    pub weight_twist: i64,
    pub multiplicity: u64,
}

/// Real shift of Borel–Moore degree from `X_c` to the stratum `F_c`: the
/// fiber is `C^{v - codim}` times an open simplex of dimension
/// `points - 1`.
pub fn stratum_degree_shift(c: &ConfigurationType, v: i64) -> i64 {
    2 * (v - c.codimension() as i64) + c.points() as i64 - 1
}

/// Borel–Moore classes of `F_c` for a section space of dimension `v`.
pub fn stratum_homology(
    c: &ConfigurationType,
    v: i64,
    ep: &EquivariantPoincare,
) -> Result<Vec<StratumClass>, SpectralError> {
    let series = twisted_config_homology(c, ep)?;
    let shift = stratum_degree_shift(c, v);
    let mut out = Vec::new();
    for k in 0..=series.truncation() {
        for (e, m) in series.coeff_ref(k).terms() {
            // L^e on X is L^{e - v + codim} on F
            let twist = e as i64 + c.codimension() as i64;
            out.push(StratumClass {
                bm_degree: shift + k as i64,
                weight_twist: twist,
                multiplicity: m as u64,
            });
        }
    }
    out.sort();
    Ok(out)
}

/// A rendered table cell entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E1Entry {
    pub row: i64,
    pub twist: i64,
    pub multiplicity: u64,
    pub contributing_types: Vec<ConfigurationType>,
}

/// A column of the regrouped spectral sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E1Column {
    pub label: String,
    /// Position `p` of the column in its table, starting at 1.
    pub position: i64,
    pub entries: Vec<E1Entry>,
}

impl E1Column {
    /// `(row, twist) -> multiplicity`
    pub fn cells(&self) -> BTreeMap<(i64, i64), u64> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry((e.row, e.twist)).or_insert(0) += e.multiplicity;
        }
        out
    }

    pub fn total_dimension(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }
}

/// Position of column `L` in the main table, where `L = 1, 2` share the
/// first column.
pub fn main_table_position(l: u32) -> i64 {
    l.max(2) as i64 - 1
}

fn render(
    label: String,
    position: i64,
    v: i64,
    classes: impl IntoIterator<Item = (ConfigurationType, StratumClass)>,
) -> E1Column {
    let mut merged: BTreeMap<(i64, i64), (u64, BTreeSet<ConfigurationType>)> = BTreeMap::new();
    for (ty, c) in classes {
        let row = c.bm_degree - 2 * v - position;
        let slot = merged.entry((row, c.weight_twist)).or_default();
        slot.0 += c.multiplicity;
        slot.1.insert(ty);
    }
    let mut entries: Vec<E1Entry> = merged
        .into_iter()
        .map(|((row, twist), (multiplicity, types))| E1Entry {
            row,
            twist,
            multiplicity,
            contributing_types: types.into_iter().collect(),
        })
        .collect();
    entries.sort_by(|a, b| b.row.cmp(&a.row).then(a.twist.cmp(&b.twist)));
    E1Column {
        label,
        position,
        entries,
    }
}

/// Column `L` of the main table: all strata with `k1 + k2 + h = L`.
pub fn e1_column(l: u32, v: i64) -> Result<E1Column, SpectralError> {
    if l < 3 {
        return Err(SpectralError::SmallColumn(l));
    }
    let ep = equivariant_poincare_m0n(l)?;
    let mut classes = Vec::new();
    for ty in types_with_lines(l) {
        for c in stratum_homology(&ty, v, &ep)? {
            classes.push((ty, c));
        }
    }
    Ok(render(format!("L={l}"), main_table_position(l), v, classes))
}

/// Columns for an explicit list of types, one column per type, rendered at
/// positions `1, 2, ...`.
pub fn type_columns(types: &[ConfigurationType], v: i64) -> Result<Vec<E1Column>, SpectralError> {
    types
        .iter()
        .enumerate()
        .map(|(idx, ty)| {
            let ep = equivariant_poincare_m0n(ty.lines())?;
            let classes = stratum_homology(ty, v, &ep)?;
            Ok(render(
                ty.to_string(),
                idx as i64 + 1,
                v,
                classes.into_iter().map(|c| (*ty, c)),
            ))
        })
        .collect()
}

/// Columns of twisted Borel–Moore homology of `X_c` for the given types,
/// untwisted, rows `D - p`.
pub fn twisted_columns(types: &[ConfigurationType]) -> Result<Vec<E1Column>, SpectralError> {
    types
        .iter()
        .enumerate()
        .map(|(idx, ty)| {
            let ep = equivariant_poincare_m0n(ty.lines())?;
            let series = twisted_config_homology(ty, &ep)?;
            let mut classes = Vec::new();
            for k in 0..=series.truncation() {
                for (e, m) in series.coeff_ref(k).terms() {
                    classes.push((
                        *ty,
                        StratumClass {
                            bm_degree: k as i64,
                            weight_twist: e as i64,
                            multiplicity: m as u64,
                        },
                    ));
                }
            }
            Ok(render(ty.to_string(), idx as i64 + 1, 0, classes))
        })
        .collect()
}

/// The five-point types of the worked example, in table order.
pub fn five_point_types() -> [ConfigurationType; 4] {
    [
        ConfigurationType::new(1, 0, 2),
        ConfigurationType::new(0, 1, 2),
        ConfigurationType::new(2, 1, 1),
        ConfigurationType::new(1, 2, 1),
    ]
}

/// Checks that the classes of `columns` cancel in pairs under differentials
/// of total degree `-1` from a column to one further left, with equal
/// weights. Returns the unmatched classes (empty when everything cancels).
pub fn unmatched_after_cancellation(columns: &[E1Column]) -> Vec<(i64, i64, i64)> {
    // (position, total degree, weight) with multiplicity
    let mut pool: BTreeMap<(i64, i64, i64), u64> = BTreeMap::new();
    for col in columns {
        for e in &col.entries {
            *pool
                .entry((col.position, e.row + col.position, e.twist))
                .or_insert(0) += e.multiplicity;
        }
    }
    // greedy from the rightmost column: match sources with targets to the left
    let keys: Vec<_> = pool.keys().copied().rev().collect();
    for (p, total, w) in keys {
        let mut available = pool.get(&(p, total, w)).copied().unwrap_or(0);
        if available == 0 {
            continue;
        }
        for target_p in (1..p).rev() {
            let key = (target_p, total - 1, w);
            if let Some(t) = pool.get_mut(&key) {
                let k = (*t).min(available);
                *t -= k;
                available -= k;
                if available == 0 {
                    break;
                }
            }
        }
        pool.insert((p, total, w), available);
    }
    pool.into_iter()
        .filter(|&(_, m)| m > 0)
        .flat_map(|(k, m)| std::iter::repeat(k).take(m as usize))
        .collect()
}

/// A column transcribed from a printed table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiteralColumn {
    pub label: &'static str,
    pub types: Vec<ConfigurationType>,
    pub position: i64,
    /// `(row, twist, multiplicity)`
    pub cells: Vec<(i64, i64, u64)>,
}

impl LiteralColumn {
    pub fn as_column(&self) -> E1Column {
        E1Column {
            label: self.label.to_string(),
            position: self.position,
            entries: self
                .cells
                .iter()
                .map(|&(row, twist, multiplicity)| E1Entry {
                    row,
                    twist,
                    multiplicity,
                    contributing_types: self.types.clone(),
                })
                .collect(),
        }
    }
}

fn t(k1: u32, k2: u32, h: u32) -> ConfigurationType {
    ConfigurationType::new(k1, k2, h)
}

/// The columns for types with at most two ruling lines, before the
/// differentials between them. These are computed case by case from the
/// cell decomposition of `F_n` and small configuration spaces rather than
/// from the general formula, and are stored as data.
pub fn small_columns() -> Vec<LiteralColumn> {
    vec![
        LiteralColumn {
            label: "(1,0,0),(0,1,0)",
            types: vec![t(1, 0, 0), t(0, 1, 0)],
            position: 1,
            cells: vec![(-3, 1, 1), (-5, 2, 2), (-7, 3, 1)],
        },
        LiteralColumn {
            label: "(0,0,1)",
            types: vec![t(0, 0, 1)],
            position: 2,
            cells: vec![(-7, 3, 1), (-9, 4, 1)],
        },
        LiteralColumn {
            label: "(2,0,0),(1,1,0),(0,2,0)",
            types: vec![t(2, 0, 0), t(1, 1, 0), t(0, 2, 0)],
            position: 3,
            cells: vec![(-8, 3, 2), (-10, 4, 1), (-12, 5, 1)],
        },
        LiteralColumn {
            label: "(1,0,1),(0,1,1)",
            types: vec![t(1, 0, 1), t(0, 1, 1)],
            position: 4,
            cells: vec![(-10, 4, 1), (-12, 5, 2), (-14, 6, 1)],
        },
        LiteralColumn {
            label: "(0,0,2)",
            types: vec![t(0, 0, 2)],
            position: 5,
            cells: vec![(-14, 6, 1)],
        },
    ]
}

/// The nonzero differentials between the small columns, as
/// `(source position, target position, row, twist)`; each has rank one.
pub fn small_column_differentials() -> Vec<(i64, i64, i64, i64)> {
    vec![
        (2, 1, -7, 3),
        (4, 3, -10, 4),
        (4, 3, -12, 5),
        (5, 4, -14, 6),
    ]
}

/// First column of the main table: what survives of the small columns.
pub fn main_table_small_column() -> LiteralColumn {
    LiteralColumn {
        label: "L=1,2",
        types: small_columns().into_iter().flat_map(|c| c.types).collect(),
        position: 1,
        cells: vec![(-3, 1, 1), (-5, 2, 2), (-6, 3, 2), (-8, 4, 1), (-9, 5, 1)],
    }
}

/// Applies [`small_column_differentials`] to [`small_columns`] and regroups
/// the survivors into a single column at position 1.
pub fn collapse_small_columns() -> BTreeMap<(i64, i64), u64> {
    let columns = small_columns();
    let mut cells: BTreeMap<(i64, i64, i64), u64> = BTreeMap::new();
    for c in &columns {
        for &(row, twist, m) in &c.cells {
            *cells.entry((c.position, row, twist)).or_insert(0) += m;
        }
    }
    for (src, dst, row, twist) in small_column_differentials() {
        for key in [(src, row, twist), (dst, row, twist)] {
            let slot = cells
                .get_mut(&key)
                .expect("differential between printed classes");
            *slot -= 1;
        }
    }
    let mut out = BTreeMap::new();
    for ((p, row, twist), m) in cells {
        if m > 0 {
            // moving to position 1 keeps the total degree row + p
            *out.entry((row + p - 1, twist)).or_insert(0) += m;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum DifferentialKind {
    I,
    II,
}

/// Candidate target families for a differential out of `F_c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Family {
    /// `(k1, k2, h - r)`
    A,
    /// `(k1 - r, k2, h)`
    B,
    /// `(k1, k2 - r, h)`
    C,
    /// `(k1 + r, k2, h - r)`
    D,
    /// `(k1, k2 + r, h - r)`
    E,
    /// `(k1 + r, k2 - r, h)`, a point moving onto `E_n`
    F,
    /// `(k1, k2 - 2r, h + r)`, two points moving onto one ruling line
    G,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::E,
        Family::F,
        Family::G,
    ];

    pub fn target(&self, c: &ConfigurationType, r: u32) -> Option<ConfigurationType> {
        let (k1, k2, h) = (c.k1 as i64, c.k2 as i64, c.h as i64);
        let r = r as i64;
        let (a, b, e) = match self {
            Family::A => (k1, k2, h - r),
            Family::B => (k1 - r, k2, h),
            Family::C => (k1, k2 - r, h),
            Family::D => (k1 + r, k2, h - r),
            Family::E => (k1, k2 + r, h - r),
            Family::F => (k1 + r, k2 - r, h),
            Family::G => (k1, k2 - 2 * r, h + r),
        };
        (a >= 0 && b >= 0 && e >= 0).then(|| ConfigurationType::new(a as u32, b as u32, e as u32))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DifferentialCandidate {
    pub source: ConfigurationType,
    pub target: ConfigurationType,
    pub family: Family,
    pub r: u32,
    pub j: u32,
    pub j_prime: u32,
    pub kind: Option<DifferentialKind>,
}

/// Whether weight and degree match for a differential from a class of
/// twist `j` on `src` to a class of twist `j'` on `dst`.
pub fn system_solvable(src: &ConfigurationType, j: i64, dst: &ConfigurationType, jp: i64) -> bool {
    let (k1, k2, h) = (src.k1 as i64, src.k2 as i64, src.h as i64);
    let (k1p, k2p, hp) = (dst.k1 as i64, dst.k2 as i64, dst.h as i64);
    let weight = 4 * hp + 3 * k1p + 2 * k2p - jp == 4 * h + 3 * k1 + 2 * k2 - j;
    let degree = -5 * hp - 4 * k1p - 2 * k2p - 3 + jp == -5 * h - 4 * k1 - 2 * k2 - 4 + j;
    weight && degree
}

/// Every solution of the admissibility system for sources with
/// `3 <= k1 + k2 + h <= bound`, all families, all `r >= 1` and
/// `0 <= j <= L - 3`, `0 <= j' <= L' - 3`.
pub fn differential_candidates(bound: u32) -> Vec<DifferentialCandidate> {
    let mut out = Vec::new();
    for l in 3..=bound {
        for source in types_with_lines(l) {
            for family in Family::ALL {
                let max_r = source.points().max(1);
                for r in 1..=max_r {
                    let Some(target) = family.target(&source, r) else {
                        continue;
                    };
                    if target.lines() < 3 {
                        continue;
                    }
                    for j in 0..=(l - 3) {
                        for jp in 0..=(target.lines() - 3) {
                            if system_solvable(&source, j as i64, &target, jp as i64) {
                                let kind = match (family, r) {
                                    (Family::F, 1) => Some(DifferentialKind::I),
                                    (Family::G, 1) => Some(DifferentialKind::II),
                                    _ => None,
                                };
                                out.push(DifferentialCandidate {
                                    source,
                                    target,
                                    family,
                                    r,
                                    j,
                                    j_prime: jp,
                                    kind,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Reads a column back as its contribution to the stable numerator: a cell
/// `Q(-w)` in row `r` at position `p` sits at `L^w t^{-(r+p)-1}`, and
/// the column is that numerator times `1 + L^2 t^3`. Cells beyond the
/// truncation are dropped.
pub fn column_numerator(
    cells: &BTreeMap<(i64, i64), u64>,
    position: i64,
    truncation: usize,
) -> GradedTateSeries {
    let mut col = GradedTateSeries::zero(truncation);
    for (&(row, w), &m) in cells {
        let k = -(row + position) - 1;
        if k >= 0 && k as usize <= truncation {
            col.add_term(k as usize, w as i32, m as i128);
        }
    }
    let pgl = GradedTateSeries::from_terms(truncation, [(0, 0, 1), (3, 2, 1)]);
    let inv = pgl.invert_unit().expect("constant term one");
    col.multiply(&inv).expect("equal truncations")
}

fn render_cell(entries: &[(i64, u64)]) -> String {
    entries
        .iter()
        .map(|&(w, m)| {
            if m == 1 {
                format!("Q(-{w})")
            } else {
                format!("Q(-{w})^{m}")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Markdown table with rows as shifted degrees (descending) and one column
/// per entry of `columns`.
pub fn render_markdown(columns: &[E1Column]) -> String {
    let mut rows: BTreeSet<i64> = BTreeSet::new();
    for c in columns {
        rows.extend(c.entries.iter().map(|e| e.row));
    }
    let mut out = String::from("| row |");
    for c in columns {
        out.push_str(&format!(" {} |", c.label));
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(columns.len()));
    out.push('\n');
    let (Some(&lo), Some(&hi)) = (rows.first(), rows.last()) else {
        return out;
    };
    for row in (lo..=hi).rev() {
        out.push_str(&format!("| {row} |"));
        for c in columns {
            let mut cell: Vec<(i64, u64)> = c
                .entries
                .iter()
                .filter(|e| e.row == row)
                .map(|e| (e.twist, e.multiplicity))
                .collect();
            cell.sort();
            out.push_str(&format!(" {} |", render_cell(&cell)));
        }
        out.push('\n');
    }
    out
}

/// CSV with columns `L,row,twist,multiplicity,contributing_types`.
pub fn render_csv(columns: &[E1Column]) -> String {
    let mut out = String::from("L,row,twist,multiplicity,contributing_types\n");
    for c in columns {
        let l = c.label.trim_start_matches("L=");
        for e in &c.entries {
            let types: Vec<String> = e.contributing_types.iter().map(|t| t.to_string()).collect();
            out.push_str(&format!(
                "{l},{},{},{},\"{}\"\n",
                e.row,
                e.twist,
                e.multiplicity,
                types.join(" ")
            ));
        }
    }
    out
}

/// The main-table columns `L = 3..=6` as printed, `(row, twist, mult)`.
/// Rows below -32 are not printed.
pub fn printed_main_columns() -> BTreeMap<u32, Vec<(i64, i64, u64)>> {
    BTreeMap::from([
        (
            3,
            vec![
                (-11, 6, 1),
                (-12, 7, 1),
                (-14, 8, 2),
                (-15, 9, 2),
                (-17, 10, 1),
                (-18, 11, 1),
            ],
        ),
        (
            4,
            vec![
                (-13, 7, 1),
                (-14, 8, 1),
                (-16, 9, 3),
                (-17, 10, 3),
                (-19, 11, 3),
                (-20, 12, 3),
                (-22, 13, 1),
                (-23, 14, 1),
            ],
        ),
        (
            5,
            vec![
                (-17, 10, 1),
                (-18, 10, 2),
                (-19, 11, 2),
                (-20, 12, 3),
                (-21, 12, 4),
                (-21, 13, 2),
                (-22, 13, 2),
                (-22, 14, 4),
                (-23, 14, 3),
                (-24, 14, 5),
                (-24, 15, 1),
                (-25, 15, 6),
                (-26, 16, 1),
                (-27, 16, 2),
                (-28, 17, 2),
            ],
        ),
        (
            6,
            vec![
                (-19, 11, 1),
                (-20, 12, 1),
                (-21, 12, 2),
                (-22, 13, 5),
                (-23, 13, 3),
                (-23, 14, 4),
                (-24, 14, 7),
                (-24, 15, 1),
                (-25, 15, 8),
                (-26, 15, 6),
                (-26, 16, 6),
                (-27, 16, 8),
                (-27, 17, 2),
                (-28, 17, 5),
                (-29, 17, 3),
                (-29, 18, 4),
                (-30, 18, 3),
                (-30, 19, 1),
                (-31, 19, 1),
                (-32, 20, 1),
            ],
        ),
    ])
}

/// Lowest row printed in the main table.
pub const PRINTED_ROW_FLOOR: i64 = -32;

/// The worked five-point example as printed, per type:
/// `(row offset from 2v, twist offset from v)`, i.e. `Q(v - a)` in row
/// `2v - b` is stored as `(-b, -a)`. All multiplicities are one.
pub fn printed_five_point_hyperelliptic() -> Vec<(ConfigurationType, Vec<(i64, i64)>)> {
    vec![
        (t(1, 0, 2), vec![(-13, -8), (-16, -10)]),
        (t(0, 1, 2), vec![(-12, -7), (-15, -9)]),
        (t(2, 1, 1), vec![(-16, -9), (-19, -11)]),
        (t(1, 2, 1), vec![(-15, -8), (-18, -10)]),
    ]
}

/// The twisted Borel–Moore columns of the five-point example as printed:
/// `(row, Hodge type a of Q(a))`.
pub fn printed_five_point_twisted() -> Vec<(ConfigurationType, Vec<(i64, i64)>)> {
    vec![
        (t(1, 0, 2), vec![(9, 5), (6, 3)]),
        (t(0, 1, 2), vec![(10, 6), (7, 4)]),
        (t(2, 1, 1), vec![(8, 5), (5, 3)]),
        (t(1, 2, 1), vec![(9, 6), (6, 4)]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codimensions() {
        assert_eq!(t(1, 0, 0).codimension(), 3);
        assert_eq!(t(0, 0, 1).codimension(), 5);
        assert_eq!(t(1, 1, 1).codimension(), 11);
        assert!(!t(0, 0, 0).is_valid());
    }

    #[test]
    fn order_of_small_types() {
        let listed = [
            t(1, 0, 0),
            t(0, 1, 0),
            t(0, 0, 1),
            t(2, 0, 0),
            t(1, 1, 0),
            t(0, 2, 0),
            t(1, 0, 1),
            t(0, 1, 1),
            t(0, 0, 2),
        ];
        let mut sorted = listed;
        sorted.sort();
        assert_eq!(sorted, listed);
        for n in 3..10 {
            assert_eq!(type_order(&t(n, 0, 0), &t(0, 0, n - 1)), Ordering::Less);
        }
    }

    #[test]
    fn twisted_homology_examples() {
        let ep3 = equivariant_poincare_m0n(3).unwrap();
        let s = twisted_config_homology(&t(1, 1, 1), &ep3).unwrap();
        let nonzero: Vec<usize> = (0..=s.truncation())
            .filter(|&k| !s.coeff(k).is_zero())
            .collect();
        assert_eq!(nonzero.len(), 2);
        let s = twisted_config_homology(&t(0, 0, 3), &ep3).unwrap();
        assert_eq!(s.coeff(9).coeff(-4), 1);
        assert_eq!(s.coeff(12).coeff(-6), 1);
        assert!(twisted_config_homology(&t(3, 0, 0), &ep3)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn total_dimension_is_twice_the_invariants() {
        for l in 3..=6 {
            let ep = equivariant_poincare_m0n(l).unwrap();
            for ty in types_with_lines(l) {
                let m: i128 = invariant_multiplicities(&ty, &ep).unwrap().values().sum();
                let total: u64 = stratum_homology(&ty, 40, &ep)
                    .unwrap()
                    .iter()
                    .map(|c| c.multiplicity)
                    .sum();
                assert_eq!(total as i128, 2 * m, "{ty}");
            }
        }
    }

    #[test]
    fn rendering_is_independent_of_v() {
        assert_eq!(e1_column(4, 30).unwrap(), e1_column(4, 57).unwrap());
    }

    #[test]
    fn small_columns_collapse_to_main_column() {
        let expected: BTreeMap<(i64, i64), u64> = main_table_small_column()
            .cells
            .iter()
            .map(|&(r, w, m)| ((r, w), m))
            .collect();
        assert_eq!(collapse_small_columns(), expected);
    }

    #[test]
    fn differential_families() {
        let cands = differential_candidates(8);
        assert!(!cands.is_empty());
        for c in &cands {
            match c.kind {
                Some(DifferentialKind::I) => {
                    assert_eq!(c.target, t(c.source.k1 + 1, c.source.k2 - 1, c.source.h));
                    assert_eq!(c.j_prime, c.j + 1);
                }
                Some(DifferentialKind::II) => {
                    assert_eq!(c.target, t(c.source.k1, c.source.k2 - 2, c.source.h + 1));
                    assert_eq!(c.j_prime, c.j);
                }
                None => panic!("unexpected candidate {c:?}"),
            }
        }
        let pairs: BTreeSet<_> = cands.iter().map(|c| (c.source, c.target, c.kind)).collect();
        assert!(pairs.contains(&(t(1, 3, 1), t(2, 2, 1), Some(DifferentialKind::I))));
        assert!(pairs.contains(&(t(2, 3, 1), t(2, 1, 2), Some(DifferentialKind::II))));
        for h in 3..=8 {
            assert!(cands.iter().all(|c| c.source != t(0, 0, h)));
        }
    }

    #[test]
    fn csv_and_markdown() {
        let col = e1_column(3, 20).unwrap();
        let csv = render_csv(std::slice::from_ref(&col));
        assert!(csv.starts_with("L,row,twist,multiplicity,contributing_types\n"));
        assert!(csv.contains("3,-11,6,1,\"(1,1,1)\""));
        let md = render_markdown(&[col]);
        assert!(md.contains("| -14 | Q(-8)^2 |"));
        assert!(md.contains("| -13 |  |"));
    }
}
