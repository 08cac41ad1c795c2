//! The stable Hodge–Grothendieck series of `H_{F_n, g}` and its expansion
//! into cohomology tables.
//!
//! ```text
//! P^st(t) = 1 + sum_{k1+k2+h >= 3} L^{2k1+k2+3h} t^{3k1+k2+4h}
//!               <P_{M_{0,k1+k2+h}}(t), s_{1^k1} s_{1^k2} s_h>
//!           / ((1 + L t)(1 + L^2 t^3))
//! ```
//!
//! For `n > 0` the series is multiplied by `1 + L t^2`.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::m0n::{equivariant_poincare_m0n, EquivariantPoincare, M0nError};
use crate::series::{GradedTateSeries, SeriesError};
use crate::symfunc::{hall_inner_product_induced, SymError};

#[derive(Debug, Error)]
pub enum StableError {
    #[error("type ({k1},{k2},{h}) has fewer than three points")]
    TooFewPoints { k1: u32, k2: u32, h: u32 },
    #[error("type with {0} points exceeds the supported maximum of {MAX_POINTS}")]
    TooManyPoints(u32),
    #[error("M_0,{found} data supplied for a type with {expected} points")]
    DegreeMismatch { expected: u32, found: u32 },
    #[error("stable range needs g >= 2 and 0 <= n <= g + 1, got g = {g}, n = {n}")]
    OutOfDomain { g: i64, n: i64 },
    #[error("negative multiplicity {mult} for Q(-{twist}) in degree {degree}")]
    NegativeMultiplicity {
        degree: usize,
        twist: i32,
        mult: i128,
    },
    #[error(transparent)]
    M0n(#[from] M0nError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Largest number of marked points whose twisted counts fit in `i128`.
pub const MAX_POINTS: u32 = 32;

/// One summand of the numerator, truncated at `truncation`.
pub fn numerator_term(
    k1: u32,
    k2: u32,
    h: u32,
    ep: &EquivariantPoincare,
    truncation: usize,
) -> Result<GradedTateSeries, StableError> {
    let n = k1 + k2 + h;
    if n < 3 {
        return Err(StableError::TooFewPoints { k1, k2, h });
    }
    if ep.n != n {
        return Err(StableError::DegreeMismatch {
            expected: n,
            found: ep.n,
        });
    }
    let weight = (2 * k1 + k2 + 3 * h) as i32;
    let base = (3 * k1 + k2 + 4 * h) as usize;
    let mut out = GradedTateSeries::zero(truncation);
    for (&i, layer) in &ep.layers {
        if base + i > truncation {
            break;
        }
        let m = hall_inner_product_induced(layer, k1, k2, h)?;
        out.add_term(base + i, weight + i as i32, m);
    }
    Ok(out)
}

/// All `(k1, k2, h)` with `k1 + k2 + h >= 3` and `3k1 + k2 + 4h <= bound`,
/// in lexicographic order.
pub fn contributing_triples(bound: usize) -> Vec<(u32, u32, u32)> {
    let b = bound as u32;
    let mut out = Vec::new();
    for k1 in 0..=b / 3 {
        for h in 0..=(b - 3 * k1) / 4 {
            for k2 in 0..=(b - 3 * k1 - 4 * h) {
                if k1 + k2 + h >= 3 {
                    out.push((k1, k2, h));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Numerator sum over triples with `3k1 + k2 + 4h <= triple_bound`.
pub fn numerator_sum(
    max_degree: usize,
    triple_bound: usize,
) -> Result<GradedTateSeries, StableError> {
    let triples = contributing_triples(triple_bound);
    let terms: Vec<Result<GradedTateSeries, StableError>> = triples
        .par_iter()
        .map(|&(k1, k2, h)| {
            let n = k1 + k2 + h;
            // only layers with base + i <= max_degree matter; skip the work
            // entirely for types starting past the truncation
            if (3 * k1 + k2 + 4 * h) as usize > max_degree {
                return Ok(GradedTateSeries::zero(max_degree));
            }
            if n > MAX_POINTS {
                return Err(StableError::TooManyPoints(n));
            }
            let ep = equivariant_poincare_m0n(n)?;
            numerator_term(k1, k2, h, &ep, max_degree)
        })
        .collect();
    let mut sum = GradedTateSeries::zero(max_degree);
    for term in terms {
        sum = sum.add(&term?)?;
    }
    Ok(sum)
}

/// `(1 + L t)(1 + L^2 t^3)`
pub fn denominator(truncation: usize) -> GradedTateSeries {
    GradedTateSeries::from_terms(truncation, [(0, 0, 1), (1, 1, 1), (3, 2, 1), (4, 3, 1)])
}

/// `1 + numerator / ((1 + L t)(1 + L^2 t^3))`.
pub fn assemble(numerator: GradedTateSeries) -> Result<GradedTateSeries, StableError> {
    let t = numerator.truncation();
    let inv = denominator(t).invert_unit()?;
    Ok(GradedTateSeries::one(t).add(&numerator.multiply(&inv)?)?)
}

/// `P^st(t)` truncated at `max_degree`.
pub fn stable_series(max_degree: usize) -> Result<GradedTateSeries, StableError> {
    assemble(numerator_sum(max_degree, max_degree)?)
}

/// `P^st(t)` with triples enumerated up to `triple_bound`, which may exceed
/// `max_degree`; the result must not depend on the excess.
pub fn stable_series_with_bound(
    max_degree: usize,
    triple_bound: usize,
) -> Result<GradedTateSeries, StableError> {
    assemble(numerator_sum(max_degree, triple_bound)?)
}

/// `(1 + L t^2) P^st(t)`, the series for `n > 0`.
pub fn stable_series_positive_n(max_degree: usize) -> Result<GradedTateSeries, StableError> {
    let factor = GradedTateSeries::from_terms(max_degree, [(0, 0, 1), (2, 1, 1)]);
    Ok(factor.multiply(&stable_series(max_degree)?)?)
}

/// Degrees `i <= (g - n + 2) / 2` lie in the stable range.
pub fn stable_range(g: i64, n: i64) -> Result<Ratio<i64>, StableError> {
    if g < 2 || n < 0 || n > g + 1 {
        return Err(StableError::OutOfDomain { g, n });
    }
    Ok(Ratio::new(g - n + 2, 2))
}

/// Published `H^0..H^18` for `n = 0`, as `(twist, multiplicity)` pairs.
pub const EXAMPLE_ROWS: [&[(i32, u64)]; 19] = [
    &[(0, 1)],
    &[],
    &[],
    &[],
    &[],
    &[],
    &[],
    &[],
    &[(6, 1)],
    &[(7, 1)],
    &[],
    &[],
    &[(9, 1), (10, 1)],
    &[(10, 1), (11, 1)],
    &[(11, 1)],
    &[(12, 2)],
    &[(12, 2), (13, 2), (14, 1)],
    &[(13, 3), (14, 2), (15, 1)],
    &[(14, 2), (15, 3)],
];

/// Note attached to every emitted table.
pub const STABLE_RANGE_NOTE: &str = "rows agree with H^i(H_{F_n,g}) for i <= (g-n+2)/2; \
the boundary degree i = (g-n+2)/2 is boundary-inclusive-unverified";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "n=0")]
    Zero,
    #[serde(rename = "n>0")]
    Positive,
}

impl Regime {
    pub fn of(n: u32) -> Self {
        if n == 0 {
            Regime::Zero
        } else {
            Regime::Positive
        }
    }
}

/// Per-degree multisets of Tate twists: `rows[i][w]` is the multiplicity of
/// `Q(-w)` in `H^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableCohomologyTable {
    pub regime: Regime,
    pub max_degree: usize,
    pub rows: BTreeMap<usize, BTreeMap<i32, u64>>,
}

/// Expands the series for surface index `n` into a cohomology table.
pub fn cohomology_table(n: u32, max_degree: usize) -> Result<StableCohomologyTable, StableError> {
    let regime = Regime::of(n);
    let series = match regime {
        Regime::Zero => stable_series(max_degree)?,
        Regime::Positive => stable_series_positive_n(max_degree)?,
    };
    table_from_series(regime, &series)
}

pub fn table_from_series(
    regime: Regime,
    series: &GradedTateSeries,
) -> Result<StableCohomologyTable, StableError> {
    let mut rows = BTreeMap::new();
    for i in 0..=series.truncation() {
        let mut row = BTreeMap::new();
        for (w, c) in series.coeff_ref(i).terms() {
            if c < 0 {
                return Err(StableError::NegativeMultiplicity {
                    degree: i,
                    twist: w,
                    mult: c,
                });
            }
            row.insert(w, c as u64);
        }
        rows.insert(i, row);
    }
    Ok(StableCohomologyTable {
        regime,
        max_degree: series.truncation(),
        rows,
    })
}

#[derive(Serialize)]
struct ClassJson {
    twist: i32,
    mult: u64,
}

#[derive(Serialize)]
struct RowJson {
    i: usize,
    classes: Vec<ClassJson>,
}

#[derive(Serialize)]
struct TableJson<'a> {
    surface_index_regime: Regime,
    max_degree: usize,
    rows: Vec<RowJson>,
    stable_range_note: &'a str,
}

impl StableCohomologyTable {
    pub fn row(&self, i: usize) -> &BTreeMap<i32, u64> {
        &self.rows[&i]
    }

    pub fn to_json(&self) -> String {
        let doc = TableJson {
            surface_index_regime: self.regime,
            max_degree: self.max_degree,
            rows: self
                .rows
                .iter()
                .map(|(&i, row)| RowJson {
                    i,
                    classes: row
                        .iter()
                        .map(|(&twist, &mult)| ClassJson { twist, mult })
                        .collect(),
                })
                .collect(),
            stable_range_note: STABLE_RANGE_NOTE,
        };
        serde_json::to_string_pretty(&doc).expect("table serializes")
    }

    /// Renders a row as `Q(-12)^2 + Q(-13)`, `Q` for the unit and `0` when empty.
    pub fn render_row(row: &BTreeMap<i32, u64>) -> String {
        if row.is_empty() {
            return "0".into();
        }
        row.iter()
            .map(|(&w, &m)| {
                let base = if w == 0 {
                    "Q".to_string()
                } else {
                    format!("Q({})", -w)
                };
                if m == 1 {
                    base
                } else {
                    format!("{base}^{m}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| i | H^i |\n|---|---|\n");
        for (i, row) in &self.rows {
            out.push_str(&format!("| {i} | {} |\n", Self::render_row(row)));
        }
        out.push_str(&format!("\n{STABLE_RANGE_NOTE}\n"));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,twist,multiplicity\n");
        for (i, row) in &self.rows {
            for (w, m) in row {
                out.push_str(&format!("{i},{w},{m}\n"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TatePolynomial;

    #[test]
    fn numerator_examples() {
        let t = 12;
        let term = numerator_term(1, 1, 1, &equivariant_poincare_m0n(3).unwrap(), t).unwrap();
        assert_eq!(term, GradedTateSeries::monomial(t, 1, 6, 8));
        let term = numerator_term(0, 3, 0, &equivariant_poincare_m0n(3).unwrap(), t).unwrap();
        assert!(term.is_zero());
        let term = numerator_term(2, 2, 0, &equivariant_poincare_m0n(4).unwrap(), t).unwrap();
        assert_eq!(term, GradedTateSeries::monomial(t, 1, 7, 9));
        assert!(numerator_term(1, 1, 0, &equivariant_poincare_m0n(3).unwrap(), t).is_err());
        assert!(numerator_term(1, 1, 1, &equivariant_poincare_m0n(4).unwrap(), t).is_err());
    }

    #[test]
    fn triple_enumeration() {
        let triples = contributing_triples(8);
        assert!(triples.contains(&(1, 1, 1)));
        assert!(triples.contains(&(0, 8, 0)));
        assert!(!triples.contains(&(0, 0, 3)));
        for (k1, k2, h) in triples {
            assert!(3 * k1 + k2 + 4 * h <= 8 && k1 + k2 + h >= 3);
        }
    }

    #[test]
    fn stable_range_values() {
        assert_eq!(stable_range(38, 0).unwrap(), Ratio::from_integer(20));
        assert_eq!(stable_range(10, 10).unwrap(), Ratio::from_integer(1));
        assert_eq!(stable_range(5, 1).unwrap(), Ratio::from_integer(3));
        assert_eq!(stable_range(5, 0).unwrap(), Ratio::new(7, 2));
        assert!(stable_range(1, 0).is_err());
        assert!(stable_range(5, 7).is_err());
    }

    #[test]
    fn low_degrees() {
        let p = stable_series(12).unwrap();
        assert_eq!(p.coeff(0), TatePolynomial::one());
        for k in 1..8 {
            assert!(p.coeff(k).is_zero(), "t^{k}");
        }
        assert_eq!(p.coeff(8), TatePolynomial::monomial(1, 6));
        assert_eq!(p.coeff(12), TatePolynomial::from_terms([(9, 1), (10, 1)]));
    }

    #[test]
    fn positive_n_examples() {
        let p = stable_series(10).unwrap();
        let q = stable_series_positive_n(10).unwrap();
        assert_eq!(q.coeff(0), TatePolynomial::one());
        assert_eq!(q.coeff(2), TatePolynomial::monomial(1, 1));
        assert_eq!(q.coeff(10), &p.coeff(10) + &p.coeff(8).shift(1));
        assert_eq!(q.coeff(10), TatePolynomial::from_terms([(7, 1)]));
    }

    #[test]
    fn wider_enumeration_is_stable() {
        let a = stable_series(14).unwrap();
        let b = stable_series_with_bound(14, 20).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn json_shape() {
        let table = cohomology_table(0, 9).unwrap();
        let v: serde_json::Value = serde_json::from_str(&table.to_json()).unwrap();
        assert_eq!(v["surface_index_regime"], "n=0");
        assert_eq!(v["rows"][8]["classes"][0]["twist"], 6);
        assert!(v["stable_range_note"]
            .as_str()
            .unwrap()
            .contains("boundary-inclusive-unverified"));
        assert_eq!(
            cohomology_table(3, 0).unwrap().row(0),
            &BTreeMap::from([(0, 1)])
        );
    }

    #[test]
    fn nineteen_rows() {
        let table = cohomology_table(0, 18).unwrap();
        for (i, row) in EXAMPLE_ROWS.iter().enumerate() {
            let want: BTreeMap<i32, u64> = row.iter().copied().collect();
            assert_eq!(table.row(i), &want, "degree {i}");
        }
    }

    #[test]
    fn nonnegative_to_thirty() {
        cohomology_table(0, 30).unwrap();
        cohomology_table(1, 30).unwrap();
    }
}
