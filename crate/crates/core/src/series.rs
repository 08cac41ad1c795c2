//! Truncated power series in `t` whose coefficients are integer Laurent
//! polynomials in the Tate class `L`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(usize, usize),
    #[error("constant term is {0}, not 1")]
    NotUnit(TatePolynomial),
    #[error("malformed series JSON: {0}")]
    Json(String),
}

/// Integer Laurent polynomial in `L`; zero coefficients are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TatePolynomial {
    coeffs: BTreeMap<i32, i128>,
}

impl TatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `c * L^e`
    pub fn monomial(c: i128, e: i32) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, i128)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: i32, c: i128) {
        if c == 0 {
            return;
        }
        let entry = self.coeffs.entry(e).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.coeffs.remove(&e);
        }
    }

    pub fn coeff(&self, e: i32) -> i128 {
        self.coeffs.get(&e).copied().unwrap_or(0)
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, i128)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_exponent(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    /// Multiplies by `L^k`.
    pub fn shift(&self, k: i32) -> Self {
        TatePolynomial {
            coeffs: self.coeffs.iter().map(|(&e, &c)| (e + k, c)).collect(),
        }
    }

    pub fn scale(&self, c: i128) -> Self {
        Self::from_terms(self.terms().map(|(e, x)| (e, x * c)))
    }
}

impl fmt::Debug for TatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for TatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms().enumerate() {
            if k == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0 { "-" } else { "+" })?;
            }
            let a = c.abs();
            match (e, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "L")?,
                (1, _) => write!(f, "{a}L")?,
                (_, 1) => write!(f, "L^{e}")?,
                _ => write!(f, "{a}L^{e}")?,
            }
        }
        Ok(())
    }
}

impl Add for &TatePolynomial {
    type Output = TatePolynomial;
    fn add(self, rhs: &TatePolynomial) -> TatePolynomial {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c);
        }
        out
    }
}

impl Sub for &TatePolynomial {
    type Output = TatePolynomial;
    fn sub(self, rhs: &TatePolynomial) -> TatePolynomial {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, -c);
        }
        out
    }
}

impl Neg for &TatePolynomial {
    type Output = TatePolynomial;
    fn neg(self) -> TatePolynomial {
        self.scale(-1)
    }
}

impl Mul for &TatePolynomial {
    type Output = TatePolynomial;
    fn mul(self, rhs: &TatePolynomial) -> TatePolynomial {
        let mut out = TatePolynomial::zero();
        for (a, x) in self.terms() {
            for (b, y) in rhs.terms() {
                out.add_term(a + b, x * y);
            }
        }
        out
    }
}

/// Series `sum_{k=0}^{T} P_k(L) t^k` with explicit truncation `T`.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedTateSeries {
    truncation: usize,
    terms: Vec<TatePolynomial>,
}

impl GradedTateSeries {
    pub fn zero(truncation: usize) -> Self {
        GradedTateSeries {
            truncation,
            terms: vec![TatePolynomial::zero(); truncation + 1],
        }
    }

    pub fn one(truncation: usize) -> Self {
        Self::monomial(truncation, 1, 0, 0)
    }

    /// `c * L^e * t^k`, or zero if `k` lies beyond the truncation.
    pub fn monomial(truncation: usize, c: i128, e: i32, k: usize) -> Self {
        let mut s = Self::zero(truncation);
        s.add_term(k, e, c);
        s
    }

    /// Builds a series from `(t-degree, L-exponent, coefficient)` triples,
    /// silently dropping those beyond the truncation.
    pub fn from_terms(
        truncation: usize,
        terms: impl IntoIterator<Item = (usize, i32, i128)>,
    ) -> Self {
        let mut s = Self::zero(truncation);
        for (k, e, c) in terms {
            s.add_term(k, e, c);
        }
        s
    }

    pub fn add_term(&mut self, k: usize, e: i32, c: i128) {
        if k <= self.truncation {
            self.terms[k].add_term(e, c);
        }
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Coefficient of `t^k`; zero beyond the truncation.
    pub fn coeff(&self, k: usize) -> TatePolynomial {
        self.terms.get(k).cloned().unwrap_or_default()
    }

    pub fn coeff_ref(&self, k: usize) -> &TatePolynomial {
        &self.terms[k]
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(TatePolynomial::is_zero)
    }

    fn check(&self, other: &Self) -> Result<(), SeriesError> {
        if self.truncation != other.truncation {
            return Err(SeriesError::TruncationMismatch(
                self.truncation,
                other.truncation,
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        Ok(GradedTateSeries {
            truncation: self.truncation,
            terms: self
                .terms
                .iter()
                .zip(&other.terms)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        Ok(GradedTateSeries {
            truncation: self.truncation,
            terms: self
                .terms
                .iter()
                .zip(&other.terms)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Cauchy product truncated at `T`.
    pub fn multiply(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let t = self.truncation;
        let mut out = Self::zero(t);
        for i in 0..=t {
            if self.terms[i].is_zero() {
                continue;
            }
            for j in 0..=t - i {
                if other.terms[j].is_zero() {
                    continue;
                }
                out.terms[i + j] = &out.terms[i + j] + &(&self.terms[i] * &other.terms[j]);
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse of a series with constant term 1.
    pub fn invert_unit(&self) -> Result<Self, SeriesError> {
        if self.terms[0] != TatePolynomial::one() {
            return Err(SeriesError::NotUnit(self.terms[0].clone()));
        }
        let t = self.truncation;
        let mut inv = Self::zero(t);
        inv.terms[0] = TatePolynomial::one();
        // b_k = -sum_{j=1}^{k} a_j b_{k-j}
        for k in 1..=t {
            let mut acc = TatePolynomial::zero();
            for j in 1..=k {
                if self.terms[j].is_zero() || inv.terms[k - j].is_zero() {
                    continue;
                }
                acc = &acc + &(&self.terms[j] * &inv.terms[k - j]);
            }
            inv.terms[k] = -&acc;
        }
        Ok(inv)
    }

    /// `sum_k P_k(L) t0^k`; depends on the truncation.
    pub fn evaluate_t(&self, t0: i128) -> TatePolynomial {
        let mut out = TatePolynomial::zero();
        let mut power = 1i128;
        for term in &self.terms {
            out = &out + &term.scale(power);
            power *= t0;
        }
        out
    }

    /// Re-truncates at a smaller `T`.
    pub fn truncate(&self, truncation: usize) -> Self {
        assert!(truncation <= self.truncation);
        GradedTateSeries {
            truncation,
            terms: self.terms[..=truncation].to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        let doc = SeriesJson {
            truncation: self.truncation,
            terms: self
                .terms
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(t, p)| TermJson {
                    t,
                    l_coeffs: p.terms().map(|(e, c)| CoeffJson { e, c }).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("series serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SeriesError> {
        let doc: SeriesJson =
            serde_json::from_str(text).map_err(|e| SeriesError::Json(e.to_string()))?;
        let mut s = Self::zero(doc.truncation);
        for term in doc.terms {
            if term.t > doc.truncation {
                return Err(SeriesError::Json(format!(
                    "term t^{} beyond truncation",
                    term.t
                )));
            }
            for c in term.l_coeffs {
                s.add_term(term.t, c.e, c.c);
            }
        }
        Ok(s)
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    e: i32,
    c: i128,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    t: usize,
    #[serde(rename = "L_coeffs")]
    l_coeffs: Vec<CoeffJson>,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    truncation: usize,
    terms: Vec<TermJson>,
}

impl fmt::Debug for GradedTateSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GradedTateSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, p) in self.terms.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({p})")?,
                1 => write!(f, "({p})t")?,
                _ => write!(f, "({p})t^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.truncation + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(t: usize, terms: &[(usize, i32, i128)]) -> GradedTateSeries {
        GradedTateSeries::from_terms(t, terms.iter().copied())
    }

    #[test]
    fn multiply_examples() {
        let a = s(6, &[(0, 0, 1), (1, 1, 1)]);
        let b = s(6, &[(0, 0, 1), (1, 1, -1)]);
        assert_eq!(a.multiply(&b).unwrap(), s(6, &[(0, 0, 1), (2, 2, -1)]));
        let c = s(6, &[(0, 0, 1), (2, 1, 1)]);
        assert_eq!(c.multiply(&GradedTateSeries::one(6)).unwrap(), c);
        let d = s(6, &[(0, 0, 1), (3, 2, 1)]);
        assert_eq!(
            a.multiply(&d).unwrap(),
            s(6, &[(0, 0, 1), (1, 1, 1), (3, 2, 1), (4, 3, 1)])
        );
        assert!(matches!(
            a.multiply(&GradedTateSeries::one(5)),
            Err(SeriesError::TruncationMismatch(6, 5))
        ));
    }

    #[test]
    fn invert_examples() {
        let a = s(3, &[(0, 0, 1), (1, 1, 1)]);
        assert_eq!(
            a.invert_unit().unwrap(),
            s(3, &[(0, 0, 1), (1, 1, -1), (2, 2, 1), (3, 3, -1)])
        );
        let b = s(6, &[(0, 0, 1), (3, 2, 1)]);
        assert_eq!(
            b.invert_unit().unwrap(),
            s(6, &[(0, 0, 1), (3, 2, -1), (6, 4, 1)])
        );
        assert!(s(3, &[(0, 0, 2)]).invert_unit().is_err());
    }

    #[test]
    fn invert_theorem_denominator() {
        // 1/((1+Lt)(1+L^2t^3)) two ways: inverting the product, and
        // multiplying the two geometric series
        let a = s(4, &[(0, 0, 1), (1, 1, 1)]);
        let b = s(4, &[(0, 0, 1), (3, 2, 1)]);
        let joint = a.multiply(&b).unwrap().invert_unit().unwrap();
        let split = a
            .invert_unit()
            .unwrap()
            .multiply(&b.invert_unit().unwrap())
            .unwrap();
        assert_eq!(joint, split);
        assert_eq!(
            joint,
            s(
                4,
                &[
                    (0, 0, 1),
                    (1, 1, -1),
                    (2, 2, 1),
                    (3, 3, -1),
                    (3, 2, -1),
                    (4, 4, 1),
                    (4, 3, 1)
                ]
            )
        );
    }

    #[test]
    fn evaluate_examples() {
        let a = s(3, &[(0, 0, 1), (1, 1, 1)]);
        assert_eq!(
            a.evaluate_t(-1),
            TatePolynomial::from_terms([(0, 1), (1, -1)])
        );
        assert_eq!(
            GradedTateSeries::one(5).evaluate_t(7),
            TatePolynomial::one()
        );
    }

    #[test]
    fn json_round_trip() {
        let a = s(5, &[(0, 0, 1), (2, -3, 4), (5, 7, -2)]);
        let text = a.to_json();
        assert!(text.contains("L_coeffs"));
        assert_eq!(GradedTateSeries::from_json(&text).unwrap(), a);
    }

    fn series(trunc: usize) -> impl Strategy<Value = GradedTateSeries> {
        prop::collection::vec((0..=trunc, -4i32..8, -1000i128..=1000), 0..12)
            .prop_map(move |terms| GradedTateSeries::from_terms(trunc, terms))
    }

    // small coefficients keep the inverse's growth within i128 up to t^20
    fn unit(trunc: usize) -> impl Strategy<Value = GradedTateSeries> {
        prop::collection::vec((1..=trunc, -4i32..8, -3i128..=3), 0..6)
            .prop_map(move |terms| GradedTateSeries::from_terms(trunc, terms))
            .prop_map(move |mut a| {
                a.terms[0] = TatePolynomial::one();
                a
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn ring_axioms(a in series(12), b in series(12), c in series(12)) {
            let ab = a.multiply(&b).unwrap();
            prop_assert_eq!(&ab, &b.multiply(&a).unwrap());
            prop_assert_eq!(
                ab.multiply(&c).unwrap(),
                a.multiply(&b.multiply(&c).unwrap()).unwrap()
            );
        }

        #[test]
        fn inverse_is_inverse(a in unit(20)) {
            let inv = a.invert_unit().unwrap();
            prop_assert_eq!(a.multiply(&inv).unwrap(), GradedTateSeries::one(20));
        }

        #[test]
        fn evaluation_is_multiplicative(a in series(5), b in series(5), t0 in -2i128..=2) {
            // embed degree <= 5 factors in T = 10 so no cross term is dropped
            let widen = |x: &GradedTateSeries| {
                let mut w = GradedTateSeries::zero(10);
                for k in 0..=5 {
                    for (e, c) in x.coeff_ref(k).terms() {
                        w.add_term(k, e, c);
                    }
                }
                w
            };
            let (wa, wb) = (widen(&a), widen(&b));
            let prod = wa.multiply(&wb).unwrap();
            prop_assert_eq!(prod.evaluate_t(t0), &wa.evaluate_t(t0) * &wb.evaluate_t(t0));
        }
    }
}
