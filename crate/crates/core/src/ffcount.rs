//! Point counts of `[D_{g,l} / G_{g+1-l}]` over prime fields.
//!
//! `D_{g,l}` is the set of triples of binary forms `(alpha, beta, gamma)` of
//! degrees `(l, g+1, 2g+2-l)` with `beta^2 - 4 alpha gamma` square-free.
//! A form of degree `d` is stored as `c_0..c_d` with `c_i` the coefficient
//! of `x^i y^(d-i)`, so multiplying forms is convolving coefficients.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fp::{poly, FieldError, PrimeField};
use crate::qpoly::QPolynomial;
use crate::series::{GradedTateSeries, TatePolynomial};
use crate::symfunc::Partition;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountError {
    #[error("characteristic 2 is not supported")]
    CharacteristicTwo,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("need g >= 2 and 0 <= l <= g + 1, got g = {g}, l = {l}")]
    OutOfRange { g: u32, l: u32 },
    #[error("variant {variant:?} does not act on F_{n}")]
    BadVariant { variant: GroupVariant, n: u32 },
    #[error(
        "enumeration of (g={g}, l={l}, q={q}) needs {work} steps, over the budget of {budget}; \
         feasible (g, q) for l = {l}: {feasible:?}"
    )]
    ResourceBound {
        g: u32,
        l: u32,
        q: u64,
        work: u128,
        budget: u128,
        feasible: Vec<(u32, u64)>,
    },
    #[error("no closed form is printed for g = {g}, l = {l}")]
    NotPrinted { g: u32, l: u32 },
    #[error("the part of alpha dividing delta is not square-free")]
    StratumStructure,
    #[error("Euler window L^{window} needs truncation >= {needed}, have {have}")]
    WindowTooLarge {
        window: usize,
        needed: usize,
        have: usize,
    },
}

fn field(q: u64) -> Result<PrimeField, CountError> {
    if q == 2 {
        return Err(CountError::CharacteristicTwo);
    }
    Ok(PrimeField::new(q)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    pub degree: usize,
    pub coeffs: Vec<u64>,
}

impl BinaryForm {
    pub fn new(degree: usize, coeffs: Vec<u64>) -> Self {
        assert_eq!(
            coeffs.len(),
            degree + 1,
            "form of degree {degree} needs {} coefficients",
            degree + 1
        );
        BinaryForm { degree, coeffs }
    }

    pub fn zero(degree: usize) -> Self {
        BinaryForm::new(degree, vec![0; degree + 1])
    }

    /// The form whose coefficients are the base-`q` digits of `index`.
    pub fn from_index(degree: usize, mut index: u64, q: u64) -> Self {
        let mut coeffs = Vec::with_capacity(degree + 1);
        for _ in 0..=degree {
            coeffs.push(index % q);
            index /= q;
        }
        BinaryForm::new(degree, coeffs)
    }

    pub fn index(&self, q: u64) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * q + c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn mul(&self, other: &BinaryForm, f: &PrimeField) -> BinaryForm {
        let mut out = vec![0; self.degree + other.degree + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        BinaryForm::new(self.degree + other.degree, out)
    }

    pub fn add(&self, other: &BinaryForm, f: &PrimeField) -> BinaryForm {
        assert_eq!(self.degree, other.degree);
        BinaryForm::new(
            self.degree,
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &BinaryForm, f: &PrimeField) -> BinaryForm {
        assert_eq!(self.degree, other.degree);
        BinaryForm::new(
            self.degree,
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        )
    }

    pub fn scale(&self, c: u64, f: &PrimeField) -> BinaryForm {
        BinaryForm::new(
            self.degree,
            self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        )
    }

    /// Multiplicity of the root `[1, 0]` (the point at infinity of `f(x,1)`).
    pub fn multiplicity_at_infinity(&self) -> usize {
        match poly::degree(&self.coeffs) {
            None => self.degree,
            Some(d) => self.degree - d,
        }
    }

    /// `f(x, 1)` as a trimmed polynomial.
    pub fn dehomogenize(&self) -> Vec<u64> {
        poly::trim(self.coeffs.clone())
    }

    /// Exact quotient by `other`, if it divides `self`.
    pub fn div_exact(&self, other: &BinaryForm, f: &PrimeField) -> Option<BinaryForm> {
        if other.is_zero() || other.degree > self.degree {
            return None;
        }
        let (quot, rem) = poly::div_rem(f, &self.dehomogenize(), &other.dehomogenize());
        if !rem.is_empty() {
            return None;
        }
        let deg = self.degree - other.degree;
        if quot.len() > deg + 1 {
            return None;
        }
        let mut coeffs = quot;
        coeffs.resize(deg + 1, 0);
        Some(BinaryForm::new(deg, coeffs))
    }

    /// `f(a1 x + b1 y, a2 x + b2 y)`.
    pub fn substitute(&self, m: [u64; 4], f: &PrimeField) -> BinaryForm {
        let [a1, b1, a2, b2] = m;
        let l1 = BinaryForm::new(1, vec![b1, a1]);
        let l2 = BinaryForm::new(1, vec![b2, a2]);
        let mut out = BinaryForm::zero(self.degree);
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut term = BinaryForm::new(0, vec![c]);
            for _ in 0..i {
                term = term.mul(&l1, f);
            }
            for _ in i..self.degree {
                term = term.mul(&l2, f);
            }
            out = out.add(&term, f);
        }
        out
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let j = self.degree - i;
            let mono = match (i, j) {
                (0, 0) => String::new(),
                (i, 0) => format!("x^{i}"),
                (0, j) => format!("y^{j}"),
                (i, j) => format!("x^{i}y^{j}"),
            };
            terms.push(if c == 1 && !mono.is_empty() {
                mono
            } else {
                format!("{c}{mono}")
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

fn squarefree_coeffs(coeffs: &[u64], degree: usize, f: &PrimeField) -> bool {
    let Some(d) = poly::degree(coeffs) else {
        return false;
    };
    if degree - d > 1 {
        return false;
    }
    let p = &coeffs[..=d];
    if d == 0 {
        return true;
    }
    let dp = poly::derivative(f, p);
    if dp.is_empty() {
        return false;
    }
    poly::degree(&poly::gcd(f, p, &dp)) == Some(0)
}

/// `(alpha, beta, gamma)` of degrees `(l, g+1, 2g+2-l)`, the equation
/// `alpha z^2 + beta z + gamma`.
pub type SectionTriple = [BinaryForm; 3];

/// No repeated root on `P^1` over the algebraic closure.
pub fn is_squarefree(form: &BinaryForm, q: u64) -> Result<bool, CountError> {
    let f = field(q)?;
    Ok(squarefree_coeffs(&form.coeffs, form.degree, &f))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GroupVariant {
    Full,
    G0,
    G0Prime,
}

impl GroupVariant {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Some(GroupVariant::Full),
            "g0" => Some(GroupVariant::G0),
            "g0prime" | "g0'" => Some(GroupVariant::G0Prime),
            _ => None,
        }
    }
}

pub fn gl2_order(q: u64) -> u128 {
    let q = q as u128;
    (q * q - 1) * (q * q - q)
}

/// Order of the group acting on sections over `F_n`.
pub fn group_order(n: u32, q: u64, variant: GroupVariant) -> Result<u128, CountError> {
    field(q)?;
    let gl = gl2_order(q);
    let qq = q as u128;
    match (variant, n) {
        (GroupVariant::Full, n) if n > 0 => Ok(gl * (qq - 1) * qq.pow(n + 1)),
        (GroupVariant::G0, 0) => Ok(gl * gl / (qq - 1)),
        (GroupVariant::G0Prime, 0) => Ok(qq * (qq - 1) * gl),
        (variant, n) => Err(CountError::BadVariant { variant, n }),
    }
}

/// `delta^2_g`: 1 for odd `g`, 0 for even.
pub fn delta2(g: u32) -> i128 {
    (g % 2) as i128
}

/// `[q^{2g} (q^6+2q^5+2q^4+2q^3+q^2+1) / ((q^2+1)(q+1))]`, remainder discarded.
pub fn stable_part_l4(g: u32) -> QPolynomial {
    let num =
        &QPolynomial::monomial(1, 2 * g as usize) * &QPolynomial::new(vec![1, 0, 1, 2, 2, 2, 1]);
    let den = QPolynomial::new(vec![1, 1, 1, 1]);
    num.div_rem_monic(&den).0
}

/// Unstable part for `l = 4`, printed only for `g = 0 mod 12`.
pub fn unstable_part_l4(g: u32) -> Result<QPolynomial, CountError> {
    if g % 12 != 0 {
        return Err(CountError::NotPrinted { g, l: 4 });
    }
    let g = g as i128;
    Ok(QPolynomial::new(vec![
        -6 * g * g + 5 * g,
        3 * g * g - 4 * g - 1,
        6 * g * g - g - 1,
        -3 * g * g - g,
    ]))
}

/// The printed count of `H_{F_{g+1-l}, g}` (or of `H'_{F_0, g}` when
/// `l = g + 1` and `g` is 3 or 4) as a polynomial in `q`.
pub fn closed_form_count(g: u32, l: u32) -> Result<QPolynomial, CountError> {
    let q1 = QPolynomial::new(vec![1, 1]);
    let qpow = |e: u32| QPolynomial::monomial(1, e as usize);
    let d = QPolynomial::constant(delta2(g));
    if g < 2 {
        return Err(CountError::OutOfRange { g, l });
    }
    if l == g + 1 && (g == 3 || g == 4) {
        return Ok(match g {
            3 => &qpow(8) * &q1,
            _ => &(&q1 * &qpow(2)) * &QPolynomial::new(vec![-1, -1, -1, 1, 0, 0, 0, 0, 0, 1]),
        });
    }
    match l {
        0 => Ok(qpow(2 * g - 1)),
        1 => Ok(&q1 * &qpow(2 * g - 1)),
        2 => Ok(&(&q1 * &qpow(2 * g)) - &d),
        3 => Ok(&q1 * &(&qpow(2 * g + 1) - &d)),
        4 => Ok(&stable_part_l4(g) + &unstable_part_l4(g)?),
        _ => Err(CountError::NotPrinted { g, l }),
    }
}

/// Stable part `Q_{g,l}` used by the Euler identity; `l = 1..=4`.
pub fn stable_count_polynomial(g: u32, l: u32) -> Result<QPolynomial, CountError> {
    match l {
        1..=3 => closed_form_count(g, l),
        4 => Ok(stable_part_l4(g)),
        _ => Err(CountError::NotPrinted { g, l }),
    }
}

/// Budget for enumeration work, counted in coset lookups.
pub const DEFAULT_BUDGET: u128 = 2_000_000_000;

fn check_range(g: u32, l: u32) -> Result<(), CountError> {
    if g < 2 || l > g + 1 {
        return Err(CountError::OutOfRange { g, l });
    }
    Ok(())
}

/// Lookups needed by the coset enumeration: `q^{2g+4+l}` plus the table.
pub fn enumeration_work(g: u32, l: u32, q: u64) -> u128 {
    let q = q as u128;
    q.pow(2 * g + 4 + l) + q.pow(2 * g + 3)
}

fn feasible_grid(l: u32, budget: u128) -> Vec<(u32, u64)> {
    let mut out = Vec::new();
    for g in 2..=8u32 {
        if l > g + 1 {
            continue;
        }
        for q in [3u64, 5, 7, 11, 13] {
            if enumeration_work(g, l, q) <= budget {
                out.push((g, q));
            }
        }
    }
    out
}

/// Square-free table for forms of degree `d`, as a bitset over indices.
fn squarefree_table(d: usize, f: &PrimeField) -> Vec<u64> {
    let q = f.p();
    let size = q.pow(d as u32 + 1);
    let words = size.div_ceil(64);
    (0..words)
        .into_par_iter()
        .map(|w| {
            let mut bits = 0u64;
            for b in 0..64 {
                let idx = w * 64 + b;
                if idx >= size {
                    break;
                }
                let form = BinaryForm::from_index(d, idx, q);
                if squarefree_coeffs(&form.coeffs, d, f) {
                    bits |= 1 << b;
                }
            }
            bits
        })
        .collect()
}

#[inline]
fn bit(table: &[u64], idx: u64) -> bool {
    table[(idx / 64) as usize] >> (idx % 64) & 1 == 1
}

/// Representatives of `V_{g+1} / alpha V_n`: forms vanishing at the pivot
/// positions of an echelon basis of `alpha V_n`.
fn beta_representatives(alpha: &BinaryForm, n: usize, g: u32, f: &PrimeField) -> Vec<BinaryForm> {
    let q = f.p();
    let deg = g as usize + 1;
    let mut rows: Vec<Vec<u64>> = (0..=n)
        .map(|i| {
            let mut e = vec![0; n + 1];
            e[i] = 1;
            alpha.mul(&BinaryForm::new(n, e), f).coeffs
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..=deg {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = f.inv(rows[r][col]);
        for c in 0..=deg {
            rows[r][c] = f.mul(rows[r][c], inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let factor = rows[i][col];
                for c in 0..=deg {
                    let sub = f.mul(factor, rows[r][c]);
                    rows[i][c] = f.sub(rows[i][c], sub);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..=deg).filter(|c| !pivots.contains(c)).collect();
    let count = q.pow(free.len() as u32);
    (0..count)
        .map(|mut idx| {
            let mut coeffs = vec![0; deg + 1];
            for &c in &free {
                coeffs[c] = idx % q;
                idx /= q;
            }
            BinaryForm::new(deg, coeffs)
        })
        .collect()
}

struct Layout {
    g: u32,
    l: u32,
    n: u32,
    f: PrimeField,
}

impl Layout {
    fn new(g: u32, l: u32, q: u64) -> Result<Self, CountError> {
        check_range(g, l)?;
        Ok(Layout {
            g,
            l,
            n: g + 1 - l,
            f: field(q)?,
        })
    }

    fn q(&self) -> u64 {
        self.f.p()
    }

    fn gamma_degree(&self) -> usize {
        (2 * self.g + 2 - self.l) as usize
    }

    fn delta_degree(&self) -> usize {
        (2 * self.g + 2) as usize
    }
}

/// Calls `visit(alpha, beta, delta, weight)` once per coset class of
/// members of `D_{g,l}`, where `weight` is the class size.
fn for_each_member_class<T: Send>(
    lay: &Layout,
    table: &[u64],
    init: impl Fn(&BinaryForm) -> T + Sync,
    visit: impl Fn(&mut T, &BinaryForm, &[u64], u64) + Sync,
) -> Vec<T> {
    let q = lay.q();
    let f = &lay.f;
    let class_size = q.pow(lay.n + 1);
    let gd = lay.gamma_degree();
    let dd = lay.delta_degree();
    let gammas = q.pow(gd as u32 + 1);
    let four = f.from_i64(4);
    (1..q.pow(lay.l + 1))
        .into_par_iter()
        .map(|ai| {
            let alpha = BinaryForm::from_index(lay.l as usize, ai, q);
            let mut acc = init(&alpha);
            let four_alpha = alpha.scale(four, f);
            let products: Vec<Vec<u64>> = (0..gammas)
                .map(|gi| four_alpha.mul(&BinaryForm::from_index(gd, gi, q), f).coeffs)
                .collect();
            let mut delta = vec![0u64; dd + 1];
            for beta in beta_representatives(&alpha, lay.n as usize, lay.g, f) {
                let b2 = beta.mul(&beta, f).coeffs;
                for prod in &products {
                    let mut idx = 0u64;
                    for i in (0..=dd).rev() {
                        let c = f.sub(b2[i], prod[i]);
                        delta[i] = c;
                        idx = idx * q + c;
                    }
                    if bit(table, idx) {
                        visit(&mut acc, &alpha, &delta, class_size);
                    }
                }
            }
            acc
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountRecord {
    pub g: u32,
    pub l: u32,
    pub q: u64,
    pub method: String,
    pub variant: GroupVariant,
    pub raw_count: u128,
    pub group_order: u128,
    #[serde(serialize_with = "ratio_string")]
    pub stack_count: Ratio<u128>,
    /// `q = 1 mod n` for `n = g + 1 - l >= 3`; vacuous otherwise.
    pub roots_of_unity: bool,
}

fn ratio_string<S: serde::Serializer>(r: &Ratio<u128>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl CountRecord {
    pub fn n(&self) -> u32 {
        self.g + 1 - self.l
    }

    pub fn stack_integer(&self) -> Option<u128> {
        self.stack_count
            .is_integer()
            .then(|| self.stack_count.to_integer())
    }
}

/// Default variant: the full group for `l <= g`, `G0'` for `l = g + 1`.
pub fn default_variant(g: u32, l: u32) -> GroupVariant {
    if l == g + 1 {
        GroupVariant::G0Prime
    } else {
        GroupVariant::Full
    }
}

fn record(
    g: u32,
    l: u32,
    q: u64,
    method: &str,
    variant: GroupVariant,
    raw: u128,
) -> Result<CountRecord, CountError> {
    let n = g + 1 - l;
    let order = group_order(n, q, variant)?;
    Ok(CountRecord {
        g,
        l,
        q,
        method: method.to_string(),
        variant,
        raw_count: raw,
        group_order: order,
        stack_count: Ratio::new(raw, order),
        roots_of_unity: n < 3 || q % n as u64 == 1,
    })
}

/// Counts `D_{g,l}(F_q)` by the coset method and divides by the group order.
pub fn enumerate_count(
    g: u32,
    l: u32,
    q: u64,
    variant: GroupVariant,
    budget: u128,
) -> Result<CountRecord, CountError> {
    let lay = Layout::new(g, l, q)?;
    group_order(lay.n, q, variant)?;
    let work = enumeration_work(g, l, q);
    if work > budget {
        return Err(CountError::ResourceBound {
            g,
            l,
            q,
            work,
            budget,
            feasible: feasible_grid(l, budget),
        });
    }
    let table = squarefree_table(lay.delta_degree(), &lay.f);
    // alpha = 0 leaves delta = beta^2, never square-free
    debug_assert!((0..q.pow(g + 2)).all(|bi| {
        let b = BinaryForm::from_index(g as usize + 1, bi, q);
        !bit(&table, b.mul(&b, &lay.f).index(q))
    }));
    let parts = for_each_member_class(&lay, &table, |_| 0u128, |acc, _, _, w| *acc += w as u128);
    record(g, l, q, "brute", variant, parts.into_iter().sum())
}

/// Record for the printed count, with `raw = formula * |G|`.
pub fn formula_count(
    g: u32,
    l: u32,
    q: u64,
    variant: GroupVariant,
) -> Result<CountRecord, CountError> {
    check_range(g, l)?;
    let value = closed_form_count(g, l)?.eval(q as i128);
    let order = group_order(g + 1 - l, q, variant)?;
    let value = u128::try_from(value).map_err(|_| CountError::NotPrinted { g, l })?;
    record(g, l, q, "formula", variant, value * order)
}

/// Triple loop over all `(alpha, beta, gamma)`; the oracle for small sizes.
pub fn naive_count(
    g: u32,
    l: u32,
    q: u64,
    variant: GroupVariant,
) -> Result<CountRecord, CountError> {
    let raw = naive_members(g, l, q)?.len() as u128;
    record(g, l, q, "naive", variant, raw)
}

/// All members of `D_{g,l}(F_q)`, by the triple loop.
pub fn naive_members(g: u32, l: u32, q: u64) -> Result<Vec<SectionTriple>, CountError> {
    let lay = Layout::new(g, l, q)?;
    let f = lay.f;
    let (la, lb, lc) = (l as usize, g as usize + 1, lay.gamma_degree());
    let four = f.from_i64(4);
    let members: Vec<Vec<SectionTriple>> = (0..q.pow(l + 1))
        .into_par_iter()
        .map(|ai| {
            let alpha = BinaryForm::from_index(la, ai, q);
            let mut out = Vec::new();
            for bi in 0..q.pow(lb as u32 + 1) {
                let beta = BinaryForm::from_index(lb, bi, q);
                let b2 = beta.mul(&beta, &f);
                for ci in 0..q.pow(lc as u32 + 1) {
                    let gamma = BinaryForm::from_index(lc, ci, q);
                    let delta = b2.sub(&alpha.mul(&gamma, &f).scale(four, &f), &f);
                    if squarefree_coeffs(&delta.coeffs, delta.degree, &f) {
                        assert!(!alpha.is_zero(), "alpha = 0 in D_{{g,l}}");
                        out.push([alpha.clone(), beta.clone(), gamma]);
                    }
                }
            }
            out
        })
        .collect();
    Ok(members.into_iter().flatten().collect())
}

/// `(alpha, beta, gamma) -> (alpha, beta, beta^2 - 4 alpha gamma)`.
pub fn psi(t: &SectionTriple, q: u64) -> Result<SectionTriple, CountError> {
    let f = field(q)?;
    let [a, b, c] = t;
    let delta = b.mul(b, &f).sub(&a.mul(c, &f).scale(f.from_i64(4), &f), &f);
    Ok([a.clone(), b.clone(), delta])
}

/// `(alpha, beta, delta) -> (alpha, beta, (beta^2 - delta) / (4 alpha))`.
pub fn psi_inverse(t: &SectionTriple, q: u64) -> Result<Option<SectionTriple>, CountError> {
    let f = field(q)?;
    let [a, b, d] = t;
    let num = b.mul(b, &f).sub(d, &f);
    Ok(num
        .div_exact(&a.scale(f.from_i64(4), &f), &f)
        .map(|gamma| [a.clone(), b.clone(), gamma]))
}

fn monic_irreducibles(max_degree: usize, f: &PrimeField) -> Vec<Vec<u64>> {
    let q = f.p();
    let mut out = Vec::new();
    for d in 1..=max_degree {
        for idx in 0..q.pow(d as u32) {
            let mut p: Vec<u64> = (0..d).map(|i| idx / q.pow(i as u32) % q).collect();
            p.push(1);
            if poly::is_irreducible(f, &p) {
                out.push(p);
            }
        }
    }
    out
}

/// Irreducible factors of a nonzero form with multiplicities; `None` as
/// the factor stands for `y` (the root at infinity).
fn factor_form(
    form: &BinaryForm,
    irreducibles: &[Vec<u64>],
    f: &PrimeField,
) -> Vec<(Option<Vec<u64>>, usize)> {
    let mut out = Vec::new();
    let inf = form.multiplicity_at_infinity();
    if inf > 0 {
        out.push((None, inf));
    }
    let mut rest = form.dehomogenize();
    for p in irreducibles {
        if poly::degree(&rest).unwrap_or(0) < poly::degree(p).unwrap() {
            break;
        }
        let mut e = 0;
        loop {
            let (quot, rem) = poly::div_rem(f, &rest, p);
            if !rem.is_empty() {
                break;
            }
            rest = quot;
            e += 1;
        }
        if e > 0 {
            out.push((Some(p.clone()), e));
        }
    }
    debug_assert_eq!(poly::degree(&rest), Some(0));
    out
}

/// Stratum label: `m` and the multiplicity type `lambda` of the part of
/// `alpha` coprime to `delta`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Stratum {
    pub m: u32,
    pub lambda: Partition,
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.lambda.parts().iter().map(|p| p.to_string()).collect();
        write!(f, "m={} lambda=[{}]", self.m, parts.join(","))
    }
}

fn classify(
    factors: &[(Option<Vec<u64>>, usize)],
    delta: &[u64],
    f: &PrimeField,
) -> Result<Stratum, CountError> {
    let mut m = 0;
    let mut parts = Vec::new();
    for (p, e) in factors {
        let (deg, divides) = match p {
            None => (1, delta[delta.len() - 1] == 0),
            Some(p) => (p.len() - 1, poly::rem(f, delta, p).is_empty()),
        };
        if divides {
            if *e != 1 {
                return Err(CountError::StratumStructure);
            }
            m += deg as u32;
        } else {
            // lambda_e collects degree `deg`, i.e. `deg` parts equal to `e`
            parts.extend(std::iter::repeat(*e as u32).take(deg));
        }
    }
    Ok(Stratum {
        m,
        lambda: Partition::new(parts),
    })
}

/// Raw counts of `D_{g,l}(F_q)` per stratum `(m, lambda)`.
pub fn stratified_count(
    g: u32,
    l: u32,
    q: u64,
    budget: u128,
) -> Result<BTreeMap<Stratum, u128>, CountError> {
    let lay = Layout::new(g, l, q)?;
    let work = enumeration_work(g, l, q);
    if work > budget {
        return Err(CountError::ResourceBound {
            g,
            l,
            q,
            work,
            budget,
            feasible: feasible_grid(l, budget),
        });
    }
    let f = lay.f;
    let table = squarefree_table(lay.delta_degree(), &f);
    let irreducibles = monic_irreducibles(l as usize, &f);
    type Acc = (
        Vec<(Option<Vec<u64>>, usize)>,
        BTreeMap<Stratum, u128>,
        bool,
    );
    let parts: Vec<Acc> = for_each_member_class(
        &lay,
        &table,
        |alpha| {
            (
                factor_form(alpha, &irreducibles, &f),
                BTreeMap::new(),
                false,
            )
        },
        |acc, _, delta, w| match classify(&acc.0, delta, &f) {
            Ok(s) => *acc.1.entry(s).or_insert(0) += w as u128,
            Err(_) => acc.2 = true,
        },
    );
    let mut out = BTreeMap::new();
    for (_, counts, bad) in parts {
        if bad {
            return Err(CountError::StratumStructure);
        }
        for (s, c) in counts {
            *out.entry(s).or_insert(0) += c;
        }
    }
    Ok(out)
}

/// Stratum of a single member.
pub fn stratum_of(t: &SectionTriple, q: u64) -> Result<Stratum, CountError> {
    let f = field(q)?;
    let [a, _, _] = t;
    let [_, _, delta] = psi(t, q)?;
    let irreducibles = monic_irreducibles(a.degree, &f);
    classify(&factor_form(a, &irreducibles, &f), &delta.coeffs, &f)
}

/// A group element `x -> a1 x + b1 y, y -> a2 x + b2 y, z -> c z + eps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub matrix: [u64; 4],
    pub c: u64,
    pub eps: BinaryForm,
}

impl GroupElement {
    pub fn random(n: usize, q: u64, rng: &mut impl Rng) -> Self {
        loop {
            let m = [0; 4].map(|_| rng.gen_range(0..q));
            let det = (m[0] * m[3] + q * q - m[1] * m[2] % q) % q;
            let c = rng.gen_range(1..q);
            if det != 0 {
                let eps = BinaryForm::new(n, (0..=n).map(|_| rng.gen_range(0..q)).collect());
                return GroupElement { matrix: m, c, eps };
            }
        }
    }

    /// Image of `alpha z^2 + beta z + gamma`.
    pub fn apply(&self, t: &SectionTriple, q: u64) -> Result<SectionTriple, CountError> {
        let f = field(q)?;
        let [a, b, c] = t;
        let a1 = a.substitute(self.matrix, &f);
        let b1 = b.substitute(self.matrix, &f);
        let c1 = c.substitute(self.matrix, &f);
        let e = &self.eps;
        let alpha = a1.scale(f.mul(self.c, self.c), &f);
        let beta = b1.add(&a1.mul(e, &f).scale(2, &f), &f).scale(self.c, &f);
        let gamma = a1
            .mul(&e.mul(e, &f), &f)
            .add(&b1.mul(e, &f), &f)
            .add(&c1, &f);
        Ok([alpha, beta, gamma])
    }
}

/// Applies `samples` random group elements to every member of
/// `D_{g,l}(F_q)`; each image must lie in `D_{g,l}` and each element must
/// act injectively. Returns the number of elements checked.
pub fn check_group_invariance(
    g: u32,
    l: u32,
    q: u64,
    samples: usize,
    seed: u64,
) -> Result<usize, CountError> {
    let members = naive_members(g, l, q)?;
    let f = field(q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let sigma = GroupElement::random((g + 1 - l) as usize, q, &mut rng);
        let mut seen = HashSet::with_capacity(members.len());
        for t in &members {
            let img = sigma.apply(t, q)?;
            let [_, _, delta] = psi(&img, q)?;
            assert!(
                squarefree_coeffs(&delta.coeffs, delta.degree, &f),
                "image left D_{{g,l}}"
            );
            seen.insert(img);
        }
        assert_eq!(seen.len(), members.len(), "group element not injective");
    }
    Ok(samples)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerRow {
    pub exponent: i32,
    pub lhs: i128,
    pub rhs: i128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerReport {
    pub l: u32,
    pub window: usize,
    pub rows: Vec<EulerRow>,
    pub passed: bool,
}

/// Compares `(1 + L) P^st(-1)` with `L^{2g-1+l} Q_{g,l}(L^{-1})` on the
/// exponents `0..=ceil(3l/2)`, for `g` large enough that no `g`-dependent
/// term reaches the window.
pub fn euler_identity_check(l: u32, stable: &GradedTateSeries) -> Result<EulerReport, CountError> {
    if !(1..=4).contains(&l) {
        return Err(CountError::NotPrinted { g: 0, l });
    }
    let window = (3 * l as usize).div_ceil(2);
    // H^k has weights >= k, so L^e only comes from t^k with k <= 2e
    if stable.truncation() < 2 * window {
        return Err(CountError::WindowTooLarge {
            window,
            needed: 2 * window,
            have: stable.truncation(),
        });
    }
    let lhs = &TatePolynomial::from_terms([(0, 1), (1, 1)]) * &stable.evaluate_t(-1);
    let g = 12 * (window as u32 + 2);
    let qpoly = stable_count_polynomial(g, l)?;
    let top = (2 * g - 1 + l) as usize;
    let rows: Vec<EulerRow> = (0..=window as i32)
        .map(|e| EulerRow {
            exponent: e,
            lhs: lhs.coeff(e),
            rhs: qpoly.coeff(top - e as usize),
        })
        .collect();
    let passed = rows.iter().all(|r| r.lhs == r.rhs);
    Ok(EulerReport {
        l,
        window,
        rows,
        passed,
    })
}

/// CSV header for [`CountRecord`] rows.
pub const CSV_HEADER: &str = "g,l,q,method,raw,group,stack,formula,match";

/// One CSV row; `formula` is the printed count at `q` when available.
pub fn csv_row(r: &CountRecord) -> String {
    let formula = closed_form_count(r.g, r.l)
        .ok()
        .map(|p| p.eval(r.q as i128));
    let matches = match (formula, r.stack_integer()) {
        (Some(fv), Some(s)) => (fv == s as i128).to_string(),
        (Some(_), None) => "false".to_string(),
        (None, _) => String::new(),
    };
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.g,
        r.l,
        r.q,
        r.method,
        r.raw_count,
        r.group_order,
        r.stack_count,
        formula.map(|v| v.to_string()).unwrap_or_default(),
        matches
    )
}
