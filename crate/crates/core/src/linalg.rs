//! Exact rank checks for the spaces of sections singular at a configuration.
//!
//! Sections of `2E_n + dF_n` are `alpha z^2 + beta z + gamma` with
//! `deg alpha = d - 2n`, `deg beta = d - n`, `deg gamma = d`, stored as
//! coefficient vectors over the monomials `x^a y^b z^c`. Singularity at a
//! point is three linear conditions on that vector; the fiber of the
//! incidence variety over a configuration is their common kernel.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fp::is_prime;
use crate::spectral::ConfigurationType;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("need d >= 2n >= 0, got d = {d}, n = {n}")]
    BadSurface { d: i64, n: i64 },
    #[error("point has all coordinates zero")]
    DegenerateCoordinates,
    #[error("rows have inconsistent lengths")]
    RaggedRows,
    #[error("{p} is not an odd prime")]
    NotOddPrime { p: u64 },
    #[error("prime {p} is not 1 mod {n}; F_p lacks the n-th roots of unity")]
    NoRootsOfUnity { p: u64, n: i64 },
    #[error("type {ty} needs d >= max(k1+k2+5h/3+n-1, 2k1+2k2+h+2n-1) = {bound}, got d = {d}")]
    BelowBound {
        ty: ConfigurationType,
        d: i64,
        bound: String,
    },
    #[error("type {0} is empty")]
    EmptyType(ConfigurationType),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionSpace {
    pub d: i64,
    pub n: i64,
    basis: Vec<Monomial>,
}

impl SectionSpace {
    pub fn new(d: i64, n: i64) -> Result<Self, LinalgError> {
        if n < 0 || d < 2 * n {
            return Err(LinalgError::BadSurface { d, n });
        }
        let mut basis = Vec::new();
        for c in 0..=2u32 {
            let deg = (d - c as i64 * n) as u32;
            for a in (0..=deg).rev() {
                basis.push(Monomial { a, b: deg - a, c });
            }
        }
        Ok(SectionSpace { d, n, basis })
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn expected_dimension(&self) -> i64 {
        3 * self.d - 3 * self.n + 3
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }
}

/// A point of `F_n`. Off `E_n` it is `[x, y, z]` in `P(1,1,n)` (with
/// `(x, y) != 0`), lying on the ruling line `[x, y]`; on `E_n` it is the
/// direction `[u, v]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointOnSurface {
    OnExceptional { u: BigInt, v: BigInt },
    OffExceptional { x: BigInt, y: BigInt, z: BigInt },
}

impl PointOnSurface {
    pub fn on_exceptional(u: i64, v: i64) -> Result<Self, LinalgError> {
        if u == 0 && v == 0 {
            return Err(LinalgError::DegenerateCoordinates);
        }
        Ok(PointOnSurface::OnExceptional {
            u: u.into(),
            v: v.into(),
        })
    }

    pub fn off_exceptional(x: i64, y: i64, z: i64) -> Result<Self, LinalgError> {
        if x == 0 && y == 0 {
            return Err(LinalgError::DegenerateCoordinates);
        }
        Ok(PointOnSurface::OffExceptional {
            x: x.into(),
            y: y.into(),
            z: z.into(),
        })
    }

    /// Ruling line through the point, normalized so the first nonzero
    /// coordinate is one; as a reduced fraction pair.
    pub fn ruling_line(&self) -> (BigInt, BigInt) {
        let (a, b) = match self {
            PointOnSurface::OnExceptional { u, v } => (u.clone(), v.clone()),
            PointOnSurface::OffExceptional { x, y, .. } => (x.clone(), y.clone()),
        };
        let g = a.gcd(&b);
        let (mut a, mut b) = (a / &g, b / &g);
        if a.is_negative() || (a.is_zero() && b.is_negative()) {
            a = -a;
            b = -b;
        }
        (a, b)
    }
}

fn pow(base: &BigInt, e: u32) -> BigInt {
    num_traits::pow(base.clone(), e as usize)
}

/// `d/dvar (x^a y^b z^c)` evaluated at `(x, y, z)`.
fn partial(m: &Monomial, var: usize, x: &BigInt, y: &BigInt, z: &BigInt) -> BigInt {
    let (a, b, c) = (m.a, m.b, m.c);
    match var {
        0 if a > 0 => BigInt::from(a) * pow(x, a - 1) * pow(y, b) * pow(z, c),
        1 if b > 0 => BigInt::from(b) * pow(x, a) * pow(y, b - 1) * pow(z, c),
        2 if c > 0 => BigInt::from(c) * pow(x, a) * pow(y, b) * pow(z, c - 1),
        _ => BigInt::zero(),
    }
}

/// Three linear functionals whose common zeros on `S` are the sections
/// singular at `p`.
///
/// Off `E_n` these are the three partials of `f`. On `E_n`, in the chart
/// `alpha(1,v) + beta(1,v) w + gamma(1,v) w^2`, they are the two partials
/// of `alpha` and `beta` itself; when `alpha` is a constant its partials
/// vanish identically and `alpha` is used instead of the first one.
pub fn singularity_rows(p: &PointOnSurface, s: &SectionSpace) -> Vec<Vec<BigInt>> {
    let basis = s.basis();
    match p {
        PointOnSurface::OffExceptional { x, y, z } => (0..3)
            .map(|var| basis.iter().map(|m| partial(m, var, x, y, z)).collect())
            .collect(),
        PointOnSurface::OnExceptional { u, v } => {
            let one = BigInt::one();
            let alpha_const = s.d == 2 * s.n;
            let r0 = basis
                .iter()
                .map(|m| match (m.c, alpha_const) {
                    (2, true) => BigInt::one(),
                    (2, false) => partial(&Monomial { c: 0, ..*m }, 0, u, v, &one),
                    _ => BigInt::zero(),
                })
                .collect();
            let r1 = basis
                .iter()
                .map(|m| match m.c {
                    2 => partial(&Monomial { c: 0, ..*m }, 1, u, v, &one),
                    _ => BigInt::zero(),
                })
                .collect();
            let r2 = basis
                .iter()
                .map(|m| match m.c {
                    1 => pow(u, m.a) * pow(v, m.b),
                    _ => BigInt::zero(),
                })
                .collect();
            vec![r0, r1, r2]
        }
    }
}

/// All singularity rows of a configuration, stacked.
pub fn configuration_rows(points: &[PointOnSurface], s: &SectionSpace) -> Vec<Vec<BigInt>> {
    points.iter().flat_map(|p| singularity_rows(p, s)).collect()
}

fn check_rows<T>(rows: &[Vec<T>], ncols: usize) -> Result<(), LinalgError> {
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(LinalgError::RaggedRows);
    }
    Ok(())
}

/// Rank over `Q` by fraction-free (Bareiss) elimination.
pub fn rank_rational(rows: &[Vec<BigInt>], ncols: usize) -> Result<usize, LinalgError> {
    check_rows(rows, ncols)?;
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let nrows = m.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        for r in rank + 1..nrows {
            for c in col + 1..ncols {
                let v = (&m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c]) / &prev;
                m[r][c] = v;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    Ok(rank)
}

/// Rank over `F_p` after reducing the integer rows.
pub fn rank_mod_p(rows: &[Vec<BigInt>], ncols: usize, p: u64) -> Result<usize, LinalgError> {
    check_rows(rows, ncols)?;
    if p == 2 || !is_prime(p) {
        return Err(LinalgError::NotOddPrime { p });
    }
    let pb = BigInt::from(p);
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    let (_, digits) = x.mod_floor(&pb).to_u64_digits();
                    digits.first().copied().unwrap_or(0)
                })
                .collect()
        })
        .collect();
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let inv = |a: u64| {
        let (mut base, mut e, mut acc) = (a, p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            e >>= 1;
        }
        acc
    };
    let nrows = m.len();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let scale = inv(m[rank][col]);
        for c in col..ncols {
            m[rank][c] = mul(m[rank][c], scale);
        }
        for r in rank + 1..nrows {
            let f = m[r][col];
            if f == 0 {
                continue;
            }
            for c in col..ncols {
                let sub = mul(f, m[rank][c]);
                m[r][c] = (m[r][c] + p - sub) % p;
            }
        }
        rank += 1;
    }
    Ok(rank)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WorkingField {
    Rational,
    Prime(u64),
}

/// Dimension of the common kernel of `rows` in a space of dimension `ncols`.
pub fn kernel_dimension(
    rows: &[Vec<BigInt>],
    ncols: usize,
    field: WorkingField,
) -> Result<usize, LinalgError> {
    let rank = match field {
        WorkingField::Rational => rank_rational(rows, ncols)?,
        WorkingField::Prime(p) => rank_mod_p(rows, ncols, p)?,
    };
    Ok(ncols - rank)
}

/// Smallest prime above `max(2d, floor)` that is 1 mod `n` when `n >= 3`.
pub fn default_prime(d: i64, n: i64) -> u64 {
    let mut p = (2 * d).max(1_000_000) as u64 + 1;
    loop {
        if is_prime(p) && p != 2 && (n < 3 || p % n as u64 == 1) {
            return p;
        }
        p += 1;
    }
}

/// Whether `d` satisfies `d >= max(k1+k2+5h/3+n-1, 2k1+2k2+h+2n-1)`.
pub fn satisfies_bound(c: &ConfigurationType, d: i64, n: i64) -> bool {
    let (k1, k2, h) = (c.k1 as i64, c.k2 as i64, c.h as i64);
    3 * d >= 3 * (k1 + k2 + n - 1) + 5 * h && d >= 2 * k1 + 2 * k2 + h + 2 * n - 1
}

/// Smallest `d` satisfying the bound for `c` on `F_n` (and `d >= 2n`).
pub fn minimal_degree(c: &ConfigurationType, n: i64) -> i64 {
    let mut d = 2 * n;
    while !satisfies_bound(c, d, n) {
        d += 1;
    }
    d
}

/// A random configuration of type `c` with integer coordinates. Ruling
/// lines are `[1, t]` with distinct slopes; points on a shared line have
/// distinct `z`.
pub fn sample_configuration(c: &ConfigurationType, rng: &mut impl Rng) -> Vec<PointOnSurface> {
    let lines = c.lines() as usize;
    let box_size = 4 * lines as i64 + 8;
    let mut slopes: Vec<i64> = Vec::with_capacity(lines);
    while slopes.len() < lines {
        let t = rng.gen_range(-box_size..=box_size);
        if !slopes.contains(&t) {
            slopes.push(t);
        }
    }
    let mut z = || rng.gen_range(-box_size..=box_size);
    let mut points = Vec::with_capacity(c.points() as usize);
    let mut it = slopes.into_iter();
    for _ in 0..c.k1 {
        points.push(PointOnSurface::on_exceptional(1, it.next().unwrap()).unwrap());
    }
    for _ in 0..c.k2 {
        points.push(PointOnSurface::off_exceptional(1, it.next().unwrap(), z()).unwrap());
    }
    for _ in 0..c.h {
        let t = it.next().unwrap();
        let z1 = z();
        let mut z2 = z();
        while z2 == z1 {
            z2 = z();
        }
        points.push(PointOnSurface::off_exceptional(1, t, z1).unwrap());
        points.push(PointOnSurface::off_exceptional(1, t, z2).unwrap());
    }
    points
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialFailure {
    pub trial: u64,
    pub kernel_dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BundleRankReport {
    #[serde(rename = "type")]
    pub ty: ConfigurationType,
    pub d: i64,
    pub n: i64,
    pub v: i64,
    pub expected_rank: i64,
    pub trials: u64,
    pub failures: Vec<TrialFailure>,
    pub seed: u64,
    pub field: WorkingField,
}

impl BundleRankReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Kernel dimension for a single sampled configuration.
pub fn trial_kernel_dimension(
    c: &ConfigurationType,
    s: &SectionSpace,
    seed: u64,
    trial: u64,
    field: WorkingField,
) -> Result<usize, LinalgError> {
    let mut rng = trial_rng(seed, trial);
    let points = sample_configuration(c, &mut rng);
    let rows = configuration_rows(&points, s);
    kernel_dimension(&rows, s.dimension(), field)
}

/// Samples `trials` configurations of type `c` and checks that each fiber
/// has dimension `v - codim(c)`.
pub fn verify_bundle_rank(
    c: &ConfigurationType,
    d: i64,
    n: i64,
    trials: u64,
    seed: u64,
    field: WorkingField,
) -> Result<BundleRankReport, LinalgError> {
    if !c.is_valid() {
        return Err(LinalgError::EmptyType(*c));
    }
    let s = SectionSpace::new(d, n)?;
    if !satisfies_bound(c, d, n) {
        let (k1, k2, h) = (c.k1 as i64, c.k2 as i64, c.h as i64);
        return Err(LinalgError::BelowBound {
            ty: *c,
            d,
            bound: format!(
                "max({}, {})",
                num_rational::Ratio::new(3 * (k1 + k2 + n - 1) + 5 * h, 3),
                2 * k1 + 2 * k2 + h + 2 * n - 1
            ),
        });
    }
    if let WorkingField::Prime(p) = field {
        if p == 2 || !is_prime(p) {
            return Err(LinalgError::NotOddPrime { p });
        }
        if n >= 3 && p % n as u64 != 1 {
            return Err(LinalgError::NoRootsOfUnity { p, n });
        }
    }
    let v = s.expected_dimension();
    let expected = v - c.codimension() as i64;
    let results: Vec<Result<(u64, usize), LinalgError>> = (0..trials)
        .into_par_iter()
        .map(|t| trial_kernel_dimension(c, &s, seed, t, field).map(|k| (t, k)))
        .collect();
    let mut failures = Vec::new();
    for r in results {
        let (trial, k) = r?;
        if k as i64 != expected {
            failures.push(TrialFailure {
                trial,
                kernel_dimension: k,
            });
        }
    }
    Ok(BundleRankReport {
        ty: *c,
        d,
        n,
        v,
        expected_rank: expected,
        trials,
        failures,
        seed,
        field,
    })
}

/// Searches up to `trials` random configurations of type `c` at a degree
/// below the bound for one whose fiber is larger than `v - codim`.
/// Returns the trial index and kernel dimension of the first witness.
pub fn below_bound_witness(
    c: &ConfigurationType,
    d: i64,
    n: i64,
    trials: u64,
    seed: u64,
) -> Result<Option<(u64, usize)>, LinalgError> {
    let s = SectionSpace::new(d, n)?;
    let expected = s.expected_dimension() - c.codimension() as i64;
    for t in 0..trials {
        let k = trial_kernel_dimension(c, &s, seed, t, WorkingField::Rational)?;
        if k as i64 > expected {
            return Ok(Some((t, k)));
        }
    }
    Ok(None)
}
