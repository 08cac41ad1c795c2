//! Equivariant cohomology of `M_{0,n}` from twisted point counts of the
//! ordered configuration space `F(P^1, n)`.
//!
//! For `sigma` of cycle type `mu`, the number of fixed points of
//! `sigma ∘ Frob` on `F(P^1, n)` is a polynomial `N_mu(q)`. Since `PGL_2` acts
//! freely with quotient `M_{0,n}` and `H^i(M_{0,n})` is pure of weight `2i`,
//!
//! ```text
//! N_mu(q) / (q^3 - q) = sum_i (-1)^i q^{n-3-i} tr(sigma | H^i(M_{0,n}))
//! ```
//!
//! which recovers every layer as a class function.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, OnceLock, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fp::{ExtensionField, FieldError, PrimeField};
use crate::qpoly::QPolynomial;
use crate::symfunc::{partitions, CharacterVector, CycleType, SymError};

#[derive(Debug, Error)]
pub enum M0nError {
    #[error("M_0,n needs n >= 3, got {0}")]
    TooFewPoints(u32),
    #[error("twisted count for {mu} is not divisible by q^3 - q: {count}")]
    InexactDivision { mu: CycleType, count: QPolynomial },
    #[error("layer {layer} has nonzero trace at {mu} above degree n - 3")]
    DegreeBound { layer: usize, mu: CycleType },
    #[error("layer 0 is not the trivial character")]
    NontrivialBottomLayer,
    #[error("enumeration over F_{q}^{m} exceeds the bound of {bound} points")]
    ResourceGuard { q: u64, m: usize, bound: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("closed point count with denominator {d} is not integral at q = {q}")]
    NonIntegral { d: i128, q: i128 },
    #[error("cache: {0}")]
    Cache(String),
}

fn mobius(mut n: u64) -> i128 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of closed points of degree `d` on `P^1`, as `numerator / d`.
/// The numerator `d * a_d(q)` has integer coefficients; `a_d` itself takes
/// integer values at every prime power but need not have them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedPointCount {
    pub numerator: QPolynomial,
    pub denominator: i128,
}

impl ClosedPointCount {
    /// Value at `q`; errors if the division is not exact there.
    pub fn eval(&self, q: i128) -> Result<i128, M0nError> {
        let num = self.numerator.eval(q);
        if num % self.denominator != 0 {
            return Err(M0nError::NonIntegral {
                d: self.denominator,
                q,
            });
        }
        Ok(num / self.denominator)
    }
}

pub fn closed_point_count(d: u32) -> ClosedPointCount {
    assert!(d >= 1, "closed points have degree at least 1");
    if d == 1 {
        return ClosedPointCount {
            numerator: QPolynomial::new(vec![1, 1]),
            denominator: 1,
        };
    }
    let mut numerator = QPolynomial::zero();
    for e in 1..=d {
        if d % e == 0 {
            let m = mobius((d / e) as u64);
            if m != 0 {
                numerator = &numerator + &QPolynomial::monomial(m, e as usize);
            }
        }
    }
    ClosedPointCount {
        numerator,
        denominator: d as i128,
    }
}

/// `N_mu(q) = prod_d d^{c_d} a_d (a_d - 1) ... (a_d - c_d + 1)`, computed as
/// `prod_d prod_j (d a_d - j d)` so that every factor is integral.
pub fn twisted_count_config_p1(mu: &CycleType) -> QPolynomial {
    let mut result = QPolynomial::constant(1);
    for (&d, &c) in &mu.multiplicities() {
        let scaled = closed_point_count(d).numerator;
        for j in 0..c {
            let factor = &scaled - &QPolynomial::constant((j * d) as i128);
            result = &result * &factor;
        }
    }
    result
}

/// Default cap on `q^{lcm(mu)}` for [`brute_twisted_count`].
pub const BRUTE_POINT_BOUND: u64 = 2_000_000;

/// Counts fixed points of `sigma ∘ Frob` on ordered `n`-point configurations
/// in `P^1` by enumerating points of `P^1(F_{q^m})`, `m = lcm(mu)`.
///
/// Each cycle `(i_1 ... i_d)` of `sigma` forces `x_{i_{j+1}} = Frob(x_{i_j})`,
/// so a fixed configuration is determined by a choice of `x_{i_1}` with
/// `Frob^d x = x` per cycle, subject to all `n` points being distinct.
pub fn brute_twisted_count(mu: &CycleType, q: u64, bound: u64) -> Result<u128, M0nError> {
    let base = PrimeField::new(q)?;
    let m = mu.lcm().max(1) as usize;
    let order = (q as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if order > bound as u128 {
        return Err(M0nError::ResourceGuard { q, m, bound });
    }
    let field = ExtensionField::new(base, m)?;
    let order = order as usize;

    // Frobenius is F_q-linear: x^p for the basis, then extend.
    let basis_images: Vec<Vec<u64>> = (0..m)
        .map(|j| {
            let mut e = vec![0u64; m];
            e[j] = 1;
            field.frobenius(&e)
        })
        .collect();
    // point index `order` is the point at infinity
    let mut frob: Vec<usize> = Vec::with_capacity(order + 1);
    for i in 0..order {
        let x = field.element(i as u64);
        let mut image = vec![0u64; m];
        for (j, &c) in x.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (k, &b) in basis_images[j].iter().enumerate() {
                image[k] = base.add(image[k], base.mul(c, b));
            }
        }
        frob.push(field.index(&image) as usize);
    }
    frob.push(order);

    let iterate = |x: usize, k: u32| (0..k).fold(x, |y, _| frob[y]);
    let cycles: Vec<u32> = mu.parts().to_vec();
    let candidates: Vec<Vec<usize>> = cycles
        .iter()
        .map(|&d| (0..=order).filter(|&x| iterate(x, d) == x).collect())
        .collect();

    fn dfs(
        level: usize,
        cycles: &[u32],
        candidates: &[Vec<usize>],
        frob: &[usize],
        used: &mut HashSet<usize>,
    ) -> u128 {
        if level == cycles.len() {
            return 1;
        }
        let mut total = 0;
        for &x in &candidates[level] {
            let mut orbit = Vec::with_capacity(cycles[level] as usize);
            let mut y = x;
            let mut ok = true;
            for _ in 0..cycles[level] {
                if used.contains(&y) || orbit.contains(&y) {
                    ok = false;
                    break;
                }
                orbit.push(y);
                y = frob[y];
            }
            if !ok {
                continue;
            }
            used.extend(orbit.iter().copied());
            total += dfs(level + 1, cycles, candidates, frob, used);
            for y in &orbit {
                used.remove(y);
            }
        }
        total
    }

    Ok(dfs(0, &cycles, &candidates, &frob, &mut HashSet::new()))
}

/// Graded `S_n`-character of `H^*(M_{0,n})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantPoincare {
    pub n: u32,
    pub layers: BTreeMap<usize, CharacterVector>,
}

impl EquivariantPoincare {
    /// The character in degree `i`; zero outside `0..=n-3`.
    pub fn layer(&self, i: usize) -> CharacterVector {
        self.layers
            .get(&i)
            .cloned()
            .unwrap_or_else(|| CharacterVector::from_fn(self.n, |_| 0))
    }

    pub fn top_degree(&self) -> usize {
        (self.n - 3) as usize
    }

    /// Betti numbers, i.e. the layer dimensions.
    pub fn betti(&self) -> Vec<i128> {
        (0..=self.top_degree())
            .map(|i| self.layer(i).dimension())
            .collect()
    }
}

fn compute_m0n(n: u32) -> Result<EquivariantPoincare, M0nError> {
    if n < 3 {
        return Err(M0nError::TooFewPoints(n));
    }
    let top = (n - 3) as usize;
    let pgl2 = QPolynomial::new(vec![0, -1, 0, 1]);
    let types = partitions(n);
    let rows: Vec<Result<(CycleType, Vec<i128>), M0nError>> = types
        .par_iter()
        .map(|mu| {
            let count = twisted_count_config_p1(mu);
            let quotient = count
                .div_exact(&pgl2)
                .ok_or_else(|| M0nError::InexactDivision {
                    mu: mu.clone(),
                    count: count.clone(),
                })?;
            if let Some(deg) = quotient.degree() {
                if deg > top {
                    return Err(M0nError::DegreeBound {
                        layer: deg,
                        mu: mu.clone(),
                    });
                }
            }
            let traces = (0..=top)
                .map(|i| {
                    let c = quotient.coeff(top - i);
                    if i % 2 == 0 {
                        c
                    } else {
                        -c
                    }
                })
                .collect();
            Ok((mu.clone(), traces))
        })
        .collect();

    let mut per_layer: Vec<BTreeMap<CycleType, i128>> = vec![BTreeMap::new(); top + 1];
    for row in rows {
        let (mu, traces) = row?;
        for (i, t) in traces.into_iter().enumerate() {
            per_layer[i].insert(mu.clone(), t);
        }
    }
    let mut layers = BTreeMap::new();
    for (i, values) in per_layer.into_iter().enumerate() {
        let chi = CharacterVector::new(n, values)?;
        if !chi.is_zero() {
            layers.insert(i, chi);
        }
    }
    let ep = EquivariantPoincare { n, layers };
    if ep.layer(0) != CharacterVector::trivial(n) {
        return Err(M0nError::NontrivialBottomLayer);
    }
    Ok(ep)
}

fn memo() -> &'static RwLock<HashMap<u32, Arc<EquivariantPoincare>>> {
    static MEMO: OnceLock<RwLock<HashMap<u32, Arc<EquivariantPoincare>>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The graded character of `H^*(M_{0,n})`, memoized per process.
pub fn equivariant_poincare_m0n(n: u32) -> Result<Arc<EquivariantPoincare>, M0nError> {
    if let Some(ep) = memo().read().unwrap().get(&n) {
        return Ok(Arc::clone(ep));
    }
    let ep = Arc::new(compute_m0n(n)?);
    memo().write().unwrap().insert(n, Arc::clone(&ep));
    Ok(ep)
}

/// Seeds the in-process memo, e.g. from an on-disk cache.
pub fn preload(ep: EquivariantPoincare) {
    memo().write().unwrap().insert(ep.n, Arc::new(ep));
}

#[derive(Serialize, Deserialize)]
struct CacheTrace {
    cycle_type: CycleType,
    trace: String,
}

#[derive(Serialize, Deserialize)]
struct CacheLayer {
    i: usize,
    values: Vec<CacheTrace>,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    n: u32,
    layers: Vec<CacheLayer>,
}

impl EquivariantPoincare {
    /// JSON form `{n, layers: [{i, values: [{cycle_type, trace}]}]}`, traces
    /// as decimal strings.
    pub fn to_json(&self) -> String {
        let file = CacheFile {
            n: self.n,
            layers: self
                .layers
                .iter()
                .map(|(&i, chi)| CacheLayer {
                    i,
                    values: chi
                        .values()
                        .iter()
                        .map(|(mu, v)| CacheTrace {
                            cycle_type: mu.clone(),
                            trace: v.to_string(),
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("cache serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, M0nError> {
        let file: CacheFile =
            serde_json::from_str(text).map_err(|e| M0nError::Cache(e.to_string()))?;
        let mut layers = BTreeMap::new();
        for layer in file.layers {
            let mut values = BTreeMap::new();
            for t in layer.values {
                let v: i128 = t
                    .trace
                    .parse()
                    .map_err(|e| M0nError::Cache(format!("bad trace {:?}: {e}", t.trace)))?;
                values.insert(t.cycle_type, v);
            }
            layers.insert(layer.i, CharacterVector::new(file.n, values)?);
        }
        Ok(EquivariantPoincare { n: file.n, layers })
    }
}

/// Cache file name for `n` inside a cache directory.
pub fn cache_file_name(n: u32) -> String {
    format!("m0n_{n}.json")
}

/// Loads `n` from `dir` if cached (and seeds the memo), otherwise computes it
/// and writes the cache atomically via a temporary file and rename.
pub fn load_or_compute(dir: &Path, n: u32) -> Result<Arc<EquivariantPoincare>, M0nError> {
    let path = dir.join(cache_file_name(n));
    if let Ok(text) = fs::read_to_string(&path) {
        let ep = EquivariantPoincare::from_json(&text)?;
        if ep.n == n {
            preload(ep);
            return equivariant_poincare_m0n(n);
        }
    }
    let ep = equivariant_poincare_m0n(n)?;
    fs::create_dir_all(dir).map_err(|e| M0nError::Cache(e.to_string()))?;
    let mut tmp = tempfile_in(dir)?;
    tmp.1
        .write_all(ep.to_json().as_bytes())
        .map_err(|e| M0nError::Cache(e.to_string()))?;
    drop(tmp.1);
    fs::rename(&tmp.0, &path).map_err(|e| M0nError::Cache(e.to_string()))?;
    Ok(ep)
}

fn tempfile_in(dir: &Path) -> Result<(std::path::PathBuf, fs::File), M0nError> {
    for attempt in 0..1000u32 {
        let path = dir.join(format!(".m0n.{}.{attempt}.tmp", std::process::id()));
        match fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
        {
            Ok(f) => return Ok((path, f)),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(M0nError::Cache(e.to_string())),
        }
    }
    Err(M0nError::Cache("could not create a temporary file".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfunc::{schur_expand, Partition};

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    // brute count of monic irreducible polynomials of degree d over F_q
    fn irreducible_count(q: u64, d: usize) -> i128 {
        let f = PrimeField::new(q).unwrap();
        (0..q.pow(d as u32))
            .filter(|&code| {
                let mut c = code;
                let mut coeffs: Vec<u64> = (0..d)
                    .map(|_| {
                        let v = c % q;
                        c /= q;
                        v
                    })
                    .collect();
                coeffs.push(1);
                crate::fp::poly::is_irreducible(&f, &coeffs)
            })
            .count() as i128
    }

    #[test]
    fn closed_points_match_irreducible_counts() {
        assert_eq!(
            closed_point_count(1).numerator,
            QPolynomial::new(vec![1, 1])
        );
        assert_eq!(
            closed_point_count(2).numerator,
            QPolynomial::new(vec![0, -1, 1])
        );
        for q in [3u64, 5] {
            assert_eq!(
                closed_point_count(2).eval(q as i128).unwrap(),
                irreducible_count(q, 2)
            );
        }
        assert_eq!(
            closed_point_count(3).eval(3).unwrap(),
            irreducible_count(3, 3)
        );
        assert_eq!(
            closed_point_count(4).eval(3).unwrap(),
            irreducible_count(3, 4)
        );
        assert!(closed_point_count(2).eval(2).is_ok());
        assert!(closed_point_count(3).eval(2).is_ok());
    }

    #[test]
    fn twisted_count_examples() {
        assert_eq!(
            twisted_count_config_p1(&p(&[1, 1, 1])),
            QPolynomial::new(vec![0, -1, 0, 1])
        );
        assert_eq!(
            twisted_count_config_p1(&p(&[2])),
            QPolynomial::new(vec![0, -1, 1])
        );
        // 4 a_2 (a_2 - 1) = (q^2 - q)(q^2 - q - 2)
        let expected = &QPolynomial::new(vec![0, -1, 1]) * &QPolynomial::new(vec![-2, -1, 1]);
        assert_eq!(twisted_count_config_p1(&p(&[2, 2])), expected);
        for q in [3i128, 5, 7] {
            let a2 = closed_point_count(2).eval(q).unwrap();
            assert_eq!(
                twisted_count_config_p1(&p(&[2, 2])).eval(q),
                4 * a2 * (a2 - 1)
            );
        }
    }

    #[test]
    fn brute_examples() {
        assert_eq!(
            brute_twisted_count(&p(&[1, 1, 1]), 5, BRUTE_POINT_BOUND).unwrap(),
            120
        );
        assert_eq!(
            brute_twisted_count(&p(&[2, 2]), 3, BRUTE_POINT_BOUND).unwrap(),
            24
        );
        assert_eq!(
            brute_twisted_count(&p(&[1, 1]), 3, BRUTE_POINT_BOUND).unwrap(),
            12
        );
        assert!(matches!(
            brute_twisted_count(&p(&[5]), 11, 1000),
            Err(M0nError::ResourceGuard { .. })
        ));
    }

    #[test]
    fn brute_agrees_with_product_formula() {
        for n in 1..=4 {
            for mu in partitions(n) {
                for q in [3u64, 5] {
                    let brute = brute_twisted_count(&mu, q, BRUTE_POINT_BOUND).unwrap();
                    assert_eq!(
                        brute as i128,
                        twisted_count_config_p1(&mu).eval(q as i128),
                        "{mu} q={q}"
                    );
                }
            }
        }
    }

    #[test]
    fn small_n_layers() {
        let ep3 = equivariant_poincare_m0n(3).unwrap();
        assert_eq!(ep3.layers.len(), 1);
        assert_eq!(ep3.layer(0), CharacterVector::trivial(3));

        let ep4 = equivariant_poincare_m0n(4).unwrap();
        assert_eq!(ep4.layer(1), CharacterVector::irreducible(&p(&[2, 2])));
        assert_eq!(ep4.layer(1).value(&p(&[2, 2])), 2);

        assert_eq!(equivariant_poincare_m0n(5).unwrap().betti(), vec![1, 5, 6]);
    }

    #[test]
    fn identity_layers_match_product() {
        for n in 3..=10u32 {
            let mut expected = vec![1i128];
            for j in 2..=(n as i128 - 2) {
                let mut next = vec![0; expected.len() + 1];
                for (i, &c) in expected.iter().enumerate() {
                    next[i] += c;
                    next[i + 1] += j * c;
                }
                expected = next;
            }
            assert_eq!(
                equivariant_poincare_m0n(n).unwrap().betti(),
                expected,
                "n={n}"
            );
        }
    }

    #[test]
    fn layers_are_true_characters() {
        for n in 3..=9u32 {
            let ep = equivariant_poincare_m0n(n).unwrap();
            for (i, chi) in &ep.layers {
                for (lambda, m) in schur_expand(chi).unwrap() {
                    assert!(m >= 0, "n={n} i={i} {lambda}: {m}");
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let ep = equivariant_poincare_m0n(6).unwrap();
        let back = EquivariantPoincare::from_json(&ep.to_json()).unwrap();
        assert_eq!(*ep, back);
        assert!(ep.to_json().contains("\"trace\": \""));
    }

    #[test]
    fn disk_cache_is_reused() {
        let dir = tempfile::tempdir().unwrap();
        let first = load_or_compute(dir.path(), 5).unwrap();
        let path = dir.path().join(cache_file_name(5));
        assert!(path.exists());
        let second = load_or_compute(dir.path(), 5).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn mobius_values() {
        let got: Vec<i128> = (1..=10).map(mobius).collect();
        assert_eq!(got, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    }
}
