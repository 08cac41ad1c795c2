//! Partitions, symmetric-group characters and Hall inner products.
//!
//! Class functions on `S_n` are stored as maps from cycle type to integer
//! value. Irreducible characters come from the Murnaghan–Nakayama rule and
//! are memoized process-wide. Inner products against induced characters
//! `e_{k1} e_{k2} h_h` go through Frobenius reciprocity, so every quantity
//! stays integral until the final exact division.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymError {
    #[error("size mismatch: partition of {left} paired with partition of {right}")]
    SizeMismatch { left: u32, right: u32 },
    #[error("character of degree {found} where degree {expected} was required")]
    DegreeMismatch { expected: u32, found: u32 },
    #[error("inner product is not integral: {numerator}/{denominator}")]
    NonIntegral {
        numerator: String,
        denominator: String,
    },
    #[error("character has no value at cycle type {0}")]
    MissingClass(Partition),
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
}

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(Vec<u32>);

/// A partition read as the cycle lengths of a permutation.
pub type CycleType = Partition;

impl Partition {
    /// Builds a partition from parts in any order; zero parts are dropped.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// The one-row partition `[n]`, or the empty partition for `n = 0`.
    pub fn row(n: u32) -> Self {
        Self::new(vec![n])
    }

    /// The one-column partition `[1^n]`.
    pub fn column(n: u32) -> Self {
        Partition(vec![1; n as usize])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `c_d`: how many parts equal `d`.
    pub fn multiplicities(&self) -> BTreeMap<u32, u32> {
        let mut m = BTreeMap::new();
        for &p in &self.0 {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    /// Sign of a permutation with this cycle type.
    pub fn sign(&self) -> i32 {
        if (self.weight() as usize - self.len()) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Multiset union of parts.
    pub fn union(&self, other: &Partition) -> Partition {
        let mut parts = self.0.clone();
        parts.extend_from_slice(&other.0);
        Partition::new(parts)
    }

    /// Least common multiple of the parts (1 for the empty partition).
    pub fn lcm(&self) -> u64 {
        self.0.iter().fold(1u64, |acc, &p| acc.lcm(&(p as u64)))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

impl From<Vec<u32>> for Partition {
    fn from(parts: Vec<u32>) -> Self {
        Partition::new(parts)
    }
}

/// All partitions of `n` in reverse lexicographic order: `[n]` first,
/// `[1^n]` last.
pub fn partitions(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fill_partitions(n, n, &mut current, &mut out);
    out
}

fn fill_partitions(
    remaining: u32,
    max_part: u32,
    current: &mut Vec<u32>,
    out: &mut Vec<Partition>,
) {
    if remaining == 0 {
        out.push(Partition(current.clone()));
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        current.push(part);
        fill_partitions(remaining - part, part, current, out);
        current.pop();
    }
}

pub fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

/// Order of the centralizer of a permutation of cycle type `mu`:
/// `prod_d d^{c_d} c_d!`.
pub fn z_order(mu: &CycleType) -> u128 {
    mu.multiplicities()
        .iter()
        .map(|(&d, &c)| (d as u128).pow(c) * factorial(c))
        .product()
}

/// Number of permutations of cycle type `mu` in `S_{|mu|}`.
pub fn class_size(mu: &CycleType) -> u128 {
    factorial(mu.weight()) / z_order(mu)
}

type MnKey = (Partition, Partition);

fn mn_cache() -> &'static RwLock<HashMap<MnKey, i128>> {
    static CACHE: OnceLock<RwLock<HashMap<MnKey, i128>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `chi^lambda(mu)` by the Murnaghan–Nakayama rule.
pub fn irreducible_character(lambda: &Partition, mu: &CycleType) -> Result<i128, SymError> {
    if lambda.weight() != mu.weight() {
        return Err(SymError::SizeMismatch {
            left: lambda.weight(),
            right: mu.weight(),
        });
    }
    Ok(mn(lambda, mu.parts()))
}

fn mn(lambda: &Partition, mu: &[u32]) -> i128 {
    if mu.is_empty() {
        return 1;
    }
    let key = (lambda.clone(), Partition(mu.to_vec()));
    if let Some(&v) = mn_cache()
        .read()
        .expect("character cache poisoned")
        .get(&key)
    {
        return v;
    }
    let r = mu[0];
    let rest = &mu[1..];
    let mut total = 0i128;
    for (sign, smaller) in remove_rim_hooks(lambda, r) {
        total += sign as i128 * mn(&smaller, rest);
    }
    mn_cache()
        .write()
        .expect("character cache poisoned")
        .insert(key, total);
    total
}

/// All partitions obtained from `lambda` by removing a rim hook of length
/// `r`, with the hook's sign `(-1)^{height}`. Works on beta-numbers: a hook
/// removal moves one bead `b` to the free position `b - r`, and the height
/// is the number of beads strictly between.
fn remove_rim_hooks(lambda: &Partition, r: u32) -> Vec<(i32, Partition)> {
    let k = lambda.len();
    let beta: Vec<i64> = lambda
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &p)| p as i64 + (k - 1 - i) as i64)
        .collect();
    let mut out = Vec::new();
    for (idx, &b) in beta.iter().enumerate() {
        let target = b - r as i64;
        if target < 0 || beta.contains(&target) {
            continue;
        }
        let height = beta.iter().filter(|&&x| x > target && x < b).count();
        let mut moved = beta.clone();
        moved[idx] = target;
        moved.sort_unstable_by(|a, b| b.cmp(a));
        let len = moved.len();
        let parts: Vec<u32> = moved
            .iter()
            .enumerate()
            .map(|(i, &x)| (x - (len - 1 - i) as i64) as u32)
            .collect();
        let sign = if height % 2 == 0 { 1 } else { -1 };
        out.push((sign, Partition::new(parts)));
    }
    out
}

/// A class function on `S_n` with integer values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterVector {
    degree: u32,
    values: BTreeMap<Partition, i128>,
}

impl CharacterVector {
    /// Checks that every cycle type of `degree` has a value and nothing else does.
    pub fn new(degree: u32, values: BTreeMap<Partition, i128>) -> Result<Self, SymError> {
        for mu in partitions(degree) {
            if !values.contains_key(&mu) {
                return Err(SymError::MissingClass(mu));
            }
        }
        if let Some(bad) = values.keys().find(|mu| mu.weight() != degree) {
            return Err(SymError::DegreeMismatch {
                expected: degree,
                found: bad.weight(),
            });
        }
        Ok(CharacterVector { degree, values })
    }

    pub fn from_fn(degree: u32, mut f: impl FnMut(&CycleType) -> i128) -> Self {
        let values = partitions(degree).into_iter().map(|mu| {
            let v = f(&mu);
            (mu, v)
        });
        CharacterVector {
            degree,
            values: values.collect(),
        }
    }

    pub fn trivial(degree: u32) -> Self {
        Self::from_fn(degree, |_| 1)
    }

    pub fn sign(degree: u32) -> Self {
        Self::from_fn(degree, |mu| mu.sign() as i128)
    }

    pub fn irreducible(lambda: &Partition) -> Self {
        Self::from_fn(lambda.weight(), |mu| mn(lambda, mu.parts()))
    }

    /// Character of the regular representation.
    pub fn regular(degree: u32) -> Self {
        let n_fact = factorial(degree) as i128;
        Self::from_fn(degree, |mu| {
            if mu.parts().iter().all(|&p| p == 1) {
                n_fact
            } else {
                0
            }
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn value(&self, mu: &CycleType) -> i128 {
        self.values[mu]
    }

    /// Value at the identity, i.e. the dimension for a true character.
    pub fn dimension(&self) -> i128 {
        self.values[&Partition::column(self.degree)]
    }

    pub fn values(&self) -> &BTreeMap<Partition, i128> {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|&v| v == 0)
    }
}

/// Cycle types of `S_k` with their class sizes and signs.
fn weighted_classes(k: u32) -> Vec<(Partition, BigInt, i32)> {
    partitions(k)
        .into_iter()
        .map(|mu| {
            let size = BigInt::from(class_size(&mu));
            let sign = mu.sign();
            (mu, size, sign)
        })
        .collect()
}

/// `<chi, s_{1^k1} s_{1^k2} s_h>`, computed by Frobenius reciprocity as an
/// average of `chi` over the Young subgroup `S_k1 x S_k2 x S_h` twisted by
/// the sign on the first two factors.
pub fn hall_inner_product_induced(
    chi: &CharacterVector,
    k1: u32,
    k2: u32,
    h: u32,
) -> Result<i128, SymError> {
    let n = k1 + k2 + h;
    if chi.degree != n {
        return Err(SymError::DegreeMismatch {
            expected: n,
            found: chi.degree,
        });
    }
    let c1 = weighted_classes(k1);
    let c2 = weighted_classes(k2);
    let c3 = weighted_classes(h);
    let mut total = BigInt::zero();
    for (mu1, s1, e1) in &c1 {
        for (mu2, s2, e2) in &c2 {
            let mu12 = mu1.union(mu2);
            let w12 = s1 * s2 * BigInt::from(e1 * e2);
            for (mu3, s3, _) in &c3 {
                let mu = mu12.union(mu3);
                let v = chi
                    .values
                    .get(&mu)
                    .ok_or_else(|| SymError::MissingClass(mu.clone()))?;
                if *v != 0 {
                    total += &w12 * s3 * BigInt::from(*v);
                }
            }
        }
    }
    let order =
        BigInt::from(factorial(k1)) * BigInt::from(factorial(k2)) * BigInt::from(factorial(h));
    exact_quotient(total, order)
}

fn exact_quotient(numerator: BigInt, denominator: BigInt) -> Result<i128, SymError> {
    let (q, r) = numerator.div_rem(&denominator);
    if !r.is_zero() {
        return Err(SymError::NonIntegral {
            numerator: numerator.to_string(),
            denominator: denominator.to_string(),
        });
    }
    q.to_i128().ok_or(SymError::Overflow("inner product"))
}

/// Multiplicities `<chi, chi^lambda>` for every `lambda |- degree`.
pub fn schur_expand(chi: &CharacterVector) -> Result<BTreeMap<Partition, i128>, SymError> {
    let n = chi.degree;
    let classes = weighted_classes(n);
    let order = BigInt::from(factorial(n));
    let mut out = BTreeMap::new();
    for lambda in partitions(n) {
        let mut total = BigInt::zero();
        for (mu, size, _) in &classes {
            let v = chi.values[mu];
            if v != 0 {
                total += size * BigInt::from(v) * BigInt::from(mn(&lambda, mu.parts()));
            }
        }
        let m = exact_quotient(total, order.clone())?;
        if m != 0 {
            out.insert(lambda, m);
        }
    }
    Ok(out)
}

/// True when every Schur multiplicity is nonnegative.
pub fn is_true_character(chi: &CharacterVector) -> Result<bool, SymError> {
    Ok(schur_expand(chi)?.values().all(|m| !m.is_negative()))
}
