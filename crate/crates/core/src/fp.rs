//! Arithmetic in prime fields, in univariate polynomials over them, and in
//! their small extensions `F_{p^m}`.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("no irreducible polynomial of degree {degree} found over F_{p}")]
    NoIrreducible { p: u64, degree: usize },
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The prime field `F_p`, elements represented by `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p == 2 || !is_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0);
        self.pow(a, self.p - 2)
    }

    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }
}

/// Polynomials over `F_p` as coefficient vectors, lowest degree first,
/// trimmed of trailing zeros.
pub mod poly {
    use super::PrimeField;

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn degree(a: &[u64]) -> Option<usize> {
        a.iter().rposition(|&c| c != 0)
    }

    pub fn mul(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        trim(out)
    }

    pub fn sub(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| {
                    f.sub(
                        a.get(i).copied().unwrap_or(0),
                        b.get(i).copied().unwrap_or(0),
                    )
                })
                .collect(),
        )
    }

    pub fn derivative(f: &PrimeField, a: &[u64]) -> Vec<u64> {
        trim(
            a.iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(c, (i as u64) % f.p()))
                .collect(),
        )
    }

    /// Remainder of `a` modulo nonzero `b`.
    pub fn rem(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
        let db = degree(b).expect("division by zero polynomial");
        let inv_lead = f.inv(b[db]);
        let mut r = trim(a.to_vec());
        while let Some(dr) = degree(&r) {
            if dr < db {
                break;
            }
            let c = f.mul(r[dr], inv_lead);
            let shift = dr - db;
            for (i, &bc) in b.iter().enumerate().take(db + 1) {
                r[shift + i] = f.sub(r[shift + i], f.mul(c, bc));
            }
            r = trim(r);
        }
        r
    }

    /// Quotient and remainder of `a` by nonzero `b`.
    pub fn div_rem(f: &PrimeField, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let db = degree(b).expect("division by zero polynomial");
        let inv_lead = f.inv(b[db]);
        let mut r = trim(a.to_vec());
        let mut q = vec![0u64; r.len().saturating_sub(db)];
        while let Some(dr) = degree(&r) {
            if dr < db {
                break;
            }
            let c = f.mul(r[dr], inv_lead);
            let shift = dr - db;
            q[shift] = c;
            for (i, &bc) in b.iter().enumerate().take(db + 1) {
                r[shift + i] = f.sub(r[shift + i], f.mul(c, bc));
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    pub fn gcd(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        while !y.is_empty() {
            let r = rem(f, &x, &y);
            x = y;
            y = r;
        }
        monic(f, &x)
    }

    pub fn monic(f: &PrimeField, a: &[u64]) -> Vec<u64> {
        match degree(a) {
            None => Vec::new(),
            Some(d) => {
                let inv = f.inv(a[d]);
                a[..=d].iter().map(|&c| f.mul(c, inv)).collect()
            }
        }
    }

    /// `x^e mod m`.
    pub fn pow_x_mod(f: &PrimeField, e: u64, m: &[u64]) -> Vec<u64> {
        let mut result = rem(f, &[1], m);
        let mut base = rem(f, &[0, 1], m);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = rem(f, &mul(f, &result, &base), m);
            }
            base = rem(f, &mul(f, &base, &base), m);
            e >>= 1;
        }
        result
    }

    /// Rabin-style irreducibility test for a polynomial of degree `m >= 1`:
    /// `x^{p^m} = x mod f` and `gcd(x^{p^{m/r}} - x, f) = 1` for every prime
    /// `r | m`.
    pub fn is_irreducible(f: &PrimeField, a: &[u64]) -> bool {
        let Some(m) = degree(a) else { return false };
        if m == 0 {
            return false;
        }
        let p = f.p();
        let frob = |k: usize| -> Vec<u64> {
            let mut x = rem(f, &[0, 1], a);
            for _ in 0..k {
                x = pow_mod(f, &x, p, a);
            }
            x
        };
        if sub(f, &frob(m), &rem(f, &[0, 1], a)) != Vec::<u64>::new() {
            return false;
        }
        for r in 2..=m {
            if m % r != 0 || !(2..r).all(|s| r % s != 0) {
                continue;
            }
            let g = gcd(f, &sub(f, &frob(m / r), &[0, 1]), a);
            if degree(&g) != Some(0) {
                return false;
            }
        }
        true
    }

    pub fn pow_mod(f: &PrimeField, a: &[u64], mut e: u64, m: &[u64]) -> Vec<u64> {
        let mut result = rem(f, &[1], m);
        let mut base = rem(f, a, m);
        while e > 0 {
            if e & 1 == 1 {
                result = rem(f, &mul(f, &result, &base), m);
            }
            base = rem(f, &mul(f, &base, &base), m);
            e >>= 1;
        }
        result
    }
}

/// The extension `F_{p^m} = F_p[x]/(modulus)`; elements are coefficient
/// vectors of length exactly `m`.
#[derive(Clone, Debug)]
pub struct ExtensionField {
    base: PrimeField,
    modulus: Vec<u64>,
    degree: usize,
}

impl ExtensionField {
    pub fn new(base: PrimeField, degree: usize) -> Result<Self, FieldError> {
        assert!(degree >= 1);
        let p = base.p();
        let total = p.pow(degree as u32);
        // monic candidates x^m + c_{m-1} x^{m-1} + ... + c_0 in lexicographic order
        for code in 0..total {
            let mut coeffs = Vec::with_capacity(degree + 1);
            let mut c = code;
            for _ in 0..degree {
                coeffs.push(c % p);
                c /= p;
            }
            coeffs.push(1);
            if poly::is_irreducible(&base, &coeffs) {
                return Ok(ExtensionField {
                    base,
                    modulus: coeffs,
                    degree,
                });
            }
        }
        Err(FieldError::NoIrreducible { p, degree })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> u64 {
        self.base.p().pow(self.degree as u32)
    }

    /// Element with index `i` in `0..order`, read in base `p`.
    pub fn element(&self, mut i: u64) -> Vec<u64> {
        let p = self.base.p();
        (0..self.degree)
            .map(|_| {
                let c = i % p;
                i /= p;
                c
            })
            .collect()
    }

    pub fn index(&self, a: &[u64]) -> u64 {
        let p = self.base.p();
        a.iter().rev().fold(0, |acc, &c| acc * p + c)
    }

    fn pad(&self, mut a: Vec<u64>) -> Vec<u64> {
        a.resize(self.degree, 0);
        a
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let prod = poly::mul(&self.base, a, b);
        self.pad(poly::rem(&self.base, &prod, &self.modulus))
    }

    pub fn pow(&self, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut result = self.pad(vec![1]);
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        result
    }

    /// The arithmetic Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: &[u64]) -> Vec<u64> {
        self.pow(a, self.base.p())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_even_and_composite() {
        assert!(PrimeField::new(2).is_err());
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(7).is_ok());
    }

    #[test]
    fn irreducible_counts_over_f3() {
        // monic irreducibles of degree 2 and 3 over F_3: (9-3)/2 = 3 and (27-3)/3 = 8
        let f = PrimeField::new(3).unwrap();
        for (deg, expected) in [(2usize, 3usize), (3, 8)] {
            let total = 3u64.pow(deg as u32);
            let count = (0..total)
                .filter(|&code| {
                    let mut c = code;
                    let mut coeffs: Vec<u64> = (0..deg)
                        .map(|_| {
                            let v = c % 3;
                            c /= 3;
                            v
                        })
                        .collect();
                    coeffs.push(1);
                    poly::is_irreducible(&f, &coeffs)
                })
                .count();
            assert_eq!(count, expected);
        }
    }

    #[test]
    fn extension_frobenius_has_order_m() {
        let f = PrimeField::new(5).unwrap();
        let ext = ExtensionField::new(f, 3).unwrap();
        for i in 0..ext.order() {
            let a = ext.element(i);
            let mut x = a.clone();
            for _ in 0..3 {
                x = ext.frobenius(&x);
            }
            assert_eq!(x, a);
        }
    }
}
