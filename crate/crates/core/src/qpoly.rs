//! Integer polynomials in the point-count variable `q`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Dense integer polynomial; `coeffs[e]` is the coefficient of `q^e`.
/// Trailing zeros are always trimmed, so the zero polynomial has no
/// coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QPolynomial {
    coeffs: Vec<i128>,
}

impl QPolynomial {
    pub fn new(mut coeffs: Vec<i128>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        QPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        QPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: i128) -> Self {
        Self::new(vec![c])
    }

    /// `c * q^e`
    pub fn monomial(c: i128, e: usize) -> Self {
        let mut coeffs = vec![0; e + 1];
        coeffs[e] = c;
        Self::new(coeffs)
    }

    /// The variable `q`.
    pub fn q() -> Self {
        Self::monomial(1, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, e: usize) -> i128 {
        self.coeffs.get(e).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn leading(&self) -> i128 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, q: i128) -> i128 {
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * q + c)
    }

    pub fn scale(&self, c: i128) -> Self {
        Self::new(self.coeffs.iter().map(|&x| x * c).collect())
    }

    /// Divides every coefficient by `d`, or returns `None` if some
    /// coefficient is not a multiple of `d`.
    pub fn div_exact_scalar(&self, d: i128) -> Option<Self> {
        if d == 0 || self.coeffs.iter().any(|c| c % d != 0) {
            return None;
        }
        Some(Self::new(self.coeffs.iter().map(|c| c / d).collect()))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(1), |acc, _| &acc * self)
    }

    /// Euclidean division by a divisor with leading coefficient `±1`.
    /// Returns `(quotient, remainder)` with `deg remainder < deg divisor`.
    pub fn div_rem_monic(&self, divisor: &QPolynomial) -> (QPolynomial, QPolynomial) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.leading();
        assert!(
            lead == 1 || lead == -1,
            "divisor must have unit leading coefficient"
        );
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (QPolynomial::zero(), QPolynomial::zero());
        };
        if nd < dd {
            return (QPolynomial::zero(), self.clone());
        }
        let mut quot = vec![0i128; nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = rem[k + dd] * lead;
            quot[k] = c;
            if c != 0 {
                for (i, &dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] -= c * dc;
                }
            }
        }
        (QPolynomial::new(quot), QPolynomial::new(rem))
    }

    /// `self / divisor` when the division is exact.
    pub fn div_exact(&self, divisor: &QPolynomial) -> Option<QPolynomial> {
        let (q, r) = self.div_rem_monic(divisor);
        r.is_zero().then_some(q)
    }
}

impl fmt::Debug for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (e, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "q")?,
                (1, _) => write!(f, "{a}q")?,
                (_, 1) => write!(f, "q^{e}")?,
                _ => write!(f, "{a}q^{e}")?,
            }
        }
        Ok(())
    }
}

impl Add for &QPolynomial {
    type Output = QPolynomial;
    fn add(self, rhs: &QPolynomial) -> QPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QPolynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &QPolynomial {
    type Output = QPolynomial;
    fn sub(self, rhs: &QPolynomial) -> QPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QPolynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &QPolynomial {
    type Output = QPolynomial;
    fn neg(self) -> QPolynomial {
        self.scale(-1)
    }
}

impl Mul for &QPolynomial {
    type Output = QPolynomial;
    fn mul(self, rhs: &QPolynomial) -> QPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return QPolynomial::zero();
        }
        let mut out = vec![0i128; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPolynomial::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QPolynomial {
            type Output = QPolynomial;
            fn $m(self, rhs: QPolynomial) -> QPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly() -> impl Strategy<Value = QPolynomial> {
        prop::collection::vec(-50i128..50, 0..8).prop_map(QPolynomial::new)
    }

    #[test]
    fn display() {
        let p = QPolynomial::new(vec![-1, 0, 3, 1]);
        assert_eq!(p.to_string(), "q^3 + 3q^2 - 1");
        assert_eq!(QPolynomial::zero().to_string(), "0");
    }

    #[test]
    fn division_by_q3_minus_q() {
        let d = QPolynomial::new(vec![0, -1, 0, 1]);
        let p = &(&d * &QPolynomial::new(vec![-2, 1])) + &QPolynomial::new(vec![5, 1]);
        let (quot, rem) = p.div_rem_monic(&d);
        assert_eq!(quot, QPolynomial::new(vec![-2, 1]));
        assert_eq!(rem, QPolynomial::new(vec![5, 1]));
    }

    proptest! {
        #[test]
        fn euclidean_identity(a in poly(), b in poly(), lead in prop::bool::ANY) {
            let mut bc = b.coeffs().to_vec();
            bc.push(if lead { 1 } else { -1 });
            let divisor = QPolynomial::new(bc);
            let (quot, rem) = a.div_rem_monic(&divisor);
            prop_assert_eq!(&(&quot * &divisor) + &rem, a);
            prop_assert!(rem.degree().map_or(true, |r| r < divisor.degree().unwrap()));
        }

        #[test]
        fn eval_is_multiplicative(a in poly(), b in poly(), q in -5i128..6) {
            prop_assert_eq!((&a * &b).eval(q), a.eval(q) * b.eval(q));
        }
    }
}
