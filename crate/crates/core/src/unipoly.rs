//! Dense univariate polynomials in `t` over the rationals.

use std::fmt;
use std::ops::{Mul, Sub};

use num_traits::{One, Signed, Zero};

use crate::rational::{format_q, Q};

/// Coefficients stored low degree first; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: Vec<Q>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| Q::from_integer(c.into())).collect())
    }

    /// `t - 1`
    pub fn t_minus_one() -> Self {
        Self::from_ints(&[-1, 1])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Divides by `t - c`; `None` if the remainder is nonzero.
    pub fn div_linear(&self, c: &Q) -> Option<UniPoly> {
        let Some(deg) = self.degree() else {
            return Some(UniPoly::zero());
        };
        let mut quotient = vec![Q::zero(); deg];
        let mut carry = Q::zero();
        for k in (0..=deg).rev() {
            let cur = &self.coeffs[k] + &carry;
            if k == 0 {
                return cur.is_zero().then(|| UniPoly::from_coeffs(quotient));
            }
            carry = &cur * c;
            quotient[k - 1] = cur;
        }
        unreachable!()
    }

    /// Absolute values of the coefficients, leading coefficient first.
    pub fn abs_coeffs_from_top(&self) -> Vec<Q> {
        self.coeffs.iter().rev().map(|c| c.abs()).collect()
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;

    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(out)
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;

    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_coeffs((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

/// `a_k² ≥ a_{k-1} a_{k+1}` for every interior `k`.
pub fn is_log_concave(seq: &[Q]) -> bool {
    seq.windows(3).all(|w| &w[1] * &w[1] >= &w[0] * &w[2])
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let unit = mag.is_one();
            match k {
                0 => f.write_str(&format_q(&mag))?,
                _ => {
                    if !unit {
                        write!(f, "{}*", format_q(&mag))?;
                    }
                    if k == 1 {
                        f.write_str("t")?;
                    } else {
                        write!(f, "t^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
