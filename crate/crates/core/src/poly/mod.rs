//! Polynomials over Z and Z[i], ring presentations, and their reduction to
//! module presentations.

mod build;
mod expr;
mod presentation;

pub use build::{build_module_ring, finite_field, first_irreducible_mod_p, zmod, MAX_AN_INDEX};
pub(crate) use build::an_index;
pub use expr::Poly;
pub use presentation::{Base, EliminatedQuotient, Family, RingPresentation};

use std::fmt;

use crate::arith::gcd_i128;
use crate::error::{Error, Result};

/// Polynomial with integer coefficients, lowest degree first. The zero
/// polynomial has no coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<i128>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<i128>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn monomial(c: i128, degree: usize) -> Self {
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: i128) -> i128 {
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * x + c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[i128], i: usize| v.get(i).copied().unwrap_or(0);
        Self::new((0..n).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: i128) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Renders with the given variable name, highest degree first.
    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (deg, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let neg = c < 0;
            let abs = c.unsigned_abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match deg {
                0 => String::new(),
                1 => var.to_string(),
                d => format!("{var}^{d}"),
            };
            if abs != 1 || deg == 0 {
                out.push_str(&abs.to_string());
                if deg > 0 {
                    out.push('*');
                }
            }
            out.push_str(&mono);
        }
        out
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("x"))
    }
}

/// Phi_{p^k}(x) = sum_{j<p} x^{j p^{k-1}}.
pub fn cyclotomic(p: u64, k: u32) -> Result<IntPolynomial> {
    if !crate::arith::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("cyclotomic index exponent must be positive".into()));
    }
    let step = crate::arith::checked_pow(p, k - 1)
        .filter(|s| s.saturating_mul(p as u128) <= 1 << 20)
        .ok_or(Error::Overflow("cyclotomic degree"))? as usize;
    let mut coeffs = vec![0; step * (p as usize - 1) + 1];
    for j in 0..p as usize {
        coeffs[j * step] = 1;
    }
    Ok(IntPolynomial::new(coeffs))
}

/// Splits f into a positive content and a primitive part.
pub fn content_primitive(f: &IntPolynomial) -> Result<(i128, IntPolynomial)> {
    if f.is_zero() {
        return Err(Error::InvalidArgument("content of the zero polynomial".into()));
    }
    let c = f.coeffs.iter().fold(0, |g, &x| gcd_i128(g, x)).abs();
    Ok((c, IntPolynomial::new(f.coeffs.iter().map(|x| x / c).collect())))
}
