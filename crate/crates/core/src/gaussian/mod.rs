//! Gaussian integers Z[i]: Euclidean arithmetic, prime factorization and the
//! additive structure of the quotients Z[i]/(z).

mod snf;

pub use snf::{mat_mul, smith_normal_form, EuclideanDomain, Matrix, Snf};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::abelian::AbelianGroup;
use crate::arith::factorize;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianInt {
    pub re: i128,
    pub im: i128,
}

pub const ZERO: GaussianInt = GaussianInt { re: 0, im: 0 };
pub const ONE: GaussianInt = GaussianInt { re: 1, im: 0 };
pub const I: GaussianInt = GaussianInt { re: 0, im: 1 };
/// 1 + i, the prime above 2.
pub const ONE_PLUS_I: GaussianInt = GaussianInt { re: 1, im: 1 };

impl GaussianInt {
    pub const fn new(re: i128, im: i128) -> Self {
        GaussianInt { re, im }
    }

    pub const fn from_int(n: i128) -> Self {
        GaussianInt { re: n, im: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn norm(&self) -> u128 {
        (self.re * self.re + self.im * self.im) as u128
    }

    pub fn conj(&self) -> Self {
        GaussianInt::new(self.re, -self.im)
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = *self;
        let mut acc = ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// `a = q*b + r` with `norm(r) < norm(b)`, rounding each coordinate of a/b
    /// to the nearest integer.
    pub fn divmod(&self, b: &GaussianInt) -> Result<(GaussianInt, GaussianInt)> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = b.norm() as i128;
        let num = *self * b.conj();
        let q = GaussianInt::new(div_round(num.re, n), div_round(num.im, n));
        let r = *self - q * *b;
        Ok((q, r))
    }

    /// Exact quotient when `b` divides `self`.
    pub fn div_exact(&self, b: &GaussianInt) -> Option<GaussianInt> {
        if b.is_zero() {
            return None;
        }
        let n = b.norm() as i128;
        let num = *self * b.conj();
        (num.re % n == 0 && num.im % n == 0).then(|| GaussianInt::new(num.re / n, num.im / n))
    }

    pub fn divides(&self, a: &GaussianInt) -> bool {
        if self.is_zero() {
            return a.is_zero();
        }
        a.div_exact(self).is_some()
    }

    /// The unit u in {1, i, -1, -i} such that `u * self` is the canonical associate.
    pub fn canonical_unit(&self) -> GaussianInt {
        if self.is_zero() {
            return ONE;
        }
        [ONE, I, -ONE, -I]
            .into_iter()
            .find(|u| (*u * *self).is_canonical())
            .expect("exactly one associate is canonical")
    }

    /// Canonical associate: `re > 0` and `|im| <= re`, with `im >= 0` on the
    /// boundary `|im| == re`. 1+i is canonical for the prime above 2.
    pub fn canonical(&self) -> GaussianInt {
        self.canonical_unit() * *self
    }

    fn is_canonical(&self) -> bool {
        self.re > 0 && self.im.abs() <= self.re && (self.im.abs() < self.re || self.im >= 0)
    }

    pub fn gcd(a: &GaussianInt, b: &GaussianInt) -> GaussianInt {
        let (mut x, mut y) = (*a, *b);
        while !y.is_zero() {
            let (_, r) = x.divmod(&y).expect("nonzero");
            x = y;
            y = r;
        }
        x.canonical()
    }

    /// Canonical factorization into Gaussian primes.
    pub fn factor(&self) -> Result<GaussianFactorization> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("cannot factor 0".into()));
        }
        let mut rest = *self;
        let mut factors = Vec::new();
        for (p, _) in factorize(self.norm()) {
            let primes = gaussian_primes_over(p)?;
            for pi in primes {
                let mut e = 0;
                while let Some(q) = rest.div_exact(&pi) {
                    rest = q;
                    e += 1;
                }
                if e > 0 {
                    factors.push((pi, e));
                }
            }
        }
        debug_assert!(rest.is_unit());
        factors.sort_by_key(|(pi, _)| (pi.norm(), pi.re, pi.im));
        Ok(GaussianFactorization { unit: rest, factors })
    }

    /// Additive group of Z[i]/(z), assembled prime by prime:
    /// Z/p^h for a prime over p = 1 (mod 4), (Z/p^h)^2 for an inert p = 3 (mod 4),
    /// and (Z/2^k)^2 or Z/2^(k+1) x Z/2^k for (1+i)^(2k) or (1+i)^(2k+1).
    pub fn quotient_additive_structure(&self) -> Result<AbelianGroup> {
        if self.is_unit() {
            return Err(Error::InvalidArgument(format!("{self} is a unit")));
        }
        let f = self.factor()?;
        let mut pairs = Vec::new();
        for (pi, h) in f.factors {
            let n = pi.norm() as u64;
            if pi == ONE_PLUS_I {
                let k = h / 2;
                if h % 2 == 0 {
                    pairs.extend([(2, k), (2, k)]);
                } else {
                    pairs.extend([(2, k + 1), (2, k)]);
                }
            } else if let Some(p) = exact_sqrt(n) {
                // inert rational prime, norm p^2
                pairs.extend([(p, h), (p, h)]);
            } else {
                pairs.push((n, h));
            }
        }
        AbelianGroup::from_prime_powers(pairs)
    }

    /// Additive group of Z[i]/(z) read off the Smith normal form of the
    /// multiplication-by-z matrix on the Z-basis {1, i}.
    pub fn quotient_structure_by_snf(&self) -> Result<AbelianGroup> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("Z[i]/(0) is infinite".into()));
        }
        let m: Matrix<i128> = vec![vec![self.re, self.im], vec![-self.im, self.re]];
        let snf = smith_normal_form(&m);
        let orders: Vec<i64> = snf
            .diagonal()
            .into_iter()
            .map(|d| i64::try_from(d).map_err(|_| Error::Overflow("quotient invariant")))
            .collect::<Result<_>>()?;
        AbelianGroup::normalize(&orders)
    }
}

fn div_round(a: i128, n: i128) -> i128 {
    // nearest integer to a/n for n > 0, halves rounded down
    (2 * a + n).div_euclid(2 * n)
}

fn exact_sqrt(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt().round() as u64;
    (r.checked_mul(r) == Some(n)).then_some(r)
}

/// Writes an odd prime p = 1 (mod 4) as x^2 + y^2 with x > y > 0, by direct search.
pub fn two_squares(p: u64) -> Option<(u64, u64)> {
    let mut y = 1u64;
    while 2 * y * y < p {
        let rest = p - y * y;
        if let Some(x) = exact_sqrt(rest) {
            return Some((x, y));
        }
        y += 1;
    }
    None
}

/// The pairwise non-associate Gaussian primes dividing the rational prime p,
/// each in canonical form.
pub fn gaussian_primes_over(p: u64) -> Result<Vec<GaussianInt>> {
    if !crate::arith::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    Ok(match p % 4 {
        2 => vec![ONE_PLUS_I],
        3 => vec![GaussianInt::from_int(p as i128)],
        _ => {
            let (x, y) = two_squares(p).expect("p = 1 mod 4 is a sum of two squares");
            let a = GaussianInt::new(x as i128, y as i128).canonical();
            let b = GaussianInt::new(x as i128, -(y as i128)).canonical();
            let mut v = vec![a, b];
            v.sort_by_key(|z| std::cmp::Reverse(z.im));
            v
        }
    })
}

/// The canonical prime above a split p = 1 (mod 4) with positive imaginary part.
pub fn split_prime(p: u64) -> Result<GaussianInt> {
    if p % 4 != 1 {
        return Err(Error::InvalidArgument(format!("{p} does not split in Z[i]")));
    }
    Ok(gaussian_primes_over(p)?[0])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianFactorization {
    pub unit: GaussianInt,
    pub factors: Vec<(GaussianInt, u32)>,
}

impl GaussianFactorization {
    pub fn product(&self) -> GaussianInt {
        self.factors
            .iter()
            .fold(self.unit, |acc, (pi, e)| acc * pi.pow(*e))
    }
}

impl Add for GaussianInt {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        GaussianInt::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussianInt {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        GaussianInt::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for GaussianInt {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        GaussianInt::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl Neg for GaussianInt {
    type Output = Self;
    fn neg(self) -> Self {
        GaussianInt::new(-self.re, -self.im)
    }
}

impl From<i128> for GaussianInt {
    fn from(n: i128) -> Self {
        GaussianInt::from_int(n)
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imag = |b: i128| match b {
            1 => "i".to_string(),
            -1 => "-i".to_string(),
            b => format!("{b}i"),
        };
        match (self.re, self.im) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{}", imag(b)),
            (a, b) if b > 0 => write!(f, "{a}+{}", imag(b)),
            (a, b) => write!(f, "{a}{}", imag(b)),
        }
    }
}

impl FromStr for GaussianInt {
    type Err = Error;

    /// Accepts `a+bi`, `a-bi`, `bi`, `i`, `-i`, `a`, optionally in parentheses.
    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Parse(format!("bad Gaussian integer `{s}`"));
        let mut t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        while t.starts_with('(') && t.ends_with(')') {
            t = t[1..t.len() - 1].to_string();
        }
        if t.is_empty() {
            return Err(err());
        }
        let Some(body) = t.strip_suffix('i') else {
            return t.parse::<i128>().map(GaussianInt::from_int).map_err(|_| err());
        };
        let split = body
            .char_indices()
            .skip(1)
            .filter(|(_, c)| *c == '+' || *c == '-')
            .map(|(i, _)| i)
            .last();
        let (re_str, im_str) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let re: i128 = re_str.parse().map_err(|_| err())?;
        let im: i128 = match im_str {
            "" | "+" => 1,
            "-" => -1,
            other => other.parse().map_err(|_| err())?,
        };
        Ok(GaussianInt::new(re, im))
    }
}

impl Serialize for GaussianInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussianInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl EuclideanDomain for GaussianInt {
    fn zero() -> Self {
        ZERO
    }
    fn one() -> Self {
        ONE
    }
    fn is_zero(&self) -> bool {
        GaussianInt::is_zero(self)
    }
    fn euclidean_norm(&self) -> u128 {
        self.norm()
    }
    fn div_rem(&self, other: &Self) -> (Self, Self) {
        self.divmod(other).expect("nonzero divisor")
    }
    fn normalizing_unit(&self) -> Self {
        self.canonical_unit()
    }
    fn unit_inverse(&self) -> Self {
        self.conj()
    }
}
