//! Coefficient fields and scale-tagged scalars.
//!
//! All algebra is generic over [`Coeff`], implemented for exact rationals
//! ([`BigRational`]) and for `f64`. A [`Scalar`] pairs a coefficient with an
//! optional irrational scale carried as an explicit integer power, so that
//! e.g. Gaussian partition functions stay exact as `rational * sqrt(pi)^M`.

use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Field of multivector coefficients.
pub trait Coeff: Clone + fmt::Debug + Send + Sync + Num + Neg<Output = Self> + 'static {
    fn from_i64(v: i64) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    fn from_rational(v: &BigRational) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact fields report true; floating coefficients report false.
    fn is_exact() -> bool;
}

impl Coeff for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn from_rational(v: &BigRational) -> Self {
        v.clone()
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn is_exact() -> bool {
        true
    }
}

impl Coeff for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }
    fn from_rational(v: &BigRational) -> Self {
        rational_to_f64(v)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_exact() -> bool {
        false
    }
}

/// Converts a rational to the nearest-ish double, robust to huge numerators
/// and denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let shift = r.numer().bits().max(r.denom().bits()) as i64 - 60;
    let n = r.numer() >> (shift.max(0) as usize);
    let d = r.denom() >> (shift.max(0) as usize);
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"n"`, `"-n"` or `"n/d"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// A named positive constant, e.g. `sqrt_pi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleTag {
    pub symbol: String,
    #[serde(rename = "float")]
    pub value: f64,
}

impl ScaleTag {
    pub fn sqrt_pi() -> Self {
        ScaleTag {
            symbol: "sqrt_pi".to_string(),
            value: std::f64::consts::PI.sqrt(),
        }
    }
}

/// `value * tag^power`. A missing tag means power 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Scalar<C = BigRational> {
    pub value: C,
    pub scale: Option<ScaleTag>,
    pub power: i32,
}

pub type ExactScalar = Scalar<BigRational>;

impl<C: Coeff> Scalar<C> {
    pub fn plain(value: C) -> Self {
        Scalar {
            value,
            scale: None,
            power: 0,
        }
    }

    pub fn scaled(value: C, scale: Option<ScaleTag>, power: i32) -> Self {
        match scale {
            Some(tag) if power != 0 => Scalar {
                value,
                scale: Some(tag),
                power,
            },
            _ => Scalar::plain(value),
        }
    }

    pub fn zero() -> Self {
        Scalar::plain(C::zero())
    }

    fn scale_key(&self) -> (Option<&str>, i32) {
        match &self.scale {
            Some(t) if self.power != 0 => (Some(t.symbol.as_str()), self.power),
            _ => (None, 0),
        }
    }

    fn describe_scale(&self) -> String {
        match self.scale_key() {
            (Some(s), p) => format!("{s}^{p}"),
            _ => "1".to_string(),
        }
    }

    /// Addition; unequal scale powers are an error unless one side is zero.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if other.value.is_zero() {
            return Ok(self.clone());
        }
        if self.value.is_zero() {
            return Ok(other.clone());
        }
        if self.scale_key() != other.scale_key() {
            return Err(Error::ScaleMismatch {
                left: self.describe_scale(),
                right: other.describe_scale(),
            });
        }
        Ok(Scalar {
            value: self.value.clone() + other.value.clone(),
            scale: self.scale.clone(),
            power: self.power,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let (ls, lp) = self.scale_key();
        let (rs, rp) = other.scale_key();
        let scale = match (ls, rs) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::ScaleMismatch {
                    left: self.describe_scale(),
                    right: other.describe_scale(),
                })
            }
            (Some(_), _) => self.scale.clone(),
            (None, _) => other.scale.clone(),
        };
        Ok(Scalar::scaled(
            self.value.clone() * other.value.clone(),
            scale,
            lp + rp,
        ))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        let inv = Scalar {
            value: C::one() / other.value.clone(),
            scale: other.scale.clone(),
            power: -other.power,
        };
        self.checked_mul(&inv)
    }

    pub fn to_f64(&self) -> f64 {
        let v = self.value.to_f64();
        match &self.scale {
            Some(t) if self.power != 0 => v * t.value.powi(self.power),
            _ => v,
        }
    }
}

impl fmt::Display for Scalar<BigRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.scale_key() {
            (Some(s), p) => write!(f, "{} * {}^{}", self.value, s, p),
            _ => write!(f, "{}", self.value),
        }
    }
}

/// Evaluates `c^e` for integer exponent `e >= 0`.
pub fn pow<C: Coeff>(c: &C, e: u32) -> C {
    num_traits::pow::pow(c.clone(), e as usize)
}

/// Sign of a rational as -1, 0, 1.
pub fn signum(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}
