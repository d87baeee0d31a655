//! Numeric backings for the piecewise-polynomial core.
//!
//! Every finite `f64` is a dyadic rational, so the rational backing is exact
//! for any spectrum given in floating point. The float backing trades that
//! guarantee for speed.

use std::fmt::Debug;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backing {
    Rational,
    Float,
}

impl std::fmt::Display for Backing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backing::Rational => f.write_str("rational"),
            Backing::Float => f.write_str("float"),
        }
    }
}

/// Field operations needed by divided differences, polynomial algebra and
/// power series, plus exact conversion from `f64`.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    const BACKING: Backing;

    /// Exact for the rational backing. Panics on non-finite input.
    fn from_f64(x: f64) -> Self;

    fn from_i64(x: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Nearest value in this backing; exact for the rational backing.
    fn from_rational(q: &Rational) -> Self;

    /// Equality up to rounding noise. `scale` is the natural magnitude of the
    /// compared quantity; the rational backing ignores it.
    fn approx_eq(&self, other: &Self, scale: f64) -> bool;

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn from_usize(x: usize) -> Self {
        Self::from_i64(x as i64)
    }

    /// Lossless text encoding used by serialization.
    fn encode(&self) -> String;

    fn decode(s: &str) -> Result<Self>;
}

/// Relative tolerance for float comparisons of analytically equal quantities.
pub const FLOAT_REL_TOL: f64 = 1e-8;

impl Scalar for f64 {
    const BACKING: Backing = Backing::Float;

    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_i64(x: i64) -> Self {
        x as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }

    fn approx_eq(&self, other: &Self, scale: f64) -> bool {
        let diff = (self - other).abs();
        diff <= FLOAT_REL_TOL * self.abs().max(other.abs()) || diff <= FLOAT_REL_TOL * scale.abs()
    }

    fn encode(&self) -> String {
        format!("{:?}", self)
    }

    fn decode(s: &str) -> Result<Self> {
        f64::from_str(s.trim()).map_err(|e| Error::Parse(format!("bad float {s:?}: {e}")))
    }
}

impl Scalar for BigRational {
    const BACKING: Backing = Backing::Rational;

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }

    fn from_i64(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn approx_eq(&self, other: &Self, _scale: f64) -> bool {
        self == other
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn encode(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn decode(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_int = |t: &str| {
            BigInt::from_str(t.trim()).map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let d = parse_int(d)?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                Ok(BigRational::new(parse_int(n)?, d))
            }
            None => Ok(BigRational::from_integer(parse_int(s)?)),
        }
    }
}

/// Correctly rounded for the common cases; falls back to scaled division when
/// numerator or denominator overflow `f64`.
fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 9.0e15 && d < 9.0e15 {
            return n / d;
        }
    }
    // Scale to a 64-bit quotient, then apply the exponent.
    let nbits = q.numer().bits() as i64;
    let dbits = q.denom().bits() as i64;
    let shift = 64 - (nbits - dbits);
    let scaled = if shift >= 0 {
        (q.numer() << shift as usize) / q.denom()
    } else {
        q.numer() / (q.denom() << (-shift) as usize)
    };
    let mant = scaled.to_f64().unwrap_or(f64::NAN);
    mant * 2f64.powi(-shift as i32)
}

pub(crate) fn binomial<S: Scalar>(n: usize, k: usize) -> S {
    if k > n {
        return S::zero();
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    match i64::try_from(acc) {
        Ok(v) => S::from_i64(v),
        Err(_) => S::from_f64(acc as f64),
    }
}

pub(crate) fn factorial_f64(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

#[cfg(test)]
mod tests {
    use super::{binomial, BigInt, BigRational, Rational, Scalar};

    #[test]
    fn rational_from_f64_is_exact() {
        let q = Rational::from_f64(0.1);
        assert_eq!(q.to_f64(), 0.1);
        assert_ne!(q, Rational::new(1.into(), 10.into()));
    }

    #[test]
    fn rational_to_f64_handles_huge_parts() {
        let big = BigInt::from(3) << 2000usize;
        let q = BigRational::new(big.clone() + 1, big);
        assert!((q.to_f64() - 1.0).abs() < 1e-15);
        let tiny = BigRational::new(BigInt::from(1), BigInt::from(1) << 1100usize);
        assert_eq!(tiny.to_f64(), 0.0);
    }

    #[test]
    fn encode_decode() {
        let q = Rational::new(BigInt::from(-7), BigInt::from(12));
        assert_eq!(q.encode(), "-7/12");
        assert_eq!(Rational::decode("-7/12").unwrap(), q);
        assert_eq!(Rational::decode("5").unwrap(), Rational::from_i64(5));
        assert!(Rational::decode("1/0").is_err());
        let x = 0.1f64 + 0.2;
        assert_eq!(f64::decode(&x.encode()).unwrap(), x);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial::<f64>(5, 2), 10.0);
        assert_eq!(binomial::<f64>(3, 4), 0.0);
        assert_eq!(binomial::<Rational>(20, 10), Rational::from_i64(184756));
    }
}
