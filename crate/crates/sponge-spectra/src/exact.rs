//! Exact rational arithmetic for map coefficients.
//!
//! Contraction ratios and translations are kept as arbitrary-precision
//! rationals so that exact-overlap tests, disjointness tests and stopping
//! comparisons are decided exactly. Floating point enters only downstream,
//! through logarithms.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// An exact rational number with convenience constructors.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub BigRational);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactParseError {
    #[error("empty numeric literal")]
    Empty,
    #[error("invalid numeric literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in rational pair")]
    ZeroDenominator,
}

impl Exact {
    pub fn zero() -> Self {
        Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Exact(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact conversion of a finite `f64` (binary mantissa times power of two).
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Exact)
    }

    /// 2^-k for k >= 0.
    pub fn pow2_neg(k: u32) -> Self {
        Exact(BigRational::new(
            BigInt::one(),
            BigInt::from(BigUint::from(2u32).pow(k)),
        ))
    }

    /// Parses a decimal literal with optional sign, fraction and exponent,
    /// e.g. `0.25`, `-3`, `1.5e-2`. The value is represented exactly.
    pub fn parse_decimal(s: &str) -> Result<Self, ExactParseError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ExactParseError::Empty);
        }
        let (mantissa, exp10) = match s.find(['e', 'E']) {
            Some(pos) => {
                let exp: i64 = s[pos + 1..]
                    .parse()
                    .map_err(|_| ExactParseError::Invalid(s.to_string()))?;
                (&s[..pos], exp)
            }
            None => (s, 0),
        };
        let (sign, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = match digits.split_once('.') {
            Some((a, b)) => (a, b),
            None => (digits, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(ExactParseError::Invalid(s.to_string()));
        }
        let all: String = format!("{int_part}{frac_part}");
        if !all.chars().all(|c| c.is_ascii_digit()) {
            return Err(ExactParseError::Invalid(s.to_string()));
        }
        let num = BigInt::from_str(&all).map_err(|_| ExactParseError::Invalid(s.to_string()))?;
        let mut value = BigRational::from_integer(num * BigInt::from(sign));
        let shift = exp10 - frac_part.len() as i64;
        let ten = BigInt::from(10u32);
        if shift >= 0 {
            value *= BigRational::from_integer(ten.pow(shift as u32));
        } else {
            value /= BigRational::from_integer(ten.pow((-shift) as u32));
        }
        Ok(Exact(value))
    }

    pub fn abs(&self) -> Self {
        Exact(self.0.abs())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // Out-of-range rationals do not occur for validated sponges.
            if self.0.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::ops::Add for &Exact {
    type Output = Exact;
    fn add(self, rhs: &Exact) -> Exact {
        Exact(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub for &Exact {
    type Output = Exact;
    fn sub(self, rhs: &Exact) -> Exact {
        Exact(&self.0 - &rhs.0)
    }
}

impl std::ops::Mul for &Exact {
    type Output = Exact;
    fn mul(self, rhs: &Exact) -> Exact {
        Exact(&self.0 * &rhs.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(Exact::parse_decimal("0.25").unwrap(), Exact::ratio(1, 4));
        assert_eq!(Exact::parse_decimal("-0.5").unwrap(), Exact::ratio(-1, 2));
        assert_eq!(Exact::parse_decimal("3").unwrap(), Exact::from_int(3));
        assert_eq!(Exact::parse_decimal("1.5e-2").unwrap(), Exact::ratio(3, 200));
        assert_eq!(Exact::parse_decimal("2e3").unwrap(), Exact::from_int(2000));
        assert_eq!(Exact::parse_decimal(".75").unwrap(), Exact::ratio(3, 4));
    }

    #[test]
    fn rejects_garbage() {
        assert!(Exact::parse_decimal("").is_err());
        assert!(Exact::parse_decimal("1.2.3").is_err());
        assert!(Exact::parse_decimal("abc").is_err());
        assert!(Exact::parse_decimal(".").is_err());
    }

    #[test]
    fn f64_round_trip_is_exact_for_dyadic() {
        let x = Exact::from_f64(0.375).unwrap();
        assert_eq!(x, Exact::ratio(3, 8));
        assert_eq!(Exact::pow2_neg(6), Exact::ratio(1, 64));
    }
}
