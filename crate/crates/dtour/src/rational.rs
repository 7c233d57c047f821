//! Exact fraction arithmetic.
//!
//! Every continuous quantity in this crate (covering radius, offsets along
//! edges, tour lengths, budgets) is a `Rational`. Coverage conditions sit
//! exactly on rational boundaries, so floating point is never used.

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

/// An exact rational number, always in lowest terms with positive denominator.
///
/// Backed by `i128`; arithmetic panics on overflow instead of wrapping.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub fn new(numer: i128, denom: i128) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(Ratio::new(numer, denom))
    }

    pub const fn zero() -> Self {
        Rational(Ratio::new_raw(0, 1))
    }

    pub const fn one() -> Self {
        Rational(Ratio::new_raw(1, 1))
    }

    pub fn from_int(n: i128) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> i128 {
        self.0.floor().to_integer()
    }

    /// Smallest integer not below the value.
    pub fn ceil(&self) -> i128 {
        self.0.ceil().to_integer()
    }

    /// Fractional part `x - floor(x)`, always in `[0, 1)`.
    pub fn fract(&self) -> Self {
        *self - Rational::from_int(self.floor())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn recip(self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("bad rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Parses `p/q` or a plain integer `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let bad = || ParseRationalError::Malformed(s.to_string());
        match s.split_once('/') {
            None => Ok(Rational::from_int(s.parse::<i128>().map_err(|_| bad())?)),
            Some((p, q)) => {
                let p: i128 = p.trim().parse().map_err(|_| bad())?;
                let q: i128 = q.trim().parse().map_err(|_| bad())?;
                if q == 0 {
                    return Err(ParseRationalError::ZeroDenominator(s.to_string()));
                }
                Ok(Rational::new(p, q))
            }
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n as i128)
    }
}

impl From<u32> for Rational {
    fn from(n: u32) -> Self {
        Rational::from_int(n as i128)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = *self + rhs;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        *self = *self - rhs;
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Rational", 2)?;
        s.serialize_field("num", &self.numer().to_string())?;
        s.serialize_field("den", &self.denom().to_string())?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num: String,
            den: String,
        }
        let raw = Raw::deserialize(deserializer)?;
        let num: i128 = raw.num.parse().map_err(serde::de::Error::custom)?;
        let den: i128 = raw.den.parse().map_err(serde::de::Error::custom)?;
        if den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Rational::new(num, den))
    }
}

/// `ceil(x)` clamped below at 0, as a machine integer.
pub fn ceil_nonneg(x: Rational) -> u64 {
    if x.is_negative() {
        0
    } else {
        x.ceil() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn normalizes_to_lowest_terms() {
        assert_eq!(r(2, 4), r(1, 2));
        assert_eq!(r(-3, -6), r(1, 2));
        let x = r(3, -6);
        assert_eq!(x.numer(), -1);
        assert_eq!(x.denom(), 2);
    }

    #[test]
    fn arithmetic_is_exact() {
        assert_eq!(r(1, 3) + r(1, 6), r(1, 2));
        assert_eq!(r(1, 2) - r(3, 4), r(-1, 4));
        assert_eq!(r(2, 3) * r(3, 4), r(1, 2));
        assert_eq!(r(1, 2) / r(1, 4), r(2, 1));
    }

    #[test]
    fn floor_and_fract() {
        assert_eq!(r(7, 2).floor(), 3);
        assert_eq!(r(-1, 2).floor(), -1);
        assert_eq!(r(7, 2).fract(), r(1, 2));
        assert_eq!(r(3, 2).ceil(), 2);
        assert_eq!(Rational::from_int(4).ceil(), 4);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("3/4".parse::<Rational>().unwrap(), r(3, 4));
        assert_eq!("-5".parse::<Rational>().unwrap(), Rational::from_int(-5));
        assert_eq!(" 6 / 8 ".parse::<Rational>().unwrap(), r(3, 4));
        assert_eq!(r(3, 4).to_string(), "3/4");
        assert_eq!(Rational::from_int(7).to_string(), "7");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn json_mirror() {
        let x = r(-3, 7);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"num":"-3","den":"7"}"#);
        let back: Rational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }
}
