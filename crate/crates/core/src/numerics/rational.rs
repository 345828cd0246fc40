use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Dyadic, ParseNumberError};

/// Exact rational number in lowest terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `num/den`. Panics if `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        let den = den.into();
        assert!(!den.is_zero(), "rational with zero denominator");
        Rational(BigRational::new(num.into(), den))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
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

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn signum(&self) -> i32 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn pow(&self, exp: u32) -> Self {
        Rational(num_traits::pow(self.0.clone(), exp as usize))
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Smallest integer not below the value.
    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// Exact multiplication by `2^k` (`k` may be negative).
    pub fn mul_pow2(&self, k: i64) -> Self {
        let shift = k.unsigned_abs() as usize;
        if k >= 0 {
            Rational::new(self.numer() << shift, self.denom().clone())
        } else {
            Rational::new(self.numer().clone(), self.denom() << shift)
        }
    }

    /// Bits needed for numerator plus denominator; the operand weight used by cost meters.
    pub fn bit_len(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }

    /// Decimal rendering truncated to `places` digits, prefixed with `≈` when inexact.
    pub fn to_decimal(&self, places: usize) -> String {
        render_decimal(self.numer(), self.denom(), places)
    }
}

pub(crate) fn render_decimal(num: &BigInt, den: &BigInt, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = num.abs() * &scale;
    let digits = &scaled / den;
    let exact = (&scaled % den).is_zero();
    let int_part = &digits / &scale;
    let frac_part = &digits % &scale;
    let sign = if num.is_negative() { "-" } else { "" };
    let approx = if exact { "" } else { "≈" };
    if places == 0 {
        return format!("{approx}{sign}{int_part}");
    }
    format!("{approx}{sign}{int_part}.{frac_part:0>places$}")
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl From<&Dyadic> for Rational {
    fn from(d: &Dyadic) -> Self {
        d.to_rational()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

/// Accepts `p`, `p/q` and the dyadic literal `m*2^e`.
impl FromStr for Rational {
    type Err = ParseNumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.contains('*') {
            return s.parse::<Dyadic>().map(|d| d.to_rational());
        }
        let (num, den) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let bad = || ParseNumberError(s.to_string());
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(Rational::new(num, den))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl PartialEq<Dyadic> for Rational {
    fn eq(&self, other: &Dyadic) -> bool {
        *self == other.to_rational()
    }
}

impl PartialOrd<Dyadic> for Rational {
    fn partial_cmp(&self, other: &Dyadic) -> Option<Ordering> {
        Some(self.cmp(&other.to_rational()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!("5/2".parse::<Rational>().unwrap(), Rational::new(5, 2));
        assert_eq!("-4/6".parse::<Rational>().unwrap(), Rational::new(-2, 3));
        assert_eq!("7".parse::<Rational>().unwrap(), Rational::from(7));
        assert_eq!("3*2^-2".parse::<Rational>().unwrap(), Rational::new(3, 4));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(Rational::new(3, 32).to_decimal(10), "0.0937500000");
        assert_eq!(Rational::new(1, 3).to_decimal(4), "≈0.3333");
        assert_eq!(Rational::new(-5, 2).to_decimal(2), "-2.50");
    }
}
