use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ParseNumberError, Rational};

/// Exact binary rational `mantissa · 2^exponent`.
///
/// Always canonical: the mantissa is odd, or the value is zero with exponent 0.
/// Equality and hashing are therefore structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: impl Into<BigInt>, exponent: i64) -> Self {
        let mut mantissa = mantissa.into();
        if mantissa.is_zero() {
            return Dyadic::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        mantissa >>= tz as usize;
        Dyadic {
            mantissa,
            exponent: exponent + tz as i64,
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic::new(n, 0)
    }

    /// `2^-n`, the grid spacing at precision `n`.
    pub fn ulp(n: u32) -> Self {
        Dyadic::new(1, -(n as i64))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Exact multiplication by `2^k`.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    /// Operand weight used by the cost model: mantissa bits plus exponent bits.
    pub fn bit_len(&self) -> u64 {
        let exp_bits = 64 - self.exponent.unsigned_abs().leading_zeros() as u64;
        self.mantissa.bits() + exp_bits
    }

    pub fn to_rational(&self) -> Rational {
        if self.exponent >= 0 {
            Rational::from_integer(&self.mantissa << self.exponent as usize)
        } else {
            Rational::new(
                self.mantissa.clone(),
                BigInt::one() << self.exponent.unsigned_abs() as usize,
            )
        }
    }

    /// Integer `t` with `self = t · 2^-n`, if `self` lies on the `2^-n` grid.
    pub fn grid_index(&self, n: u32) -> Option<BigInt> {
        let shift = self.exponent + n as i64;
        (shift >= 0).then(|| &self.mantissa << shift as usize)
    }

    /// Nearest multiple of `2^-n`, ties to the even multiple.
    pub fn round(&self, n: u32) -> Dyadic {
        let target = -(n as i64);
        if self.exponent >= target {
            return self.clone();
        }
        let shift = (target - self.exponent) as usize;
        let (mut q, r) = self.mantissa.div_mod_floor(&(BigInt::one() << shift));
        let half = BigInt::one() << (shift - 1);
        match r.cmp(&half) {
            Ordering::Greater => q += 1,
            Ordering::Equal if q.is_odd() => q += 1,
            _ => {}
        }
        Dyadic::new(q, target)
    }

    /// Truncation of `q` toward zero onto the `2^-n` grid; the error is strictly below `2^-n`.
    pub fn approx_rational(q: &Rational, n: u32) -> Dyadic {
        let scaled = q.numer() << n as usize;
        // BigInt division truncates toward zero.
        Dyadic::new(scaled / q.denom(), -(n as i64))
    }

    /// Largest multiple of `2^-n` not above `q`.
    pub fn floor_rational(q: &Rational, n: u32) -> Dyadic {
        Dyadic::new(q.mul_pow2(n as i64).floor(), -(n as i64))
    }

    /// Smallest multiple of `2^-n` not below `q`.
    pub fn ceil_rational(q: &Rational, n: u32) -> Dyadic {
        Dyadic::new(q.mul_pow2(n as i64).ceil(), -(n as i64))
    }

    /// Exact decimal rendering to `places` digits, `≈` marks truncation.
    pub fn to_decimal(&self, places: usize) -> String {
        let q = self.to_rational();
        q.to_decimal(places)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as usize;
        let b = &other.mantissa << (other.exponent - e) as usize;
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn aligned_sum(a: &Dyadic, b: &Dyadic, negate_b: bool) -> Dyadic {
    let e = a.exponent.min(b.exponent);
    let x = &a.mantissa << (a.exponent - e) as usize;
    let y = &b.mantissa << (b.exponent - e) as usize;
    Dyadic::new(if negate_b { x - y } else { x + y }, e)
}

impl Add<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        aligned_sum(self, rhs, false)
    }
}

impl Sub<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        aligned_sum(self, rhs, true)
    }
}

impl Mul<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -self.clone()
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

/// Accepts `m*2^e`, a plain integer, or `p/q` with `q` a power of two.
impl FromStr for Dyadic {
    type Err = ParseNumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ParseNumberError(s.to_string());
        if let Some((m, rest)) = s.split_once('*') {
            let e = rest.trim().strip_prefix("2^").ok_or_else(bad)?;
            let m: BigInt = m.trim().parse().map_err(|_| bad())?;
            let e: i64 = e.trim().parse().map_err(|_| bad())?;
            return Ok(Dyadic::new(m, e));
        }
        let q: Rational = s.parse()?;
        let den = q.denom();
        let k = den.trailing_zeros().unwrap_or(0);
        if *den != BigInt::one() << k as usize {
            return Err(bad());
        }
        Ok(Dyadic::new(q.numer().clone(), -(k as i64)))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
