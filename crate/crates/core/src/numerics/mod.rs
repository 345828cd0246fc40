//! Exact dyadic and rational arithmetic.
//!
//! Nothing in the engine touches floating point. Every approximation is a
//! [`Dyadic`] carrying an explicit error contract of the form `|r - x| <= 2^-n`.

mod dyadic;
mod rational;

pub use dyadic::Dyadic;
pub use rational::Rational;

use num_bigint::BigInt;
use num_traits::One;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number literal `{0}`")]
pub struct ParseNumberError(pub String);

/// `|q| / (1 + |q|)`, mapping the reals onto `[0, 1)`. 1-Lipschitz.
pub fn alpha(q: &Rational) -> Rational {
    let a = q.abs();
    let denom = Rational::one() + &a;
    a / denom
}

/// Rounds `d` to the nearest multiple of `2^-n` (ties to even).
pub fn round(d: &Dyadic, n: u32) -> Dyadic {
    d.round(n)
}

/// Truncates `q` toward zero onto the `2^-n` grid, so `|result - q| < 2^-n`.
pub fn rat_approx(q: &Rational, n: u32) -> Dyadic {
    Dyadic::approx_rational(q, n)
}

/// `ln 2` to within `2^-prec`, from `sum_{k>=1} 1/(k 2^k)`.
fn ln2_approx(prec: u32) -> Dyadic {
    // The tail after K terms is below 2^-K / (K+1).
    let terms = prec + 2;
    let mut sum = Rational::zero();
    for k in 1..=terms {
        sum = sum + Rational::new(1, BigInt::from(k) << k as usize);
    }
    rat_approx(&sum, prec + 1)
}

/// `2^-q` for `q >= 0`, within `2^-prec`.
///
/// Splits `q = m + r` with integer `m` and `r` in `[0, 1)`, then evaluates
/// `exp(-r ln 2)` by its alternating Taylor series in exact rationals.
pub fn exp2_neg(q: &Dyadic, prec: u32) -> Dyadic {
    assert!(!q.is_negative(), "exp2_neg expects a non-negative exponent");
    let qr = q.to_rational();
    let whole = qr.floor();
    let frac = &qr - &Rational::from_integer(whole.clone());
    let whole: i64 = whole.try_into().expect("exponent out of range");
    if frac.is_zero() {
        return Dyadic::new(1, -whole);
    }
    // Each of the three stages below contributes at most 2^-(prec+2).
    let p = prec + 2;
    let ln2 = ln2_approx(p).to_rational();
    let y = &frac * &ln2;
    let mut term = Rational::one();
    let mut sum = Rational::one();
    let mut t: u32 = 0;
    let mut factorial = BigInt::one();
    let bound = BigInt::one() << (p as usize);
    while factorial <= bound {
        t += 1;
        factorial *= t;
        term = -(&term * &y) / Rational::from(t as i64);
        sum = sum + &term;
    }
    rat_approx(&sum, p).shl(-whole)
}

/// Largest multiple of `2^-prec` whose square does not exceed `x` (`x >= 0`).
///
/// The result is within `2^-prec` of `sqrt(x)`.
pub fn sqrt_floor(x: &Rational, prec: u32) -> Dyadic {
    assert!(!x.is_negative(), "sqrt of a negative number");
    let scaled = x.mul_pow2(2 * prec as i64).floor();
    Dyadic::new(scaled.sqrt(), -(prec as i64))
}
