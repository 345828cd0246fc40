//! Truncation metrics `d_1`, `d_2` and the product-topology metric `D`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::names::{SequenceName, SequenceSpec};
use crate::numerics::{rat_approx, sqrt_floor, Dyadic, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    /// `Σ |x_i - y_i|`.
    D1,
    /// `Σ (x_i - y_i)²`, without a square root.
    D2,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::D1 => "d1",
            Metric::D2 => "d2",
        })
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "d1" => Ok(Metric::D1),
            "d2" => Ok(Metric::D2),
            _ => Err(format!("unknown metric `{s}` (d1, d2)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("spec `{0}` carries no summability modulus")]
    MissingModulus(String),
}

fn term(metric: Metric, x: &SequenceSpec, y: &SequenceSpec, i: u64) -> Rational {
    let d = x.value(i) - y.value(i);
    match metric {
        Metric::D1 => d.abs(),
        Metric::D2 => &d * &d,
    }
}

fn partial(metric: Metric, x: &SequenceSpec, y: &SequenceSpec, upto: u64) -> Rational {
    (0..upto).fold(Rational::zero(), |acc, i| acc + term(metric, x, y, i))
}

/// `d_{↾M}`: the exact sum over `i <= M`. Nondecreasing in `M` and never above the metric.
pub fn metric_lower(metric: Metric, x: &SequenceSpec, y: &SequenceSpec, m: u64) -> Rational {
    partial(metric, x, y, m + 1)
}

/// Modulus value `μ(k)` for a spec, using the square modulus for `d_2`.
fn modulus_of(metric: Metric, s: &SequenceSpec, k: u64) -> Result<u64, MetricError> {
    let m = match metric {
        Metric::D1 => s.modulus(k),
        Metric::D2 => s.square_modulus(k),
    };
    m.ok_or_else(|| MetricError::MissingModulus(s.to_string()))
}

/// The metric to within `2^-n`.
///
/// The sum is cut at `N = max(μ_x(k), μ_y(k))`. For `d_1` with `k = n+2`, the
/// tail is at most `2·2^-k`. For `d_2` the tail of squared differences is at
/// most `2Σx_i² + 2Σy_i² <= 4·2^-k`, so `k = n+3`. The exact partial sum is
/// then truncated onto the `2^-(n+1)` grid.
///
/// With `sqrt` set (only meaningful for `d_2`) the square root of the sum is
/// returned instead, which needs the sum itself to `2^-(2n+3)`.
pub fn metric_full(
    metric: Metric,
    x: &SequenceSpec,
    y: &SequenceSpec,
    n: u32,
    sqrt: bool,
) -> Result<Dyadic, MetricError> {
    let sqrt = sqrt && metric == Metric::D2;
    let k = match (metric, sqrt) {
        (Metric::D1, _) => u64::from(n) + 2,
        (Metric::D2, false) => u64::from(n) + 3,
        (Metric::D2, true) => 2 * u64::from(n) + 5,
    };
    let cut = modulus_of(metric, x, k)?.max(modulus_of(metric, y, k)?);
    let sum = partial(metric, x, y, cut);
    Ok(if sqrt {
        // sqrt(S + T) - sqrt(S) <= sqrt(T) <= 2^-(n+1.5).
        sqrt_floor(&sum, n + 1)
    } else {
        rat_approx(&sum, n + 1)
    })
}

/// `D(x, y) = sup_n min(|x_n - y_n|, 1)/(n+1)` to within `2^-k`.
///
/// Indices from `2^(k+1)` on contribute at most `2^-(k+1)`; each windowed term
/// uses answers at precision `k+4` and is truncated at `k+3`, so it is off
/// by at most `2^-(k+2)`.
pub fn product_metric_d(x: &SequenceName, y: &SequenceName, k: u32) -> Dyadic {
    let window = 1u64 << (k + 1);
    let one = Rational::one();
    let mut best = Dyadic::zero();
    for i in 0..window {
        let diff = (x.approx(i, k + 4) - y.approx(i, k + 4)).abs().to_rational();
        let bounded = diff.min(one.clone());
        let t = rat_approx(&(bounded / Rational::from(i as i64 + 1)), k + 3);
        if t > best {
            best = t;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn lower_examples() {
        let x = SequenceSpec::spike(0, Rational::one());
        let y = SequenceSpec::spike(1, Rational::one());
        assert_eq!(metric_lower(Metric::D1, &x, &y, 0), Rational::one());
        for m in 1..6 {
            assert_eq!(metric_lower(Metric::D1, &x, &y, m), Rational::from(2));
            assert_eq!(metric_lower(Metric::D2, &x, &y, m), Rational::from(2));
            assert_eq!(metric_lower(Metric::D1, &x, &x, m), Rational::zero());
        }
    }

    #[test]
    fn full_examples() {
        let g = SequenceSpec::geometric(q("1/2")).with_modulus_str("k+1").unwrap();
        let z = SequenceSpec::zeros().with_modulus_str("0").unwrap();
        for n in 0..16 {
            let d = metric_full(Metric::D1, &g, &z, n, false).unwrap();
            assert!((d.to_rational() - Rational::from(2)).abs() <= Rational::one().mul_pow2(-(n as i64)));
            assert!(metric_full(Metric::D1, &g, &g, n, false).unwrap().is_zero());
            // Σ 4^-k = 4/3.
            let d2 = metric_full(Metric::D2, &g, &z, n, false).unwrap();
            assert!((d2.to_rational() - q("4/3")).abs() <= Rational::one().mul_pow2(-(n as i64)));
        }
    }

    #[test]
    fn sqrt_flag() {
        let x = SequenceSpec::finite_list(vec![q("3"), q("4")]).with_modulus_str("2").unwrap();
        let z = SequenceSpec::zeros().with_modulus_str("0").unwrap();
        let d = metric_full(Metric::D2, &x, &z, 8, true).unwrap();
        assert_eq!(d, Dyadic::from_int(5));
        assert_eq!(metric_full(Metric::D2, &x, &z, 8, false).unwrap(), Dyadic::from_int(25));
    }

    #[test]
    fn missing_modulus() {
        let x = SequenceSpec::spike(0, Rational::one());
        let z = SequenceSpec::zeros().with_modulus_str("0").unwrap();
        assert!(matches!(
            metric_full(Metric::D1, &x, &z, 3, false),
            Err(MetricError::MissingModulus(_))
        ));
    }

    #[test]
    fn product_metric_examples() {
        let z = SequenceName::standard(SequenceSpec::zeros());
        let s0 = SequenceName::standard(SequenceSpec::spike(0, Rational::from(10)));
        let s3 = SequenceName::standard(SequenceSpec::spike(3, Rational::from(10)));
        for k in 0..8 {
            let eps = Rational::one().mul_pow2(-(k as i64));
            assert!(product_metric_d(&z, &z, k).is_zero());
            assert!((product_metric_d(&z, &s0, k).to_rational() - Rational::one()).abs() <= eps);
            assert!((product_metric_d(&z, &s3, k).to_rational() - q("1/4")).abs() <= eps);
        }
    }
}
