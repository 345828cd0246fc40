//! Tail sums `Σ α(x_k)/2^k` and the shifted variant whose cord depends on `x_0`.

use crate::machine::{Functional, MachineError, Oracle};
use crate::numerics::{exp2_neg, Dyadic};

/// Term `α(x_k)/2^k` from one query at precision `prec`. The α evaluation is
/// truncated at `prec` as well, so the term is off by less than `2^(1-prec-k)`.
fn term(oracle: &mut Oracle<'_>, k: u64, prec: u32) -> Result<Dyadic, MachineError> {
    let a = oracle.query(k, prec)?;
    let t = oracle.alpha(&a, prec);
    Ok(oracle.shl(&t, -(k as i64)))
}

/// `f(x) = Σ_k α(x_k)/2^k`.
///
/// Queries coordinates `0..=n+1`, coordinate `k` at precision `n+k+3`. The
/// per-term errors sum below `2^-(n+1)` and the dropped tail is below
/// `2^-(n+1)` because each term is below `2^-k`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TailSum;

impl Functional for TailSum {
    fn id(&self) -> String {
        "tailsum".into()
    }

    fn eval(&self, oracle: &mut Oracle<'_>, n: u32) -> Result<Dyadic, MachineError> {
        let mut sum = Dyadic::zero();
        for k in 0..=u64::from(n) + 1 {
            let t = term(oracle, k, n + k as u32 + 3)?;
            sum = oracle.add(&sum, &t);
        }
        Ok(sum)
    }
}

/// Same truncation as [`TailSum`], evaluated back to front in Horner form.
#[derive(Debug, Clone, Copy, Default)]
pub struct TailSumAlt;

impl Functional for TailSumAlt {
    fn id(&self) -> String {
        "tailsum-alt".into()
    }

    fn eval(&self, oracle: &mut Oracle<'_>, n: u32) -> Result<Dyadic, MachineError> {
        let mut acc = Dyadic::zero();
        for k in (0..=u64::from(n) + 1).rev() {
            let prec = n + k as u32 + 3;
            let a = oracle.query(k, prec)?;
            // Horner step: acc = α(x_k) + acc/2, the k-th level is exact up to the α truncation.
            let t = oracle.alpha(&a, prec + k as u32);
            let half = oracle.shl(&acc, -1);
            acc = oracle.add(&t, &half);
        }
        Ok(acc)
    }
}

/// Plan shared by both shifted implementations: `λ` from a precision-0 query
/// and the number `K` of leading terms that still matter.
fn shifted_plan(oracle: &mut Oracle<'_>, n: u32) -> Result<u64, MachineError> {
    let a0 = oracle.query(0, 0)?;
    // |a0 - x0| <= 1, hence ceil|a0| - 2 < |x0|.
    let lambda = a0.abs().to_rational().ceil() - num_bigint::BigInt::from(2);
    let lambda = lambda.max(num_bigint::BigInt::from(0));
    let lambda = u64::try_from(lambda).unwrap_or(u64::MAX);
    Ok((u64::from(n) + 2).saturating_sub(lambda))
}

/// `2^-|x0|` times the truncated sum, rounded onto the `2^-(n+3)` grid.
fn shifted_finish(
    oracle: &mut Oracle<'_>,
    x0: &Dyadic,
    sum: &Dyadic,
    n: u32,
) -> Dyadic {
    let abs0 = oracle.abs(x0);
    oracle.charge(abs0.bit_len().max(1) * u64::from(n + 6));
    let scale = exp2_neg(&abs0, n + 6);
    let product = oracle.mul(&scale, sum);
    oracle.round(&product, n + 3)
}

/// `g(x) = Σ_k α(x_k)/2^(k+|x_0|)`.
///
/// With `λ <= |x_0|` the terms `k >= K = max(0, n+2-λ)` contribute at most
/// `2^-(n+1)`, so only coordinates below `K` are read. The cord therefore
/// shrinks as `|x_0|` grows.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShiftedTailSum;

impl Functional for ShiftedTailSum {
    fn id(&self) -> String {
        "shifted-tailsum".into()
    }

    fn eval(&self, oracle: &mut Oracle<'_>, n: u32) -> Result<Dyadic, MachineError> {
        let k_max = shifted_plan(oracle, n)?;
        if k_max == 0 {
            return Ok(Dyadic::zero());
        }
        let x0 = oracle.query(0, n + 6)?;
        let mut sum = oracle.alpha(&x0, n + 6);
        for k in 1..k_max {
            let t = term(oracle, k, n + k as u32 + 5)?;
            sum = oracle.add(&sum, &t);
        }
        Ok(shifted_finish(oracle, &x0, &sum, n))
    }
}

/// [`ShiftedTailSum`] with the tail coordinates read in descending order.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShiftedTailSumAlt;

impl Functional for ShiftedTailSumAlt {
    fn id(&self) -> String {
        "shifted-tailsum-alt".into()
    }

    fn eval(&self, oracle: &mut Oracle<'_>, n: u32) -> Result<Dyadic, MachineError> {
        let k_max = shifted_plan(oracle, n)?;
        if k_max == 0 {
            return Ok(Dyadic::zero());
        }
        let x0 = oracle.query(0, n + 6)?;
        let mut sum = Dyadic::zero();
        for k in (1..k_max).rev() {
            let t = term(oracle, k, n + k as u32 + 5)?;
            sum = oracle.add(&t, &sum);
        }
        let head = oracle.alpha(&x0, n + 6);
        sum = oracle.add(&head, &sum);
        Ok(shifted_finish(oracle, &x0, &sum, n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::run;
    use crate::names::{SequenceName, SequenceSpec};
    use crate::numerics::{alpha, Rational};

    fn within(out: &Dyadic, exact: &Rational, n: u32) -> bool {
        (out.to_rational() - exact).abs() <= Rational::one().mul_pow2(-(n as i64))
    }

    #[test]
    fn tail_sum_examples() {
        let ones = SequenceName::standard(SequenceSpec::geometric(Rational::one()));
        let spike = SequenceName::standard(SequenceSpec::spike(0, Rational::one()));
        let zeros = SequenceName::standard(SequenceSpec::zeros());
        for n in 0..12 {
            for f in [&TailSum as &dyn Functional, &TailSumAlt] {
                let r = run(f, &zeros, n).unwrap();
                assert!(r.output.is_zero());
                assert_eq!(r.trace.cord, (0..=u64::from(n) + 1).collect::<Vec<_>>());
                assert!(within(&run(f, &ones, n).unwrap().output, &Rational::one(), n));
                assert!(within(&run(f, &spike, n).unwrap().output, &Rational::new(1, 2), n));
            }
        }
    }

    #[test]
    fn shifted_examples() {
        let spike = SequenceName::standard(SequenceSpec::spike(0, Rational::from(3)));
        let exact = Rational::new(3, 32);
        for n in 0..12 {
            for f in [&ShiftedTailSum as &dyn Functional, &ShiftedTailSumAlt] {
                let r = run(f, &spike, n).unwrap();
                assert!(within(&r.output, &exact, n), "n={n} {}", r.output);
            }
        }
    }

    #[test]
    fn shifted_against_geometric_oracle() {
        // x_k = r^k with x_0 = 1: g = (1/2) Σ α(r^k)/2^k, summed far past the error budget.
        let r = Rational::new(2, 3);
        let name = SequenceName::standard(SequenceSpec::geometric(r.clone()));
        let mut exact = Rational::zero();
        for k in 0..80u32 {
            exact = exact + alpha(&r.pow(k)).mul_pow2(-(k as i64) - 1);
        }
        for n in 0..14 {
            let out = run(&ShiftedTailSum, &name, n).unwrap().output;
            // The 80-term oracle is itself off by < 2^-80.
            assert!(within(&out, &exact, n));
        }
    }

    #[test]
    fn shifted_cord_shrinks_with_x0() {
        let small = SequenceName::standard(SequenceSpec::zeros());
        let big = SequenceName::standard(SequenceSpec::spike(0, Rational::from(8)));
        let a = run(&ShiftedTailSum, &small, 6).unwrap().trace.cord.len();
        let b = run(&ShiftedTailSum, &big, 6).unwrap().trace.cord.len();
        assert!(a > b, "{a} vs {b}");
    }
}
