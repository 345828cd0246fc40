//! Candidates that pretend to compute a norm on absolutely summable
//! sequences. None can succeed; they are the inputs of the falsifier.

use crate::machine::{Functional, MachineError, Oracle};
use crate::names::{SequenceKind, SequenceSpec};
use crate::numerics::{Dyadic, Rational};

/// A functional together with the exact value it claims to approximate.
pub trait NormCandidate: Functional {
    /// The claimed norm of `spec`, when the candidate commits to one.
    fn claimed_value(&self, spec: &SequenceSpec) -> Option<Rational>;
}

/// `Σ_i |x_i|` for specs with finitely many nonzero entries.
fn l1_of_finite(spec: &SequenceSpec) -> Option<Rational> {
    match spec.kind() {
        SequenceKind::Zeros => Some(Rational::zero()),
        SequenceKind::Spike { value, .. } => Some(value.abs()),
        SequenceKind::FiniteList { values } => {
            Some(values.iter().fold(Rational::zero(), |a, v| a + v.abs()))
        }
        _ => None,
    }
}

/// `max_{i<=k} |x_i|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedSup(pub u64);

impl Functional for TruncatedSup {
    fn id(&self) -> String {
        format!("fake-sup{}", self.0)
    }

    fn query_bound(&self) -> Option<usize> {
        Some(self.0 as usize + 1)
    }

    fn eval(&self, oracle: &mut Oracle<'_>, n: u32) -> Result<Dyadic, MachineError> {
        let mut best = Dyadic::zero();
        for i in 0..=self.0 {
            let a = oracle.query(i, n)?;
            let a = oracle.abs(&a);
            best = oracle.max(&best, &a);
        }
        Ok(best)
    }
}

impl NormCandidate for TruncatedSup {
    fn claimed_value(&self, spec: &SequenceSpec) -> Option<Rational> {
        // Commits to its own formula, which vanishes on every y with support past k.
        Some(
            (0..=self.0)
                .map(|i| spec.value(i).abs())
                .max()
                .unwrap_or_else(Rational::zero),
        )
    }
}

/// `Σ_{i<=k} 2^-i |x_i|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedWeighted(pub u64);

impl Functional for TruncatedWeighted {
    fn id(&self) -> String {
        format!("fake-weighted{}", self.0)
    }

    fn query_bound(&self) -> Option<usize> {
        Some(self.0 as usize + 1)
    }

    fn eval(&self, oracle: &mut Oracle<'_>, n: u32) -> Result<Dyadic, MachineError> {
        // Σ 2^-i 2^-(n+1) < 2^-n.
        let mut sum = Dyadic::zero();
        for i in 0..=self.0 {
            let a = oracle.query(i, n + 1)?;
            let a = oracle.abs(&a);
            let t = oracle.shl(&a, -(i as i64));
            sum = oracle.add(&sum, &t);
        }
        Ok(sum)
    }
}

impl NormCandidate for TruncatedWeighted {
    fn claimed_value(&self, spec: &SequenceSpec) -> Option<Rational> {
        Some((0..=self.0).fold(Rational::zero(), |acc, i| {
            acc + spec.value(i).abs().mul_pow2(-(i as i64))
        }))
    }
}

/// `Σ_{i<=n} |x_i|`: reads more coordinates as the precision grows, hoping
/// to converge to `d_1(x, 0)`. Claims to be exactly that.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PrecisionPrefix;

impl Functional for PrecisionPrefix {
    fn id(&self) -> String {
        "fake-prefix".into()
    }

    fn eval(&self, oracle: &mut Oracle<'_>, n: u32) -> Result<Dyadic, MachineError> {
        // n+1 errors of 2^-(n+b) with n+1 <= 2^b.
        let b = 64 - u64::from(n + 1).leading_zeros();
        let mut sum = Dyadic::zero();
        for i in 0..=u64::from(n) {
            let a = oracle.query(i, n + b)?;
            let a = oracle.abs(&a);
            sum = oracle.add(&sum, &a);
        }
        Ok(sum)
    }
}

impl NormCandidate for PrecisionPrefix {
    fn claimed_value(&self, spec: &SequenceSpec) -> Option<Rational> {
        l1_of_finite(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::run;
    use crate::names::SequenceName;

    #[test]
    fn candidates_meet_their_own_formulas_on_early_support() {
        let values: Vec<Rational> = ["1/3", "-2", "5/7"].iter().map(|s| s.parse().unwrap()).collect();
        let spec = SequenceSpec::finite_list(values);
        let name = SequenceName::standard(spec.clone());
        let cands: [&dyn NormCandidate; 3] =
            [&TruncatedSup(3), &TruncatedWeighted(3), &PrecisionPrefix];
        for c in cands {
            for n in 2..12 {
                let out = run(c, &name, n).unwrap().output.to_rational();
                let claim = c.claimed_value(&spec).unwrap();
                assert!((out - claim).abs() <= Rational::one().mul_pow2(-(n as i64)), "{}", c.id());
            }
        }
    }
}
