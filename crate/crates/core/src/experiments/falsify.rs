//! The adversary against norms on absolutely summable sequences.
//!
//! Run the candidate on the zero sequence and let `k` be the largest
//! coordinate it read. The spikes `y_1 = e_{k+1}` and `y_ℓ = ℓ e_{k+1}` have
//! names that agree with the zero name on every coordinate up to `k`, so the
//! candidate cannot tell the three inputs apart and returns the same value.

use serde::{Deserialize, Serialize};

use crate::functionals::NormCandidate;
use crate::machine::{run_with_budget, Functional, MachineError, Oracle, QueryTrace, RunFailure};
use crate::names::{SequenceName, SequenceSpec};
use crate::numerics::{Dyadic, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Outputs on `y_1` and `y_ℓ` coincide, which no norm can produce.
    HomogeneityOrDefinitenessViolated,
    /// The output misses the value the candidate claims by more than `2^-n`.
    ApproximationContractViolated,
    /// The zero run did not finish within the query budget.
    QueryBudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormCounterexample {
    pub candidate: String,
    pub n: u32,
    /// Largest coordinate read on the zero input (`None`: no queries).
    pub max_queried_coord: Option<u64>,
    pub witness_spike: Option<SequenceSpec>,
    pub scaling_factor: Rational,
    pub zero_output: Option<Dyadic>,
    pub observed_outputs: Option<(Dyadic, Dyadic)>,
    /// Claimed exact values on `y_1` and `y_ℓ`, when the candidate makes a claim.
    pub claimed: Option<(Rational, Rational)>,
    pub traces_coincide: bool,
    pub verdict: Verdict,
    pub traces: Vec<QueryTrace>,
}

impl NormCounterexample {
    /// Re-checks the verdict with exact arithmetic.
    pub fn verify(&self) -> bool {
        let n = self.n as i64;
        let eps = Rational::one().mul_pow2(-n);
        match self.verdict {
            Verdict::QueryBudgetExceeded => self.observed_outputs.is_none(),
            Verdict::ApproximationContractViolated => {
                let (Some((a1, al)), Some((c1, cl))) = (&self.observed_outputs, &self.claimed)
                else {
                    return false;
                };
                (a1.to_rational() - c1).abs() > eps || (al.to_rational() - cl).abs() > eps
            }
            Verdict::HomogeneityOrDefinitenessViolated => {
                let (Some((a1, al)), Some(z)) = (&self.observed_outputs, &self.zero_output) else {
                    return false;
                };
                // Both outputs sit within 2^(1-n) of the zero output, while ℓ 2^-(n+2) >= 1
                // means homogeneity would force F(y_ℓ) >= 1 once F(y_1) >= 2^-(n+2).
                let slack = Rational::one().mul_pow2(1 - n);
                let bound = z.to_rational().abs() + &slack;
                self.traces_coincide
                    && a1 == al
                    && a1.to_rational().abs() <= bound
                    && &self.scaling_factor * &Rational::one().mul_pow2(-(n + 2)) >= Rational::one()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FalsifyError {
    #[error("candidate failed: {0}")]
    Candidate(RunFailure),
}

/// A functional with no claimed values, so any functional can be falsified.
pub struct NoClaim<'a>(pub &'a dyn Functional);

impl Functional for NoClaim<'_> {
    fn id(&self) -> String {
        self.0.id()
    }

    fn query_bound(&self) -> Option<usize> {
        self.0.query_bound()
    }

    fn eval(&self, oracle: &mut Oracle<'_>, n: u32) -> Result<Dyadic, MachineError> {
        self.0.eval(oracle, n)
    }
}

impl NormCandidate for NoClaim<'_> {
    fn claimed_value(&self, _: &SequenceSpec) -> Option<Rational> {
        None
    }
}

/// Query streams compared by coordinate, precision and decoded value. The
/// answer words may differ in padding because the spike names carry their
/// own length schedules.
fn same_stream(a: &QueryTrace, b: &QueryTrace) -> bool {
    let decoded = |t: &QueryTrace| -> Vec<(u64, u32, Option<Dyadic>)> {
        t.queries
            .iter()
            .map(|q| (q.i, q.j, crate::encoding::decode_answer(q.i, &q.response).ok()))
            .collect()
    };
    decoded(a) == decoded(b)
}

pub fn falsify_norm(
    candidate: &dyn NormCandidate,
    n: u32,
    budget: usize,
) -> Result<NormCounterexample, FalsifyError> {
    let scaling_factor = Rational::one().mul_pow2(i64::from(n) + 2);
    let mut report = NormCounterexample {
        candidate: candidate.id(),
        n,
        max_queried_coord: None,
        witness_spike: None,
        scaling_factor: scaling_factor.clone(),
        zero_output: None,
        observed_outputs: None,
        claimed: None,
        traces_coincide: false,
        verdict: Verdict::QueryBudgetExceeded,
        traces: Vec::new(),
    };

    let zero = SequenceName::standard(SequenceSpec::zeros());
    let zero_run = match run_with_budget(candidate, &zero, n, budget) {
        Ok(r) => r,
        Err(RunFailure {
            error: MachineError::QueryBudgetExceeded(_),
            partial,
        }) => {
            report.max_queried_coord = partial.max_coordinate();
            report.traces.push(*partial);
            return Ok(report);
        }
        Err(e) => return Err(FalsifyError::Candidate(e)),
    };
    let k = zero_run.trace.max_coordinate();
    let witness = k.map_or(0, |k| k + 1);

    let y1 = SequenceSpec::spike(witness, Rational::one());
    let yl = SequenceSpec::spike(witness, scaling_factor);
    // Standard names of the spikes answer exactly 0 on every coordinate below the witness.
    let r1 = run_with_budget(candidate, &SequenceName::standard(y1.clone()), n, budget)
        .map_err(FalsifyError::Candidate)?;
    let rl = run_with_budget(candidate, &SequenceName::standard(yl.clone()), n, budget)
        .map_err(FalsifyError::Candidate)?;

    report.max_queried_coord = k;
    report.traces_coincide =
        same_stream(&zero_run.trace, &r1.trace) && same_stream(&zero_run.trace, &rl.trace);
    report.zero_output = Some(zero_run.output);
    report.observed_outputs = Some((r1.output.clone(), rl.output.clone()));
    report.claimed = candidate
        .claimed_value(&y1)
        .zip(candidate.claimed_value(&yl));

    let eps = Rational::one().mul_pow2(-i64::from(n));
    let misses = |out: &Dyadic, claim: &Rational| (out.to_rational() - claim).abs() > eps;
    report.verdict = match &report.claimed {
        Some((c1, cl)) if misses(&r1.output, c1) || misses(&rl.output, cl) => {
            Verdict::ApproximationContractViolated
        }
        _ => Verdict::HomogeneityOrDefinitenessViolated,
    };
    report.witness_spike = Some(y1);
    report.traces = vec![zero_run.trace, r1.trace, rl.trace];
    Ok(report)
}
