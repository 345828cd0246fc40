use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::oracle::{run, Functional};
use super::sop::SecondOrderPoly;
use crate::names::SequenceName;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub name: String,
    pub n: u32,
    pub cost: u64,
    /// `P(|φ|, n)` as a decimal string; it can be far beyond `u64`.
    pub bound: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub functional: String,
    pub polynomial: String,
    pub checked: usize,
    pub violations: Vec<BoundViolation>,
    /// Runs that failed outright, as `(name, n, error)`.
    pub failures: Vec<(String, u32, String)>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.failures.is_empty()
    }
}

/// Empirical check that `cost(run(f, φ, n)) <= P(|φ|, n)` on every sampled
/// name and precision. Observes only; a violation is a witness, not a proof.
pub fn check_bound(
    f: &dyn Functional,
    p: &SecondOrderPoly,
    names: &[SequenceName],
    precisions: &[u32],
) -> BoundReport {
    let mut report = BoundReport {
        functional: f.id(),
        polynomial: p.to_string(),
        checked: 0,
        violations: Vec::new(),
        failures: Vec::new(),
    };
    for name in names {
        let size = |m: &BigUint| name.size_big(m);
        for &n in precisions {
            report.checked += 1;
            match run(f, name, n) {
                Ok(r) => {
                    let bound = p.eval(&size, &BigUint::from(n));
                    if BigUint::from(r.trace.cost) > bound {
                        report.violations.push(BoundViolation {
                            name: name.label(),
                            n,
                            cost: r.trace.cost,
                            bound: bound.to_string(),
                        });
                    }
                }
                Err(e) => report.failures.push((name.label(), n, e.error.to_string())),
            }
        }
    }
    report
}
