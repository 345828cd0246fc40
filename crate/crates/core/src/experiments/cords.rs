//! Cord-set checks: independence from the representation and from the
//! implementation, and fixedness for bounded-query functionals.

use serde::{Deserialize, Serialize};

use crate::machine::{run, Functional, QueryTrace};
use crate::names::{SequenceName, SequenceSpec, Style};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub n: u32,
    pub reference: QueryTrace,
    pub other: QueryTrace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub implementations: Vec<String>,
    pub spec: String,
    pub styles: Vec<Style>,
    /// The cord shared by every run at each precision, when there is one.
    pub cords: Vec<(u32, Vec<u64>)>,
    pub runs: usize,
    pub disagreements: Vec<Disagreement>,
    pub failures: Vec<String>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty() && self.failures.is_empty()
    }
}

/// Runs every implementation against a name of `spec` in every style and
/// compares the cords at each precision with the first run's.
pub fn verify_cord_invariance(
    implementations: &[&dyn Functional],
    spec: &SequenceSpec,
    styles: &[Style],
    precisions: &[u32],
) -> InvarianceReport {
    let names: Vec<SequenceName> = styles
        .iter()
        .map(|&s| SequenceName::with_style(spec.clone(), s))
        .collect();
    let mut report = InvarianceReport {
        implementations: implementations.iter().map(|f| f.id()).collect(),
        spec: spec.to_string(),
        styles: styles.to_vec(),
        cords: Vec::new(),
        runs: 0,
        disagreements: Vec::new(),
        failures: Vec::new(),
    };
    for &n in precisions {
        let mut reference: Option<QueryTrace> = None;
        let mut agreed = true;
        for f in implementations {
            for name in &names {
                report.runs += 1;
                let trace = match run(*f, name, n) {
                    Ok(r) => r.trace,
                    Err(e) => {
                        report.failures.push(format!("{} on {} at n={n}: {e}", f.id(), name.label()));
                        continue;
                    }
                };
                match &reference {
                    None => reference = Some(trace),
                    Some(r) if r.cord != trace.cord => {
                        agreed = false;
                        report.disagreements.push(Disagreement {
                            n,
                            reference: r.clone(),
                            other: trace,
                        });
                    }
                    Some(_) => {}
                }
            }
        }
        if let (true, Some(r)) = (agreed, reference) {
            report.cords.push((n, r.cord));
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum CordViolation {
    QueryBoundExceeded {
        spec: String,
        n: u32,
        queries: usize,
        bound: usize,
    },
    VariesAcrossPrecisions {
        spec: String,
        n_a: u32,
        cord_a: Vec<u64>,
        n_b: u32,
        cord_b: Vec<u64>,
    },
    VariesAcrossInputs {
        spec_a: String,
        cord_a: Vec<u64>,
        spec_b: String,
        cord_b: Vec<u64>,
    },
    RunFailed {
        spec: String,
        n: u32,
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedCordReport {
    pub functional: String,
    pub declared_bound: Option<usize>,
    pub specs: usize,
    pub precisions: Vec<u32>,
    pub max_coordinate: Option<u64>,
    /// Present when the same cord was seen on every input at every precision.
    pub common_cord: Option<Vec<u64>>,
    pub violations: Vec<CordViolation>,
}

impl FixedCordReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that the cord of `f` is bounded by its declared `ℓ`, the same at
/// every precision, and the same on every input. Violations of each kind are
/// reported at most once per spec.
pub fn verify_cord_fixed(
    f: &dyn Functional,
    specs: &[SequenceSpec],
    precisions: &[u32],
) -> FixedCordReport {
    let bound = f.query_bound();
    let mut report = FixedCordReport {
        functional: f.id(),
        declared_bound: bound,
        specs: specs.len(),
        precisions: precisions.to_vec(),
        max_coordinate: None,
        common_cord: None,
        violations: Vec::new(),
    };
    // First cord seen for each spec, used for the cross-input comparison.
    let mut per_spec: Vec<(String, Vec<u64>)> = Vec::new();
    for spec in specs {
        let name = SequenceName::standard(spec.clone());
        let label = spec.to_string();
        let mut first: Option<(u32, Vec<u64>)> = None;
        let mut bound_flagged = false;
        let mut precision_flagged = false;
        for &n in precisions {
            let trace = match run(f, &name, n) {
                Ok(r) => r.trace,
                Err(e) => {
                    report.violations.push(CordViolation::RunFailed {
                        spec: label.clone(),
                        n,
                        error: e.to_string(),
                    });
                    continue;
                }
            };
            report.max_coordinate = report.max_coordinate.max(trace.max_coordinate());
            if let Some(b) = bound {
                if trace.queries.len() > b && !bound_flagged {
                    bound_flagged = true;
                    report.violations.push(CordViolation::QueryBoundExceeded {
                        spec: label.clone(),
                        n,
                        queries: trace.queries.len(),
                        bound: b,
                    });
                }
            }
            match &first {
                None => first = Some((n, trace.cord)),
                Some((n0, c0)) if *c0 != trace.cord && !precision_flagged => {
                    precision_flagged = true;
                    report.violations.push(CordViolation::VariesAcrossPrecisions {
                        spec: label.clone(),
                        n_a: *n0,
                        cord_a: c0.clone(),
                        n_b: n,
                        cord_b: trace.cord,
                    });
                }
                Some(_) => {}
            }
        }
        if let Some((_, cord)) = first {
            per_spec.push((label, cord));
        }
    }
    if let Some((label0, cord0)) = per_spec.first() {
        for (label, cord) in &per_spec[1..] {
            if cord != cord0 {
                report.violations.push(CordViolation::VariesAcrossInputs {
                    spec_a: label0.clone(),
                    cord_a: cord0.clone(),
                    spec_b: label.clone(),
                    cord_b: cord.clone(),
                });
            }
        }
        if report.violations.is_empty() {
            report.common_cord = Some(cord0.clone());
        }
    }
    report
}
