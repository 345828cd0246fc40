//! Concrete functionals over `ℝ^ℕ`, the fake norms, and the metrics.
//!
//! Functionals are looked up by id:
//!
//! | id | functional |
//! |----|------------|
//! | `tailsum`, `tailsum-alt` | `Σ α(x_k)/2^k` |
//! | `shifted-tailsum`, `shifted-tailsum-alt` | `Σ α(x_k)/2^(k+|x_0|)` |
//! | `proj<i>`, `proj<i>-alt` | `x_i` |
//! | `const`, `zero`, `const:<q>` | constant |
//! | `avg[2,7]`, `sum[..]`, `max[..]`, `prod[..]`, optional `-alt` | finite combinations |
//! | `fake-sup<k>`, `fake-weighted<k>`, `fake-prefix` | norm candidates |

mod finite;
mod metrics;
mod norms;
mod tail;

pub use finite::{Constant, FiniteCombo, FiniteFn, Projection, ProjectionAlt};
pub use metrics::{metric_full, metric_lower, product_metric_d, Metric, MetricError};
pub use norms::{NormCandidate, PrecisionPrefix, TruncatedSup, TruncatedWeighted};
pub use tail::{ShiftedTailSum, ShiftedTailSumAlt, TailSum, TailSumAlt};

use crate::machine::Functional;
use crate::numerics::Rational;

fn parse_combo(id: &str) -> Option<FiniteCombo> {
    let (body, alt) = match id.strip_suffix("-alt") {
        Some(b) => (b, true),
        None => (id, false),
    };
    let (head, rest) = body.split_once('[')?;
    let list = rest.strip_suffix(']')?;
    let combiner: FiniteFn = head.parse().ok()?;
    let coords = if list.trim().is_empty() {
        Vec::new()
    } else {
        list.split(',')
            .map(|c| c.trim().parse().ok())
            .collect::<Option<Vec<u64>>>()?
    };
    let f = FiniteCombo::new(coords, combiner);
    Some(if alt { f.alternative() } else { f })
}

/// Norm candidates by id.
pub fn lookup_candidate(id: &str) -> Option<Box<dyn NormCandidate>> {
    if id == "fake-prefix" {
        return Some(Box::new(PrecisionPrefix));
    }
    if let Some(k) = id.strip_prefix("fake-sup") {
        return k.parse().ok().map(|k| Box::new(TruncatedSup(k)) as Box<dyn NormCandidate>);
    }
    if let Some(k) = id.strip_prefix("fake-weighted") {
        return k
            .parse()
            .ok()
            .map(|k| Box::new(TruncatedWeighted(k)) as Box<dyn NormCandidate>);
    }
    None
}

/// Any registered functional by id.
pub fn lookup(id: &str) -> Option<Box<dyn Functional>> {
    let f: Box<dyn Functional> = match id {
        "tailsum" => Box::new(TailSum),
        "tailsum-alt" => Box::new(TailSumAlt),
        "shifted-tailsum" => Box::new(ShiftedTailSum),
        "shifted-tailsum-alt" => Box::new(ShiftedTailSumAlt),
        "const" | "zero" => Box::new(Constant(Rational::zero())),
        _ => {
            if let Some(c) = lookup_candidate(id) {
                return Some(c);
            }
            if let Some(q) = id.strip_prefix("const:") {
                return q.parse().ok().map(|q| Box::new(Constant(q)) as Box<dyn Functional>);
            }
            if let Some(rest) = id.strip_prefix("proj") {
                return match rest.strip_suffix("-alt") {
                    Some(i) => i.parse().ok().map(|i| Box::new(ProjectionAlt(i)) as _),
                    None => rest.parse().ok().map(|i| Box::new(Projection(i)) as _),
                };
            }
            return parse_combo(id).map(|c| Box::new(c) as _);
        }
    };
    Some(f)
}

/// The independent second implementation of a functional, if one exists.
pub fn alternative(id: &str) -> Option<Box<dyn Functional>> {
    match id {
        "const" | "zero" => lookup(id),
        _ if id.ends_with("-alt") => lookup(id.strip_suffix("-alt")?),
        _ => lookup(&format!("{id}-alt")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_round_trips_ids() {
        for id in [
            "tailsum",
            "tailsum-alt",
            "shifted-tailsum",
            "shifted-tailsum-alt",
            "proj5",
            "proj0-alt",
            "const",
            "const:1/3",
            "avg[2,7]",
            "prod[0,1,3]-alt",
            "sum[]",
            "fake-sup3",
            "fake-weighted4",
            "fake-prefix",
        ] {
            assert_eq!(lookup(id).unwrap().id(), id);
        }
        assert_eq!(lookup("zero").unwrap().id(), "const");
        for bad in ["nope", "proj", "projx", "avg[1,", "mean[1]", "fake-supk"] {
            assert!(lookup(bad).is_none(), "{bad}");
        }
    }

    #[test]
    fn alternatives_pair_up() {
        assert_eq!(alternative("tailsum").unwrap().id(), "tailsum-alt");
        assert_eq!(alternative("avg[2,7]").unwrap().id(), "avg[2,7]-alt");
        assert_eq!(alternative("proj3-alt").unwrap().id(), "proj3");
        assert!(alternative("fake-prefix").is_none());
    }
}
