use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::encoding::{decode_answer, query_len, CodeError, Word};
use crate::numerics::{alpha, rat_approx, Dyadic, Rational};

/// Set of coordinates touched by one run.
pub type CordSet = BTreeSet<u64>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("coordinate {0} lies outside the factorization")]
    OutsideFactor(u64),
}

/// Anything that answers coordinate/precision queries with words.
pub trait SequenceOracle: Sync {
    fn label(&self) -> String;
    fn respond(&self, i: u64, j: u32) -> Result<Word, OracleError>;
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MachineError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("query budget of {0} exhausted")]
    QueryBudgetExceeded(usize),
    #[error("functional failed: {0}")]
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub i: u64,
    pub j: u32,
    pub response: Word,
}

/// Ordered log of one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryTrace {
    pub functional: String,
    pub name: String,
    pub n: u32,
    pub queries: Vec<QueryRecord>,
    pub cord: Vec<u64>,
    pub cost: u64,
}

impl QueryTrace {
    pub fn cord_set(&self) -> CordSet {
        cord_of(self)
    }

    /// Distinct coordinates in order of first appearance.
    pub fn cord_in_order(&self) -> Vec<u64> {
        let mut seen = CordSet::new();
        self.queries
            .iter()
            .filter(|q| seen.insert(q.i))
            .map(|q| q.i)
            .collect()
    }

    pub fn max_coordinate(&self) -> Option<u64> {
        self.queries.iter().map(|q| q.i).max()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("traces always serialize")
    }
}

/// Projection of a trace onto its first components.
pub fn cord_of(trace: &QueryTrace) -> CordSet {
    trace.queries.iter().map(|q| q.i).collect()
}

/// The only channel through which a functional sees its input. Every
/// answer it hands out is logged, and arithmetic done through it is metered.
pub struct Oracle<'a> {
    source: &'a dyn SequenceOracle,
    queries: Vec<QueryRecord>,
    cost: u64,
    budget: Option<usize>,
}

impl<'a> Oracle<'a> {
    pub fn new(source: &'a dyn SequenceOracle) -> Self {
        Oracle {
            source,
            queries: Vec::new(),
            cost: 0,
            budget: None,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = Some(budget);
        self
    }

    /// Asks for `x_i` to within `2^-j`.
    pub fn query(&mut self, i: u64, j: u32) -> Result<Dyadic, MachineError> {
        if let Some(budget) = self.budget {
            if self.queries.len() >= budget {
                return Err(MachineError::QueryBudgetExceeded(budget));
            }
        }
        let response = self.source.respond(i, j)?;
        let value = decode_answer(i, &response)?;
        self.cost += 1 + query_len(i, j) as u64 + response.len() as u64;
        self.queries.push(QueryRecord { i, j, response });
        Ok(value)
    }

    pub fn queries_made(&self) -> usize {
        self.queries.len()
    }

    /// Charges one arithmetic operation of the given operand weight.
    pub fn charge(&mut self, weight: u64) {
        self.cost += weight;
    }

    fn weigh(&mut self, operands: &[&Dyadic]) {
        let w = operands.iter().map(|d| d.bit_len()).max().unwrap_or(0);
        self.charge(w.max(1));
    }

    pub fn add(&mut self, a: &Dyadic, b: &Dyadic) -> Dyadic {
        self.weigh(&[a, b]);
        a + b
    }

    pub fn sub(&mut self, a: &Dyadic, b: &Dyadic) -> Dyadic {
        self.weigh(&[a, b]);
        a - b
    }

    pub fn mul(&mut self, a: &Dyadic, b: &Dyadic) -> Dyadic {
        self.weigh(&[a, b]);
        a * b
    }

    pub fn abs(&mut self, a: &Dyadic) -> Dyadic {
        self.weigh(&[a]);
        a.abs()
    }

    pub fn max(&mut self, a: &Dyadic, b: &Dyadic) -> Dyadic {
        self.weigh(&[a, b]);
        a.max(b).clone()
    }

    pub fn shl(&mut self, a: &Dyadic, k: i64) -> Dyadic {
        self.weigh(&[a]);
        a.shl(k)
    }

    pub fn round(&mut self, a: &Dyadic, n: u32) -> Dyadic {
        self.weigh(&[a]);
        a.round(n)
    }

    /// `α(a)` truncated onto the `2^-prec` grid (error below `2^-prec`).
    pub fn alpha(&mut self, a: &Dyadic, prec: u32) -> Dyadic {
        self.weigh(&[a]);
        rat_approx(&alpha(&a.to_rational()), prec)
    }

    /// `q` truncated onto the `2^-prec` grid, for rational intermediate results.
    pub fn approx(&mut self, q: &Rational, prec: u32) -> Dyadic {
        self.charge(q.bit_len().max(1));
        rat_approx(q, prec)
    }

    fn into_trace(self, functional: String, n: u32) -> QueryTrace {
        let cord = self.queries.iter().map(|q| q.i).collect::<CordSet>();
        QueryTrace {
            functional,
            name: self.source.label(),
            n,
            queries: self.queries,
            cord: cord.into_iter().collect(),
            cost: self.cost,
        }
    }
}

/// A computable functional `ℝ^ℕ → ℝ`, realized as an oracle procedure.
///
/// Contract: for every valid name of `x`, `eval` at precision `n` returns a
/// value within `2^-n` of `f(x)`. When `query_bound` is `Some(ℓ)`, every run
/// submits at most `ℓ` queries.
pub trait Functional: Send + Sync {
    fn id(&self) -> String;

    fn query_bound(&self) -> Option<usize> {
        None
    }

    fn eval(&self, oracle: &mut Oracle<'_>, n: u32) -> Result<Dyadic, MachineError>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub output: Dyadic,
    pub trace: QueryTrace,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{error} (after {} queries)", partial.queries.len())]
pub struct RunFailure {
    pub error: MachineError,
    pub partial: Box<QueryTrace>,
}

/// Runs `f` against `name` at precision `n`, recording the full trace.
pub fn run(f: &dyn Functional, name: &dyn SequenceOracle, n: u32) -> Result<Run, RunFailure> {
    run_with(f, Oracle::new(name), n)
}

/// [`run`] that aborts once `budget` queries have been answered.
pub fn run_with_budget(
    f: &dyn Functional,
    name: &dyn SequenceOracle,
    n: u32,
    budget: usize,
) -> Result<Run, RunFailure> {
    run_with(f, Oracle::new(name).with_budget(budget), n)
}

fn run_with(f: &dyn Functional, mut oracle: Oracle<'_>, n: u32) -> Result<Run, RunFailure> {
    let result = f.eval(&mut oracle, n);
    let trace = oracle.into_trace(f.id(), n);
    match result {
        Ok(output) => Ok(Run { output, trace }),
        Err(error) => Err(RunFailure {
            error,
            partial: Box::new(trace),
        }),
    }
}
