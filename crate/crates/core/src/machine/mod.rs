//! Instrumented oracle-machine runtime: traces, cost accounting and
//! second-order polynomial bounds.

mod bound;
mod oracle;
mod sop;

pub use bound::{check_bound, BoundReport, BoundViolation};
pub use oracle::{
    cord_of, run, run_with_budget, CordSet, Functional, MachineError, Oracle, OracleError,
    QueryRecord, QueryTrace, Run, RunFailure, SequenceOracle,
};
pub use sop::{eval_sop, SecondOrderPoly, SopParseError};
