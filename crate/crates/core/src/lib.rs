//! Exact-real computation over the sequence space `ℝ^ℕ`.
//!
//! Points are given by names that answer coordinate/precision queries with
//! dyadic rationals; functionals are oracle procedures whose every query is
//! logged. On top of that runtime sit the tail-sum functionals, the
//! truncation metrics, the product metric `D`, and executable versions of
//! the cord-set, factorization and no-norm constructions.

pub mod encoding;
pub mod experiments;
pub mod functionals;
pub mod machine;
pub mod names;
pub mod numerics;

pub use machine::{run, Functional, Oracle, QueryTrace};
pub use names::{SequenceName, SequenceSpec, Style};
pub use numerics::{Dyadic, Rational};
