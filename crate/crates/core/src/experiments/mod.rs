//! Checks on cord sets, bounded-query factorization, and an adversary that
//! defeats every candidate norm.

mod cords;
mod factor;
mod falsify;

pub use cords::{
    verify_cord_fixed, verify_cord_invariance, CordViolation, Disagreement, FixedCordReport,
    InvarianceReport,
};
pub use factor::{
    factor, Coordinate, CordMismatch, FactorError, FactorReport, FiniteFactorization, RealName,
    ReplayCheck,
};
pub use falsify::{falsify_norm, FalsifyError, NoClaim, NormCounterexample, Verdict};
