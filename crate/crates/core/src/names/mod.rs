//! Names (representations) of points of `ℝ^ℕ` built from finite specs.

mod expr;
mod name;
mod spec;

pub use expr::{ExprError, IndexExpr};
pub use name::{SequenceName, Style, MAX_QUERY_BITS};
pub use spec::{SequenceKind, SequenceSpec, SpecError, MODULUS_CHECK_RANGE};

pub fn name_from_spec(spec: SequenceSpec) -> SequenceName {
    SequenceName::standard(spec)
}

pub fn left_approx_name(spec: SequenceSpec) -> SequenceName {
    SequenceName::left_approx(spec)
}

pub fn perturb_representation(name: &SequenceName, seed: u64) -> SequenceName {
    name.perturb(seed)
}
