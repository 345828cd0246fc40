use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::expr::{ExprError, IndexExpr};
use crate::numerics::Rational;

/// Moduli of finite-support and geometric specs are verified for `k` up to this bound.
pub const MODULUS_CHECK_RANGE: u64 = 63;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("modulus `{modulus}` fails at k = {k}: tail {tail} exceeds 2^-{k}")]
    BadModulus {
        modulus: String,
        k: u64,
        tail: Rational,
    },
    #[error("modulus `{0}` must evaluate to a non-negative value")]
    NegativeModulus(String),
    #[error("geometric ratio {0} is not summable, no modulus can exist")]
    NotSummable(Rational),
}

/// The shape of a constructively described sequence `x: ℕ → ℚ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum SequenceKind {
    Zeros,
    Spike { index: u64, value: Rational },
    /// Listed values, zero afterwards.
    FiniteList { values: Vec<Rational> },
    /// `x_k = ratio^k`.
    Geometric { ratio: Rational },
    PerIndex { expr: IndexExpr },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawSpec {
    #[serde(flatten)]
    kind: SequenceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modulus: Option<IndexExpr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    square_modulus: Option<IndexExpr>,
}

/// A finite, serializable description of a point of `ℝ^ℕ`, optionally with
/// a summability modulus `μ` (`Σ_{i≥μ(k)} |x_i| <= 2^-k`) and a
/// square-summability modulus (`Σ_{i≥μ(k)} x_i² <= 2^-k`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct SequenceSpec {
    kind: SequenceKind,
    modulus: Option<IndexExpr>,
    square_modulus: Option<IndexExpr>,
}

impl TryFrom<RawSpec> for SequenceSpec {
    type Error = SpecError;

    fn try_from(raw: RawSpec) -> Result<Self, Self::Error> {
        let spec = SequenceSpec::new(raw.kind)?;
        let spec = match raw.modulus {
            Some(m) => spec.with_modulus(m)?,
            None => spec,
        };
        match raw.square_modulus {
            Some(m) => spec.with_square_modulus(m),
            None => Ok(spec),
        }
    }
}

impl From<SequenceSpec> for RawSpec {
    fn from(s: SequenceSpec) -> Self {
        RawSpec {
            kind: s.kind,
            modulus: s.modulus,
            square_modulus: s.square_modulus,
        }
    }
}

impl SequenceSpec {
    pub fn new(kind: SequenceKind) -> Result<Self, SpecError> {
        if let SequenceKind::PerIndex { expr } = &kind {
            expr.check_denominators()?;
        }
        Ok(SequenceSpec {
            kind,
            modulus: None,
            square_modulus: None,
        })
    }

    pub fn zeros() -> Self {
        SequenceSpec::new(SequenceKind::Zeros).expect("always valid")
    }

    pub fn spike(index: u64, value: Rational) -> Self {
        SequenceSpec::new(SequenceKind::Spike { index, value }).expect("always valid")
    }

    pub fn finite_list(values: Vec<Rational>) -> Self {
        SequenceSpec::new(SequenceKind::FiniteList { values }).expect("always valid")
    }

    pub fn geometric(ratio: Rational) -> Self {
        SequenceSpec::new(SequenceKind::Geometric { ratio }).expect("always valid")
    }

    pub fn per_index(expr: &str) -> Result<Self, SpecError> {
        SequenceSpec::new(SequenceKind::PerIndex {
            expr: expr.parse()?,
        })
    }

    /// Attaches a summability modulus, verifying it where the tail is known in closed form.
    pub fn with_modulus(mut self, modulus: IndexExpr) -> Result<Self, SpecError> {
        self.check_modulus(&modulus, false)?;
        self.modulus = Some(modulus);
        Ok(self)
    }

    pub fn with_square_modulus(mut self, modulus: IndexExpr) -> Result<Self, SpecError> {
        self.check_modulus(&modulus, true)?;
        self.square_modulus = Some(modulus);
        Ok(self)
    }

    /// Parses the modulus expression, then attaches it.
    pub fn with_modulus_str(self, modulus: &str) -> Result<Self, SpecError> {
        let m: IndexExpr = modulus.parse()?;
        self.with_modulus(m)
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    pub fn has_modulus(&self) -> bool {
        self.modulus.is_some()
    }

    /// `x_i`, exactly.
    pub fn value(&self, i: u64) -> Rational {
        match &self.kind {
            SequenceKind::Zeros => Rational::zero(),
            SequenceKind::Spike { index, value } => {
                if i == *index {
                    value.clone()
                } else {
                    Rational::zero()
                }
            }
            SequenceKind::FiniteList { values } => usize::try_from(i)
                .ok()
                .and_then(|i| values.get(i))
                .cloned()
                .unwrap_or_else(Rational::zero),
            SequenceKind::Geometric { ratio } => {
                let i = u32::try_from(i).expect("geometric index beyond u32");
                ratio.pow(i)
            }
            SequenceKind::PerIndex { expr } => expr
                .eval(i)
                .expect("denominators are bounded away from zero on k >= 0"),
        }
    }

    /// Some `b` with `|x_i| < 2^b` for every `i <= upto`.
    pub fn magnitude_bits(&self, upto: &BigUint) -> BigUint {
        let bits_of = |bound: &Rational| BigUint::from(bound.ceil().bits());
        match &self.kind {
            SequenceKind::Zeros => BigUint::zero(),
            SequenceKind::Spike { value, .. } => bits_of(&value.abs()),
            SequenceKind::FiniteList { values } => values
                .iter()
                .map(|v| bits_of(&v.abs()))
                .max()
                .unwrap_or_default(),
            SequenceKind::Geometric { ratio } => {
                let r = ratio.abs();
                if r <= Rational::one() {
                    // x_0 = 1 dominates.
                    BigUint::one()
                } else {
                    // |r|^i <= ceil|r|^upto < 2^(upto · bits(ceil|r|)).
                    upto * BigUint::from(r.ceil().bits()) + 1u32
                }
            }
            SequenceKind::PerIndex { expr } => bits_of(&expr.magnitude_bound(upto)),
        }
    }

    fn eval_modulus(m: &IndexExpr, k: u64) -> u64 {
        let v = m.eval(k).expect("modulus denominators were validated");
        v.ceil().to_u64().unwrap_or(if v.is_negative() { 0 } else { u64::MAX })
    }

    /// `μ(k)` if a summability modulus is attached.
    pub fn modulus(&self, k: u64) -> Option<u64> {
        self.modulus.as_ref().map(|m| Self::eval_modulus(m, k))
    }

    /// A square-summability modulus. An absolute-summability modulus also
    /// serves, since `Σ x_i² <= (Σ |x_i|)² <= 2^-2k`.
    pub fn square_modulus(&self, k: u64) -> Option<u64> {
        self.square_modulus
            .as_ref()
            .or(self.modulus.as_ref())
            .map(|m| Self::eval_modulus(m, k))
    }

    /// Exact `Σ_{i>=from} |x_i|` (or of squares), when available in closed form.
    fn tail(&self, from: u64, squares: bool) -> Option<Rational> {
        let lift = |v: &Rational| if squares { v * v } else { v.abs() };
        match &self.kind {
            SequenceKind::Zeros => Some(Rational::zero()),
            SequenceKind::Spike { index, value } => Some(if from <= *index {
                lift(value)
            } else {
                Rational::zero()
            }),
            SequenceKind::FiniteList { values } => Some(
                values
                    .iter()
                    .skip(usize::try_from(from).unwrap_or(usize::MAX))
                    .map(lift)
                    .fold(Rational::zero(), |a, b| a + b),
            ),
            SequenceKind::Geometric { ratio } => {
                let r = lift(ratio);
                if r >= Rational::one() {
                    return None;
                }
                let from = u32::try_from(from).ok()?;
                Some(r.pow(from) / (Rational::one() - &r))
            }
            SequenceKind::PerIndex { .. } => None,
        }
    }

    fn check_modulus(&self, m: &IndexExpr, squares: bool) -> Result<(), SpecError> {
        m.check_denominators()?;
        if let SequenceKind::Geometric { ratio } = &self.kind {
            if ratio.abs() >= Rational::one() {
                return Err(SpecError::NotSummable(ratio.clone()));
            }
        }
        for k in 0..=MODULUS_CHECK_RANGE {
            if m.eval(k)?.is_negative() {
                return Err(SpecError::NegativeModulus(m.to_string()));
            }
            let Some(tail) = self.tail(Self::eval_modulus(m, k), squares) else {
                // Asserted by whoever wrote the per-index spec.
                return Ok(());
            };
            if tail > Rational::one().mul_pow2(-(k as i64)) {
                return Err(SpecError::BadModulus {
                    modulus: m.to_string(),
                    k,
                    tail,
                });
            }
        }
        Ok(())
    }

    /// Parses the JSON document format.
    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("specs always serialize")
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SequenceKind::Zeros => write!(f, "zeros"),
            SequenceKind::Spike { index, value } => write!(f, "spike({index}, {value})"),
            SequenceKind::FiniteList { values } => {
                let parts: Vec<String> = values.iter().map(ToString::to_string).collect();
                write!(f, "finiteList[{}]", parts.join(", "))
            }
            SequenceKind::Geometric { ratio } => write!(f, "geometric({ratio})"),
            SequenceKind::PerIndex { expr } => write!(f, "perIndex({expr})"),
        }
    }
}

