//! Bounded-query functionals: projections, constants and combinations of
//! finitely many coordinates.

use std::fmt;
use std::str::FromStr;

use crate::machine::{Functional, MachineError, Oracle};
use crate::numerics::{Dyadic, Rational};

/// Bits needed to write `v`, so `v <= 2^bits(v)`.
fn bits(v: u64) -> u32 {
    64 - v.leading_zeros()
}

/// `π_i(x) = x_i`, read once at the requested precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Projection(pub u64);

impl Functional for Projection {
    fn id(&self) -> String {
        format!("proj{}", self.0)
    }

    fn query_bound(&self) -> Option<usize> {
        Some(1)
    }

    fn eval(&self, oracle: &mut Oracle<'_>, n: u32) -> Result<Dyadic, MachineError> {
        oracle.query(self.0, n)
    }
}

/// `π_i` computed by over-querying and rounding back to the `2^-(n+1)` grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectionAlt(pub u64);

impl Functional for ProjectionAlt {
    fn id(&self) -> String {
        format!("proj{}-alt", self.0)
    }

    fn query_bound(&self) -> Option<usize> {
        Some(1)
    }

    fn eval(&self, oracle: &mut Oracle<'_>, n: u32) -> Result<Dyadic, MachineError> {
        let a = oracle.query(self.0, n + 2)?;
        Ok(oracle.round(&a, n + 1))
    }
}

/// A functional that ignores its input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constant(pub Rational);

impl Functional for Constant {
    fn id(&self) -> String {
        if self.0.is_zero() {
            "const".into()
        } else {
            format!("const:{}", self.0)
        }
    }

    fn query_bound(&self) -> Option<usize> {
        Some(0)
    }

    fn eval(&self, oracle: &mut Oracle<'_>, n: u32) -> Result<Dyadic, MachineError> {
        Ok(oracle.approx(&self.0, n))
    }
}

/// The finite-arity function `φ` applied to the selected coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FiniteFn {
    Average,
    Sum,
    Max,
    /// Needs a precision-0 pass for magnitude bounds before the real queries.
    Product,
}

impl FiniteFn {
    pub fn name(self) -> &'static str {
        match self {
            FiniteFn::Average => "avg",
            FiniteFn::Sum => "sum",
            FiniteFn::Max => "max",
            FiniteFn::Product => "prod",
        }
    }

    /// Exact value on exact arguments.
    pub fn apply(self, args: &[Rational]) -> Rational {
        match self {
            FiniteFn::Average if args.is_empty() => Rational::zero(),
            FiniteFn::Average => {
                let s = args.iter().fold(Rational::zero(), |a, b| a + b);
                s / Rational::from(args.len() as i64)
            }
            FiniteFn::Sum => args.iter().fold(Rational::zero(), |a, b| a + b),
            FiniteFn::Max => args.iter().cloned().max().unwrap_or_else(Rational::zero),
            FiniteFn::Product => args.iter().fold(Rational::one(), |a, b| a * b),
        }
    }
}

impl FromStr for FiniteFn {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "avg" | "average" => Ok(FiniteFn::Average),
            "sum" => Ok(FiniteFn::Sum),
            "max" => Ok(FiniteFn::Max),
            "prod" | "product" => Ok(FiniteFn::Product),
            _ => Err(format!("unknown combiner `{s}`")),
        }
    }
}

/// `f(x) = φ(x_{i_1}, ..., x_{i_ℓ})`. The reversed variant reads the
/// coordinates in the opposite order and is used as an independent second
/// implementation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteCombo {
    coords: Vec<u64>,
    combiner: FiniteFn,
    reversed: bool,
}

impl FiniteCombo {
    pub fn new(coords: Vec<u64>, combiner: FiniteFn) -> Self {
        FiniteCombo {
            coords,
            combiner,
            reversed: false,
        }
    }

    pub fn alternative(&self) -> Self {
        FiniteCombo {
            reversed: !self.reversed,
            ..self.clone()
        }
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn combiner(&self) -> FiniteFn {
        self.combiner
    }

    /// Reads every coordinate at `prec`, in the implementation's order, and
    /// returns the answers in coordinate-list order.
    fn read_all(&self, oracle: &mut Oracle<'_>, prec: u32) -> Result<Vec<Dyadic>, MachineError> {
        let mut out = vec![Dyadic::zero(); self.coords.len()];
        let order: Vec<usize> = if self.reversed {
            (0..self.coords.len()).rev().collect()
        } else {
            (0..self.coords.len()).collect()
        };
        for t in order {
            out[t] = oracle.query(self.coords[t], prec)?;
        }
        Ok(out)
    }
}

impl fmt::Display for FiniteCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.coords.iter().map(u64::to_string).collect();
        write!(f, "{}[{}]", self.combiner.name(), list.join(","))?;
        if self.reversed {
            write!(f, "-alt")?;
        }
        Ok(())
    }
}

impl Functional for FiniteCombo {
    fn id(&self) -> String {
        self.to_string()
    }

    fn query_bound(&self) -> Option<usize> {
        let l = self.coords.len();
        Some(match self.combiner {
            FiniteFn::Product => 2 * l,
            _ => l,
        })
    }

    fn eval(&self, oracle: &mut Oracle<'_>, n: u32) -> Result<Dyadic, MachineError> {
        let l = self.coords.len() as u64;
        match self.combiner {
            FiniteFn::Average => {
                let args = self.read_all(oracle, n + 1)?;
                let mean = self
                    .combiner
                    .apply(&args.iter().map(Dyadic::to_rational).collect::<Vec<_>>());
                Ok(oracle.approx(&mean, n + 1))
            }
            FiniteFn::Sum => {
                // ℓ errors of 2^-(n+bits(ℓ)) each stay within 2^-n.
                let args = self.read_all(oracle, n + bits(l))?;
                Ok(args
                    .iter()
                    .fold(Dyadic::zero(), |acc, a| oracle.add(&acc, a)))
            }
            FiniteFn::Max => {
                let args = self.read_all(oracle, n)?;
                let mut it = args.into_iter();
                let Some(first) = it.next() else {
                    return Ok(Dyadic::zero());
                };
                Ok(it.fold(first, |acc, a| oracle.max(&acc, &a)))
            }
            FiniteFn::Product => {
                if l == 0 {
                    return Ok(Dyadic::one());
                }
                // |x_t| + 1 <= |a_t| + 2 =: B_t. With per-argument error e <= 1 the
                // product is off by at most ℓ e Π B_t.
                let coarse = self.read_all(oracle, 0)?;
                let extra: u32 = coarse
                    .iter()
                    .map(|a| {
                        let b: num_bigint::BigInt = a.abs().to_rational().ceil() + 2;
                        u32::try_from(b.bits()).expect("magnitude fits")
                    })
                    .sum();
                let args = self.read_all(oracle, n + bits(l) + extra)?;
                Ok(args
                    .iter()
                    .fold(Dyadic::one(), |acc, a| oracle.mul(&acc, a)))
            }
        }
    }
}
