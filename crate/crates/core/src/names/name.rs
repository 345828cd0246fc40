use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::SequenceSpec;
use crate::encoding::{frame_answer, pair, query_len, unpair, RegularFn, Word};
use crate::machine::{OracleError, SequenceOracle};
use crate::numerics::{Dyadic, Rational};

/// Longest query word (in bits) for which the schedule is tabulated.
pub const MAX_QUERY_BITS: usize = 64;

/// How a name picks among the legal answers `r` with `|r - x_i| <= 2^-j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Style {
    /// Truncation toward zero onto the `2^-j` grid.
    Standard,
    /// Largest grid point not above `x_i`.
    LeftApprox,
    /// Seed-determined choice among the legal grid points; seed 0 is `Standard`.
    Seeded(u64),
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Style::Standard => write!(f, "standard"),
            Style::LeftApprox => write!(f, "left"),
            Style::Seeded(s) => write!(f, "seeded:{s}"),
        }
    }
}

impl FromStr for Style {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(Style::Standard),
            "left" | "leftApprox" => Ok(Style::LeftApprox),
            _ => s
                .strip_prefix("seeded:")
                .and_then(|n| n.parse().ok())
                .map(Style::Seeded)
                .ok_or_else(|| format!("unknown style `{s}` (standard, left, seeded:<n>)")),
        }
    }
}

struct Compiled {
    spec: SequenceSpec,
    schedule: OnceLock<Vec<usize>>,
}

/// A representation of a sequence: answers `(i, j)` with a word encoding a
/// dyadic within `2^-j` of `x_i`, padded to a length that depends only on
/// the length of the query word.
#[derive(Clone)]
pub struct SequenceName {
    inner: Arc<Compiled>,
    style: Style,
}

impl fmt::Debug for SequenceName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceName")
            .field("spec", &self.inner.spec)
            .field("style", &self.style)
            .finish()
    }
}

/// Upper bound on the answer length for every query word of `m` bits.
///
/// Words of `m` bits name pairs below `2^m`, so `i, j <= w` with `w` the
/// diagonal of `2^m - 1`. The value `t · 2^-j` has `|t| <= |x_i| 2^j + 1`,
/// giving at most `b + w + 1` mantissa bits for `|x_i| < 2^b`; its canonical
/// exponent lies in `[-w, b + 1]`.
fn answer_length_bound(spec: &SequenceSpec, m: &BigUint) -> BigUint {
    let k_max = (BigUint::one() << m.to_usize().expect("word length fits usize")) - 1u32;
    let w = ((k_max * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let b = spec.magnitude_bits(&w);
    let mantissa_bits = &b + &w + 1u32;
    let exp_mag = (&b + 1u32).max(w.clone());
    let exp_bits = BigUint::from((exp_mag * 2u32).bits());
    // 0^i prefix, sign bit, two doubled payloads with their `01` terminators, pad marker.
    w + 1u32 + (mantissa_bits + 1u32) * 2u32 + (exp_bits + 1u32) * 2u32 + 1u32
}

impl SequenceName {
    /// The standard name: answers `ratApprox(x_i, j)`.
    pub fn standard(spec: SequenceSpec) -> Self {
        SequenceName::with_style(spec, Style::Standard)
    }

    pub fn left_approx(spec: SequenceSpec) -> Self {
        SequenceName::with_style(spec, Style::LeftApprox)
    }

    pub fn with_style(spec: SequenceSpec, style: Style) -> Self {
        SequenceName {
            inner: Arc::new(Compiled {
                spec,
                schedule: OnceLock::new(),
            }),
            style,
        }
    }

    /// Same sequence and contracts, answers re-chosen per query from `seed`.
    /// Seed 0 returns the name unchanged.
    pub fn perturb(&self, seed: u64) -> Self {
        if seed == 0 {
            return self.clone();
        }
        SequenceName {
            inner: Arc::clone(&self.inner),
            style: Style::Seeded(seed),
        }
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.inner.spec
    }

    pub fn style(&self) -> Style {
        self.style
    }

    pub fn label(&self) -> String {
        format!("{}#{}", self.inner.spec, self.style)
    }

    /// The dyadic this name answers for `(i, j)`.
    pub fn approx(&self, i: u64, j: u32) -> Dyadic {
        let x = self.inner.spec.value(i);
        match self.style {
            Style::Standard | Style::Seeded(0) => Dyadic::approx_rational(&x, j),
            Style::LeftApprox => Dyadic::floor_rational(&x, j),
            Style::Seeded(seed) => {
                let lo = Dyadic::floor_rational(&x, j);
                let hi = Dyadic::ceil_rational(&x, j);
                let choices = if lo == hi {
                    // On the grid, both neighbours are exactly 2^-j away.
                    let step = Dyadic::ulp(j);
                    vec![&lo - &step, lo, &hi + &step]
                } else {
                    vec![lo, hi]
                };
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(pair(i, j as u64));
                let pick = rng.next_u32() as usize % choices.len();
                choices.into_iter().nth(pick).expect("pick in range")
            }
        }
    }

    /// Tabulated answer lengths for query words of `0..=MAX_QUERY_BITS` bits.
    fn schedule(&self) -> &[usize] {
        self.inner.schedule.get_or_init(|| {
            (0..=MAX_QUERY_BITS)
                .map(|m| {
                    answer_length_bound(&self.inner.spec, &BigUint::from(m))
                        .to_usize()
                        .unwrap_or(usize::MAX)
                })
                .collect()
        })
    }

    /// Answer length for query words of `m` bits.
    pub fn answer_len(&self, m: usize) -> usize {
        self.schedule()[m]
    }

    /// `|φ|(m)` for arbitrary `m`, computed from the closed-form schedule.
    pub fn size_big(&self, m: &BigUint) -> BigUint {
        match m.to_usize() {
            Some(small) if small <= MAX_QUERY_BITS => BigUint::from(self.answer_len(small)),
            _ => answer_length_bound(&self.inner.spec, m),
        }
    }

    /// Answer to the query `(i, j)`, framed as `0^i ∘ code ∘ padding`.
    pub fn answer(&self, i: u64, j: u32) -> Word {
        let m = query_len(i, j);
        frame_answer(i, &self.approx(i, j), self.answer_len(m))
            .expect("length schedule bounds every raw answer")
    }

    /// Exact error `|decode(answer) - x_i|` for a query; used by contract checks.
    pub fn error(&self, i: u64, j: u32) -> Rational {
        (self.approx(i, j).to_rational() - self.inner.spec.value(i)).abs()
    }
}

impl RegularFn for SequenceName {
    /// Reads `u` as the binary numeral of `pair(i, j)`; the answer length
    /// depends only on `|u|`, which makes the function regular.
    fn answer(&self, u: &Word) -> Word {
        let k = u.value().expect("query words longer than 64 significant bits");
        let (i, j) = unpair(k);
        let j = u32::try_from(j).expect("precision beyond u32");
        frame_answer(i, &self.approx(i, j), self.answer_len(u.len()))
            .expect("length schedule bounds every raw answer")
    }
}

impl SequenceOracle for SequenceName {
    fn label(&self) -> String {
        SequenceName::label(self)
    }

    fn respond(&self, i: u64, j: u32) -> Result<Word, OracleError> {
        Ok(self.answer(i, j))
    }
}
