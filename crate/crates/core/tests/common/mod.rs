//! Shared generators for the integration tests.
#![allow(dead_code)]

use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use seqspace::names::{SequenceName, SequenceSpec, Style};
use seqspace::numerics::{Dyadic, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

pub fn pow2(k: i64) -> Rational {
    Rational::one().mul_pow2(k)
}

/// `|d - exact| <= 2^-n`, decided exactly.
pub fn within(d: &Dyadic, exact: &Rational, n: u32) -> bool {
    (d.to_rational() - exact).abs() <= pow2(-(n as i64))
}

pub fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num: i64 = rng.random_range(-1000..=1000);
    let den: i64 = rng.random_range(1..=64);
    Rational::new(num, den)
}

/// A finite list of random rationals of the given length.
pub fn random_list(rng: &mut ChaCha8Rng, len: usize) -> SequenceSpec {
    SequenceSpec::finite_list((0..len).map(|_| random_rational(rng)).collect())
}

/// A random spec of any kind, without a modulus.
pub fn random_spec(rng: &mut ChaCha8Rng) -> SequenceSpec {
    match rng.random_range(0..5u32) {
        0 => SequenceSpec::spike(rng.random_range(0..12), random_rational(rng)),
        1 => {
            let len = rng.random_range(1..12);
            random_list(rng, len)
        }
        2 => {
            let num: i64 = rng.random_range(-9..=9);
            let den: i64 = rng.random_range(1..=9);
            SequenceSpec::geometric(Rational::new(num, den))
        }
        3 => {
            let a: i64 = rng.random_range(-20..=20);
            let b: i64 = rng.random_range(1..=9);
            SequenceSpec::per_index(&format!("({a}*k + 1)/(k*k + {b})")).unwrap()
        }
        _ => SequenceSpec::zeros(),
    }
}

/// A random spec carrying a verified summability modulus.
pub fn random_summable(rng: &mut ChaCha8Rng) -> SequenceSpec {
    match rng.random_range(0..4u32) {
        0 => {
            let i = rng.random_range(0..10u64);
            SequenceSpec::spike(i, random_rational(rng))
                .with_modulus_str(&(i + 1).to_string())
                .unwrap()
        }
        1 => {
            let len = rng.random_range(1..10usize);
            random_list(rng, len).with_modulus_str(&len.to_string()).unwrap()
        }
        2 => {
            // |r| <= 1/2: |r|^(k+1) / (1 - |r|) <= 2^-k.
            let den: i64 = rng.random_range(2..=9);
            let num: i64 = rng.random_range(-(den / 2)..=den / 2);
            SequenceSpec::geometric(Rational::new(num, den))
                .with_modulus_str("k+1")
                .unwrap()
        }
        _ => {
            // |r| <= 3/4: (3/4)^(3k+6) · 4 <= 2^-k.
            let num: i64 = rng.random_range(-3..=3);
            SequenceSpec::geometric(Rational::new(num, 4))
                .with_modulus_str("3*k+6")
                .unwrap()
        }
    }
}

pub fn all_styles() -> Vec<Style> {
    vec![
        Style::Standard,
        Style::LeftApprox,
        Style::Seeded(1),
        Style::Seeded(2),
        Style::Seeded(3),
    ]
}

pub fn named(spec: &SequenceSpec, style: Style) -> SequenceName {
    SequenceName::with_style(spec.clone(), style)
}

/// Ten fixed specs of varied kinds, used where a deterministic corpus is wanted.
pub fn corpus() -> Vec<SequenceSpec> {
    vec![
        SequenceSpec::zeros(),
        SequenceSpec::spike(3, q("5/2")),
        SequenceSpec::spike(0, q("-7/3")),
        SequenceSpec::finite_list(vec![q("1/3"), q("-2"), q("9/7"), q("0"), q("11/5")]),
        SequenceSpec::geometric(q("1/2")),
        SequenceSpec::geometric(q("-2/3")),
        SequenceSpec::geometric(q("3")),
        SequenceSpec::geometric(Rational::one()),
        SequenceSpec::per_index("1/(k*k + 1)").unwrap(),
        SequenceSpec::per_index("(k - 5)/3").unwrap(),
    ]
}
