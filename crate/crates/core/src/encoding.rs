//! Binary words, the Cantor pairing, self-delimiting dyadic codes and the
//! padding discipline that makes string functions regular.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::numerics::Dyadic;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodeError {
    #[error("malformed code: {0}")]
    MalformedCode(String),
    #[error("cannot pad a word of length {len} to {target} bits")]
    PadOverflow { len: usize, target: usize },
}

/// Finite string over `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<bool>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// `0^n`.
    pub fn zeros(n: usize) -> Self {
        Word(vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    /// Big-endian binary numeral of `k` without leading zeros; `0` is the empty word.
    pub fn binary(k: u64) -> Self {
        let width = 64 - k.leading_zeros() as usize;
        Word((0..width).rev().map(|b| (k >> b) & 1 == 1).collect())
    }

    /// Value of the word read as a big-endian numeral (leading zeros allowed).
    pub fn value(&self) -> Option<u64> {
        self.0.iter().try_fold(0u64, |acc, &b| {
            acc.checked_mul(2).map(|v| v | b as u64)
        })
    }
}

impl From<Vec<bool>> for Word {
    fn from(bits: Vec<bool>) -> Self {
        Word(bits)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(CodeError::MalformedCode(format!("`{other}` is not a bit"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Cantor pairing `(i + j)(i + j + 1)/2 + j`. Panics if the result exceeds `u64`.
pub fn pair(i: u64, j: u64) -> u64 {
    let s = i as u128 + j as u128;
    let k = s * (s + 1) / 2 + j as u128;
    u64::try_from(k).expect("pair index overflows u64")
}

/// Inverse of [`pair`].
pub fn unpair(k: u64) -> (u64, u64) {
    let w = diagonal(k as u128);
    let t = w * (w + 1) / 2;
    let j = k as u128 - t;
    ((w - j) as u64, j as u64)
}

/// Largest `w` with `w(w+1)/2 <= k`.
pub(crate) fn diagonal(k: u128) -> u128 {
    ((8 * k + 1).sqrt() - 1) / 2
}

/// The query word for coordinate `i` at precision `j`: `pair(i, j)` in binary.
pub fn query_word(i: u64, j: u32) -> Word {
    Word::binary(pair(i, j as u64))
}

/// Bit length of [`query_word`] without materializing it.
pub fn query_len(i: u64, j: u32) -> usize {
    64 - pair(i, j as u64).leading_zeros() as usize
}

fn push_doubled(out: &mut Vec<bool>, payload: impl IntoIterator<Item = bool>) {
    for b in payload {
        out.push(b);
        out.push(b);
    }
    out.extend([false, true]);
}

fn magnitude_bits(n: &BigInt) -> impl Iterator<Item = bool> + '_ {
    let width = n.bits();
    (0..width).rev().map(move |b| n.bit(b))
}

fn zigzag(e: i64) -> u64 {
    ((e << 1) ^ (e >> 63)) as u64
}

fn unzigzag(z: u64) -> i64 {
    ((z >> 1) as i64) ^ -((z & 1) as i64)
}

/// Self-delimiting code: a sign bit, then the mantissa magnitude and the
/// zigzagged exponent, each bit-doubled and closed by `01`.
pub fn encode_dyadic(d: &Dyadic) -> Word {
    let mut out = vec![d.is_negative()];
    let m = d.mantissa().magnitude().clone().into();
    push_doubled(&mut out, magnitude_bits(&m));
    let z = BigInt::from(zigzag(d.exponent()));
    push_doubled(&mut out, magnitude_bits(&z));
    Word(out)
}

fn read_doubled(bits: &[bool], pos: &mut usize) -> Result<BigInt, CodeError> {
    let mut acc = BigInt::zero();
    loop {
        let pair = bits.get(*pos..*pos + 2).ok_or_else(|| {
            CodeError::MalformedCode("code ends before its terminator".into())
        })?;
        *pos += 2;
        match (pair[0], pair[1]) {
            (false, true) => return Ok(acc),
            (a, b) if a == b => acc = (acc << 1) + a as u8,
            _ => return Err(CodeError::MalformedCode("`10` is not a valid bit pair".into())),
        }
    }
}

/// Decodes the code at the front of `bits`, returning the value and the bits consumed.
pub fn decode_dyadic_prefix(bits: &[bool]) -> Result<(Dyadic, usize), CodeError> {
    let negative = *bits
        .first()
        .ok_or_else(|| CodeError::MalformedCode("empty code".into()))?;
    let mut pos = 1;
    let m = read_doubled(bits, &mut pos)?;
    let z = read_doubled(bits, &mut pos)?
        .to_u64()
        .ok_or_else(|| CodeError::MalformedCode("exponent out of range".into()))?;
    let m = if negative { -m } else { m };
    Ok((Dyadic::new(m, unzigzag(z)), pos))
}

pub fn decode_dyadic(w: &Word) -> Result<Dyadic, CodeError> {
    let (d, used) = decode_dyadic_prefix(w.bits())?;
    if used != w.len() {
        return Err(CodeError::MalformedCode(format!(
            "{} trailing bits after code",
            w.len() - used
        )));
    }
    Ok(d)
}

/// Appends a `1` marker and then zeros until the word has exactly `target` bits.
pub fn pad_to(w: &Word, target: usize) -> Result<Word, CodeError> {
    if target < w.len() + 1 {
        return Err(CodeError::PadOverflow {
            len: w.len(),
            target,
        });
    }
    let mut bits = Vec::with_capacity(target);
    bits.extend_from_slice(&w.0);
    bits.push(true);
    bits.resize(target, false);
    Ok(Word(bits))
}

/// Strips the padding added by [`pad_to`].
pub fn unpad(w: &Word) -> Result<Word, CodeError> {
    let marker = w
        .0
        .iter()
        .rposition(|&b| b)
        .ok_or_else(|| CodeError::MalformedCode("padding marker missing".into()))?;
    Ok(Word(w.0[..marker].to_vec()))
}

/// Builds the answer word `0^i ∘ code(value) ∘ padding` of total length `target`.
pub fn frame_answer(i: u64, value: &Dyadic, target: usize) -> Result<Word, CodeError> {
    let mut raw = Word::zeros(i as usize);
    raw.extend_from(&encode_dyadic(value));
    pad_to(&raw, target)
}

/// Length of `0^i ∘ code(value)` before padding.
pub fn raw_answer_len(i: u64, value: &Dyadic) -> usize {
    i as usize + encode_dyadic(value).len()
}

/// Inverse of [`frame_answer`] for a known coordinate `i`.
pub fn decode_answer(i: u64, w: &Word) -> Result<Dyadic, CodeError> {
    let i = i as usize;
    let bits = w.bits();
    if bits.len() < i || bits[..i].iter().any(|&b| b) {
        return Err(CodeError::MalformedCode(format!(
            "answer lacks the 0^{i} coordinate prefix"
        )));
    }
    let (d, used) = decode_dyadic_prefix(&bits[i..])?;
    let tail = &bits[i + used..];
    match tail.split_first() {
        Some((true, zeros)) if zeros.iter().all(|&b| !b) => Ok(d),
        _ => Err(CodeError::MalformedCode("bad padding after code".into())),
    }
}

/// A total string function together with its size `n ↦ |φ(0^n)|`.
pub trait RegularFn {
    fn answer(&self, u: &Word) -> Word;
}

/// `|φ(0^n)|`.
pub fn size_of(f: &dyn RegularFn, n: usize) -> usize {
    f.answer(&Word::zeros(n)).len()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityViolation {
    pub shorter: Word,
    pub longer: Word,
    pub shorter_answer_len: usize,
    pub longer_answer_len: usize,
}

/// Checks `|u| <= |v| ⇒ |φ(u)| <= |φ(v)|` over the sampled words.
///
/// Equal-length words must therefore have equal-length answers, and answer
/// lengths must not decrease as the word length grows.
pub fn audit_regularity(f: &dyn RegularFn, words: &[Word]) -> Result<(), RegularityViolation> {
    let mut sampled: Vec<(&Word, usize)> = words.iter().map(|w| (w, f.answer(w).len())).collect();
    sampled.sort_by_key(|&(w, _)| w.len());
    // Within the sorted list, the running maximum over shorter-or-equal words
    // must never exceed the answer length of the current word.
    let mut widest: Option<(&Word, usize)> = None;
    let mut k = 0;
    while k < sampled.len() {
        let len = sampled[k].0.len();
        let group_end = k + sampled[k..].iter().take_while(|(w, _)| w.len() == len).count();
        let group = &sampled[k..group_end];
        let group_max = group.iter().copied().max_by_key(|&(_, a)| a).expect("non-empty group");
        let candidate = match widest {
            Some(prev) if prev.1 >= group_max.1 => prev,
            _ => group_max,
        };
        if let Some(&(v, a)) = group.iter().find(|&&(_, a)| a < candidate.1) {
            return Err(RegularityViolation {
                shorter: candidate.0.clone(),
                longer: v.clone(),
                shorter_answer_len: candidate.1,
                longer_answer_len: a,
            });
        }
        widest = Some(candidate);
        k = group_end;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pairing_examples() {
        assert_eq!(pair(0, 0), 0);
        assert_eq!(pair(1, 2), 8);
        assert_eq!(unpair(8), (1, 2));
        for i in 0..64 {
            for j in 0..64 {
                assert_eq!(unpair(pair(i, j)), (i, j));
            }
        }
    }

    #[test]
    fn pairing_is_a_bijection_on_an_initial_segment() {
        // Every k below the 64th diagonal is hit exactly once.
        let limit = 64 * 65 / 2;
        let mut seen = vec![false; limit as usize];
        for s in 0..64u64 {
            for j in 0..=s {
                let k = pair(s - j, j);
                assert!(!seen[k as usize]);
                seen[k as usize] = true;
            }
        }
        assert!(seen.iter().all(|&b| b));
        // Monotone along a fixed diagonal.
        for s in 1..64u64 {
            for j in 1..=s {
                assert!(pair(s - j, j) > pair(s - j + 1, j - 1));
            }
        }
    }

    #[test]
    fn binary_words() {
        assert_eq!(Word::binary(0), Word::empty());
        assert_eq!(Word::binary(8).to_string(), "1000");
        assert_eq!("0001000".parse::<Word>().unwrap().value(), Some(8));
        assert_eq!(query_len(1, 2), 4);
    }

    #[test]
    fn code_round_trips() {
        for d in [Dyadic::zero(), Dyadic::new(-3, -1), Dyadic::new(5, 7), Dyadic::new(1, -40)] {
            assert_eq!(decode_dyadic(&encode_dyadic(&d)).unwrap(), d);
        }
        assert_eq!(encode_dyadic(&Dyadic::zero()).to_string(), "00101");
    }

    #[test]
    fn decode_rejects_garbage() {
        for w in ["", "0", "010", "0100101", "00101" /* ok */, "001011"] {
            let w: Word = w.parse().unwrap();
            let r = decode_dyadic(&w);
            if w.to_string() == "00101" {
                assert!(r.is_ok());
            } else {
                assert!(matches!(r, Err(CodeError::MalformedCode(_))), "{w}");
            }
        }
    }

    #[test]
    fn padding_examples() {
        assert_eq!(pad_to(&Word::empty(), 3).unwrap().to_string(), "100");
        assert_eq!(
            pad_to(&"101".parse().unwrap(), 3),
            Err(CodeError::PadOverflow { len: 3, target: 3 })
        );
        let framed = frame_answer(3, &Dyadic::new(5, -4), 40).unwrap();
        assert_eq!(framed.len(), 40);
        assert_eq!(decode_answer(3, &framed).unwrap(), Dyadic::new(5, -4));
        assert!(decode_answer(2, &framed).is_err());
    }

    struct Constant;
    impl RegularFn for Constant {
        fn answer(&self, _: &Word) -> Word {
            Word::zeros(5)
        }
    }

    struct Irregular;
    impl RegularFn for Irregular {
        fn answer(&self, u: &Word) -> Word {
            Word::zeros(10usize.saturating_sub(u.len()))
        }
    }

    #[test]
    fn size_and_audit() {
        for n in 0..10 {
            assert_eq!(size_of(&Constant, n), 5);
        }
        let words: Vec<Word> = (0..6).map(Word::zeros).collect();
        assert!(audit_regularity(&Constant, &words).is_ok());
        let v = audit_regularity(&Irregular, &words).unwrap_err();
        assert!(v.shorter.len() <= v.longer.len());
        assert!(v.shorter_answer_len > v.longer_answer_len);
    }

    fn dyadic() -> impl Strategy<Value = Dyadic> {
        (any::<i64>(), -1000i64..1000).prop_map(|(m, e)| Dyadic::new(m, e))
    }

    proptest! {
        #[test]
        fn codes_are_prefix_decodable(a in dyadic(), b in dyadic()) {
            let mut w = encode_dyadic(&a);
            let first = w.len();
            w.extend_from(&encode_dyadic(&b));
            let (x, used) = decode_dyadic_prefix(w.bits()).unwrap();
            prop_assert_eq!(x, a);
            prop_assert_eq!(used, first);
            let (y, _) = decode_dyadic_prefix(&w.bits()[used..]).unwrap();
            prop_assert_eq!(y, b);
        }

        #[test]
        fn code_length_tracks_payload(a in dyadic(), b in dyadic()) {
            // On a fixed sign the length is 5 + 2·(mantissa bits + zigzag exponent bits).
            let weight = |d: &Dyadic| d.mantissa().bits() + (64 - zigzag(d.exponent()).leading_zeros() as u64);
            let (la, lb) = (encode_dyadic(&a).len() as u64, encode_dyadic(&b).len() as u64);
            prop_assert_eq!(la, 5 + 2 * weight(&a));
            if a.is_negative() == b.is_negative() && weight(&a) < weight(&b) {
                prop_assert!(la < lb);
            }
        }

        #[test]
        fn pad_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..50), extra in 1usize..40) {
            let w = Word::from(bits);
            let target = w.len() + extra;
            let p = pad_to(&w, target).unwrap();
            prop_assert_eq!(p.len(), target);
            prop_assert_eq!(unpad(&p).unwrap(), w);
        }

        #[test]
        fn unpair_inverts_pair(i in 0u64..1 << 30, j in 0u64..1 << 30) {
            prop_assert_eq!(unpair(pair(i, j)), (i, j));
        }
    }
}
