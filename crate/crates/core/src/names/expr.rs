//! Closed-form expressions over the index `k`: `+ - * /`, non-negative integer
//! powers and rational constants. Evaluation is exact.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::numerics::Rational;

const MAX_POWER: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("expression syntax error at byte {at}: {msg}")]
    Syntax { at: usize, msg: String },
    #[error("a denominator in `{0}` can vanish for some k >= 0")]
    DenominatorMayVanish(String),
    #[error("division by zero at k = {0}")]
    DivisionByZero(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Node {
    Const(Rational),
    Index,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, u32),
}

/// A parsed index expression; keeps its source text for display and serialization.
#[derive(Debug, Clone)]
pub struct IndexExpr {
    source: String,
    root: Node,
}

impl PartialEq for IndexExpr {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl Eq for IndexExpr {}

impl IndexExpr {
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, k: u64) -> Result<Rational, ExprError> {
        eval(&self.root, &Rational::from_integer(BigInt::from(k)), k)
    }

    /// Rejects expressions whose denominators are not bounded away from zero on `k ∈ [0, ∞)`.
    pub fn check_denominators(&self) -> Result<(), ExprError> {
        let all = Interval {
            lo: Ext::Fin(Rational::zero()),
            hi: Ext::PosInf,
        };
        interval(&self.root, &all)
            .map(|_| ())
            .ok_or_else(|| ExprError::DenominatorMayVanish(self.source.clone()))
    }

    /// An upper bound on `|expr(k)|` over `0 <= k <= upto`.
    ///
    /// Requires [`check_denominators`](Self::check_denominators) to have passed.
    pub fn magnitude_bound(&self, upto: &BigUint) -> Rational {
        let dom = Interval {
            lo: Ext::Fin(Rational::zero()),
            hi: Ext::Fin(Rational::from_integer(BigInt::from(upto.clone()))),
        };
        let r = interval(&self.root, &dom).expect("denominators were validated");
        match (r.lo, r.hi) {
            (Ext::Fin(lo), Ext::Fin(hi)) => lo.abs().max(hi.abs()),
            _ => unreachable!("finite domain yields a finite range"),
        }
    }
}

fn eval(node: &Node, k: &Rational, at: u64) -> Result<Rational, ExprError> {
    Ok(match node {
        Node::Const(c) => c.clone(),
        Node::Index => k.clone(),
        Node::Neg(a) => -eval(a, k, at)?,
        Node::Add(a, b) => eval(a, k, at)? + eval(b, k, at)?,
        Node::Sub(a, b) => eval(a, k, at)? - eval(b, k, at)?,
        Node::Mul(a, b) => eval(a, k, at)? * eval(b, k, at)?,
        Node::Div(a, b) => {
            let d = eval(b, k, at)?;
            if d.is_zero() {
                return Err(ExprError::DivisionByZero(at));
            }
            eval(a, k, at)? / d
        }
        Node::Pow(a, p) => eval(a, k, at)?.pow(*p),
    })
}

/// Extended rational endpoint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Ext {
    NegInf,
    Fin(Rational),
    PosInf,
}

impl Ext {
    fn sign(&self) -> i32 {
        match self {
            Ext::NegInf => -1,
            Ext::PosInf => 1,
            Ext::Fin(q) => q.signum(),
        }
    }

    fn add(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a + b),
            (Ext::NegInf, Ext::PosInf) | (Ext::PosInf, Ext::NegInf) => {
                unreachable!("lower and upper endpoints are never mixed")
            }
            (Ext::NegInf, _) | (_, Ext::NegInf) => Ext::NegInf,
            _ => Ext::PosInf,
        }
    }

    fn neg(&self) -> Ext {
        match self {
            Ext::NegInf => Ext::PosInf,
            Ext::PosInf => Ext::NegInf,
            Ext::Fin(q) => Ext::Fin(-q),
        }
    }

    // 0 · ∞ = 0: endpoints bound sets of finite values.
    fn mul(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a * b),
            _ => match self.sign() * other.sign() {
                0 => Ext::Fin(Rational::zero()),
                1 => Ext::PosInf,
                _ => Ext::NegInf,
            },
        }
    }

    fn recip(&self) -> Ext {
        match self {
            Ext::Fin(q) => Ext::Fin(q.recip()),
            _ => Ext::Fin(Rational::zero()),
        }
    }
}

#[derive(Debug, Clone)]
struct Interval {
    lo: Ext,
    hi: Ext,
}

impl Interval {
    fn point(q: Rational) -> Self {
        Interval {
            lo: Ext::Fin(q.clone()),
            hi: Ext::Fin(q),
        }
    }

    fn mul(&self, other: &Interval) -> Interval {
        let products = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        Interval {
            lo: products.iter().min().cloned().expect("four products"),
            hi: products.iter().max().cloned().expect("four products"),
        }
    }

    fn contains_zero(&self) -> bool {
        self.lo.sign() <= 0 && self.hi.sign() >= 0
    }
}

fn interval(node: &Node, dom: &Interval) -> Option<Interval> {
    Some(match node {
        Node::Const(c) => Interval::point(c.clone()),
        Node::Index => dom.clone(),
        Node::Neg(a) => {
            let a = interval(a, dom)?;
            Interval {
                lo: a.hi.neg(),
                hi: a.lo.neg(),
            }
        }
        Node::Add(a, b) => {
            let (a, b) = (interval(a, dom)?, interval(b, dom)?);
            Interval {
                lo: a.lo.add(&b.lo),
                hi: a.hi.add(&b.hi),
            }
        }
        Node::Sub(a, b) => {
            let (a, b) = (interval(a, dom)?, interval(b, dom)?);
            Interval {
                lo: a.lo.add(&b.hi.neg()),
                hi: a.hi.add(&b.lo.neg()),
            }
        }
        Node::Mul(a, b) => interval(a, dom)?.mul(&interval(b, dom)?),
        Node::Div(a, b) => {
            let b = interval(b, dom)?;
            if b.contains_zero() {
                return None;
            }
            let recip = Interval {
                lo: b.hi.recip(),
                hi: b.lo.recip(),
            };
            interval(a, dom)?.mul(&recip)
        }
        Node::Pow(a, p) => {
            let base = interval(a, dom)?;
            let mut acc = Interval::point(Rational::one());
            for _ in 0..*p {
                acc = acc.mul(&base);
            }
            acc
        }
    })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax {
            at: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<&'a str, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let p: u32 = match self.digits()?.parse() {
                Ok(p) if p <= MAX_POWER => p,
                _ => return self.err(format!("exponent must be an integer in 0..={MAX_POWER}")),
            };
            return Ok(Node::Pow(Box::new(base), p));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(b'k') => {
                self.pos += 1;
                Ok(Node::Index)
            }
            Some(c) if c.is_ascii_digit() => {
                let n: BigInt = self.digits()?.parse().expect("digits parse");
                Ok(Node::Const(Rational::from_integer(n)))
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
            None => self.err("unexpected end of expression"),
        }
    }
}

impl FromStr for IndexExpr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let root = p.expr()?;
        if p.peek().is_some() {
            return p.err("trailing input");
        }
        Ok(IndexExpr {
            source: s.trim().to_string(),
            root,
        })
    }
}

impl fmt::Display for IndexExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Serialize for IndexExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for IndexExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
