//! Second-order polynomials: built from constants, the first-order variable
//! `x`, sums, products and applications of the function variable `f`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("polynomial syntax error at byte {at}: {msg}")]
pub struct SopParseError {
    pub at: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SecondOrderPoly {
    Const(BigUint),
    Var,
    Add(Box<SecondOrderPoly>, Box<SecondOrderPoly>),
    Mul(Box<SecondOrderPoly>, Box<SecondOrderPoly>),
    Apply(Box<SecondOrderPoly>),
}

impl SecondOrderPoly {
    pub fn constant(c: u64) -> Self {
        SecondOrderPoly::Const(BigUint::from(c))
    }

    pub fn var() -> Self {
        SecondOrderPoly::Var
    }

    pub fn apply(p: SecondOrderPoly) -> Self {
        SecondOrderPoly::Apply(Box::new(p))
    }

    /// Structural evaluation of `P(f, x)`.
    pub fn eval(&self, f: &dyn Fn(&BigUint) -> BigUint, x: &BigUint) -> BigUint {
        match self {
            SecondOrderPoly::Const(c) => c.clone(),
            SecondOrderPoly::Var => x.clone(),
            SecondOrderPoly::Add(a, b) => a.eval(f, x) + b.eval(f, x),
            SecondOrderPoly::Mul(a, b) => a.eval(f, x) * b.eval(f, x),
            SecondOrderPoly::Apply(a) => f(&a.eval(f, x)),
        }
    }

    /// Convenience for small first-order arguments and `u64` functions.
    pub fn eval_u64(&self, f: impl Fn(u64) -> u64, x: u64) -> BigUint {
        let lifted = |v: &BigUint| {
            let v = u64::try_from(v).expect("argument of f exceeds u64");
            BigUint::from(f(v))
        };
        self.eval(&lifted, &BigUint::from(x))
    }
}

impl std::ops::Add for SecondOrderPoly {
    type Output = SecondOrderPoly;
    fn add(self, rhs: SecondOrderPoly) -> SecondOrderPoly {
        SecondOrderPoly::Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for SecondOrderPoly {
    type Output = SecondOrderPoly;
    fn mul(self, rhs: SecondOrderPoly) -> SecondOrderPoly {
        SecondOrderPoly::Mul(Box::new(self), Box::new(rhs))
    }
}

/// `eval_sop(P, f, x)`.
pub fn eval_sop(p: &SecondOrderPoly, f: &dyn Fn(&BigUint) -> BigUint, x: &BigUint) -> BigUint {
    p.eval(f, x)
}

impl fmt::Display for SecondOrderPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SecondOrderPoly::Const(c) => write!(f, "{c}"),
            SecondOrderPoly::Var => write!(f, "x"),
            SecondOrderPoly::Add(a, b) => write!(f, "{a} + {b}"),
            SecondOrderPoly::Mul(a, b) => {
                let wrap = |p: &SecondOrderPoly| match p {
                    SecondOrderPoly::Add(..) => format!("({p})"),
                    _ => p.to_string(),
                };
                write!(f, "{}*{}", wrap(a), wrap(b))
            }
            SecondOrderPoly::Apply(a) => write!(f, "f({a})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, SopParseError> {
        Err(SopParseError {
            at: self.pos,
            msg: msg.to_string(),
        })
    }

    fn peek(&mut self) -> Option<u8> {
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        let hit = self.peek() == Some(c);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn sum(&mut self) -> Result<SecondOrderPoly, SopParseError> {
        let mut lhs = self.product()?;
        while self.eat(b'+') {
            lhs = lhs + self.product()?;
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<SecondOrderPoly, SopParseError> {
        let mut lhs = self.atom()?;
        while self.eat(b'*') {
            lhs = lhs * self.atom()?;
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<SecondOrderPoly, SopParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                Ok(SecondOrderPoly::Var)
            }
            Some(b'f') => {
                self.pos += 1;
                if !self.eat(b'(') {
                    return self.err("expected `(` after f");
                }
                let arg = self.sum()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                Ok(SecondOrderPoly::apply(arg))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                Ok(SecondOrderPoly::Const(digits.parse().expect("digits")))
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }
}

impl FromStr for SecondOrderPoly {
    type Err = SopParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let poly = p.sum()?;
        if p.peek().is_some() {
            return p.err("trailing input");
        }
        Ok(poly)
    }
}
