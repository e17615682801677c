//! Expression trees for user-supplied superpotentials.
//!
//! Grammar (whitespace is insignificant; parameters are substituted as
//! constants at parse time):
//!
//! ```text
//! expr     := term { ("+" | "-") term }
//! term     := unary { ("*" | "/") unary }
//! unary    := "-" unary | power
//! power    := atom [ "^" exponent ]
//! exponent := ["-"] integer | "(" ["-"] integer [ "/" integer ] ")"
//! atom     := number | "x" | "r" | "pi" | param | "exp" "(" expr ")" | "(" expr ")"
//! ```
//!
//! `x` and `r` both name the independent variable. Division `a / b` is stored
//! as `a · b⁻¹`, subtraction as `a + (−1)·b`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Reduced rational exponent `num / den`, `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Config("zero denominator in exponent".into()));
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        let s = den.signum();
        Ok(Self {
            num: s * num / g,
            den: s * den / g,
        })
    }

    pub fn integer(n: i64) -> Self {
        Self { num: n, den: 1 }
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn minus_one(self) -> Self {
        Self {
            num: self.num - self.den,
            den: self.den,
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Sum(Box<Expr>, Box<Expr>),
    Product(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Rational),
    Exp(Box<Expr>),
    Recip(Box<Expr>),
}

// smart constructors with light constant folding

pub fn constant(c: f64) -> Expr {
    Expr::Const(c)
}

pub fn var() -> Expr {
    Expr::Var
}

pub fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (Expr::Const(z), _) if *z == 0.0 => b,
        (_, Expr::Const(z)) if *z == 0.0 => a,
        _ => Expr::Sum(Box::new(a), Box::new(b)),
    }
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (Expr::Const(z), _) | (_, Expr::Const(z)) if *z == 0.0 => Expr::Const(0.0),
        (Expr::Const(o), _) if *o == 1.0 => b,
        (_, Expr::Const(o)) if *o == 1.0 => a,
        _ => Expr::Product(Box::new(a), Box::new(b)),
    }
}

pub fn neg(a: Expr) -> Expr {
    mul(Expr::Const(-1.0), a)
}

pub fn pow(a: Expr, e: Rational) -> Expr {
    if e.num == 0 {
        return Expr::Const(1.0);
    }
    if e == Rational::integer(1) {
        return a;
    }
    Expr::Pow(Box::new(a), e)
}

pub fn exp(a: Expr) -> Expr {
    Expr::Exp(Box::new(a))
}

pub fn recip(a: Expr) -> Expr {
    Expr::Recip(Box::new(a))
}

impl Expr {
    /// Real evaluation. Fractional powers require a positive base.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = self.eval_raw(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation {
                x,
                reason: format!("non-finite value {v}"),
            })
        }
    }

    fn eval_raw(&self, x: f64) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var => x,
            Expr::Sum(a, b) => a.eval_raw(x)? + b.eval_raw(x)?,
            Expr::Product(a, b) => a.eval_raw(x)? * b.eval_raw(x)?,
            Expr::Pow(a, e) => {
                let base = a.eval_raw(x)?;
                if e.is_integer() {
                    base.powi(e.num as i32)
                } else if base > 0.0 {
                    base.powf(e.as_f64())
                } else {
                    return Err(Error::Evaluation {
                        x,
                        reason: format!("fractional power of non-positive base {base}"),
                    });
                }
            }
            Expr::Exp(a) => a.eval_raw(x)?.exp(),
            Expr::Recip(a) => 1.0 / a.eval_raw(x)?,
        })
    }

    /// Evaluation at a complex argument; only defined for entire expressions.
    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        if !self.is_entire() {
            return Err(Error::Config(
                "complex evaluation requires an entire expression (no reciprocals or negative/fractional powers)".into(),
            ));
        }
        Ok(self.eval_complex_raw(z))
    }

    fn eval_complex_raw(&self, z: Complex64) -> Complex64 {
        match self {
            Expr::Const(c) => Complex64::new(*c, 0.0),
            Expr::Var => z,
            Expr::Sum(a, b) => a.eval_complex_raw(z) + b.eval_complex_raw(z),
            Expr::Product(a, b) => a.eval_complex_raw(z) * b.eval_complex_raw(z),
            Expr::Pow(a, e) => a.eval_complex_raw(z).powi(e.num as i32),
            Expr::Exp(a) => a.eval_complex_raw(z).exp(),
            Expr::Recip(a) => a.eval_complex_raw(z).inv(),
        }
    }

    /// No reciprocals and only non-negative integer powers.
    pub fn is_entire(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var => true,
            Expr::Sum(a, b) | Expr::Product(a, b) => a.is_entire() && b.is_entire(),
            Expr::Pow(a, e) => e.is_integer() && e.num >= 0 && a.is_entire(),
            Expr::Exp(a) => a.is_entire(),
            Expr::Recip(_) => false,
        }
    }

    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Const(_) => constant(0.0),
            Expr::Var => constant(1.0),
            Expr::Sum(a, b) => add(a.derivative(), b.derivative()),
            Expr::Product(a, b) => add(
                mul(a.derivative(), (**b).clone()),
                mul((**a).clone(), b.derivative()),
            ),
            Expr::Pow(a, e) => mul(
                mul(constant(e.as_f64()), pow((**a).clone(), e.minus_one())),
                a.derivative(),
            ),
            Expr::Exp(a) => mul(self.clone(), a.derivative()),
            Expr::Recip(a) => neg(mul(
                a.derivative(),
                pow((**a).clone(), Rational::integer(-2)),
            )),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Sum(a, b) | Expr::Product(a, b) => 1 + a.depth().max(b.depth()),
            Expr::Pow(a, _) | Expr::Exp(a) | Expr::Recip(a) => 1 + a.depth(),
        }
    }

    pub fn parse(src: &str, params: &BTreeMap<String, f64>) -> Result<Expr> {
        let mut p = Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            params,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var => write!(f, "x"),
            Expr::Sum(a, b) => write!(f, "({a} + {b})"),
            Expr::Product(a, b) => write!(f, "({a} * {b})"),
            Expr::Pow(a, e) if e.is_integer() => write!(f, "{a}^({})", e.num),
            Expr::Pow(a, e) => write!(f, "{a}^({}/{})", e.num, e.den),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Recip(a) => write!(f, "(1 / {a})"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    params: &'a BTreeMap<String, f64>,
}

impl Parser<'_> {
    fn err(&self, reason: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            reason: reason.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = add(lhs, self.term()?);
            } else if self.eat(b'-') {
                lhs = add(lhs, neg(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = mul(lhs, self.unary()?);
            } else if self.eat(b'/') {
                let rhs = self.unary()?;
                lhs = match rhs {
                    Expr::Const(c) if c != 0.0 => mul(lhs, constant(1.0 / c)),
                    other => mul(lhs, recip(other)),
                };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            Ok(neg(self.unary()?))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.exponent()?;
            Ok(pow(base, e))
        } else {
            Ok(base)
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        let negative = self.eat(b'-');
        self.skip_ws();
        let digits_start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if digits_start == self.pos {
            self.pos = start;
            return Err(self.err("expected an integer exponent"));
        }
        let n: i64 = self.src[digits_start..self.pos]
            .parse()
            .map_err(|_| self.err("exponent out of range"))?;
        Ok(if negative { -n } else { n })
    }

    fn exponent(&mut self) -> Result<Rational> {
        if self.eat(b'(') {
            let num = self.integer()?;
            let den = if self.eat(b'/') { self.integer()? } else { 1 };
            self.expect(b')')?;
            Rational::new(num, den).map_err(|_| self.err("zero denominator in exponent"))
        } else {
            Ok(Rational::integer(self.integer()?))
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let b = self.bytes;
        while self.pos < b.len() && (b[self.pos].is_ascii_digit() || b[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < b.len() && (b[self.pos] == b'e' || b[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < b.len() && (b[self.pos] == b'+' || b[self.pos] == b'-') {
                self.pos += 1;
            }
            let ds = self.pos;
            while self.pos < b.len() && b[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if ds == self.pos {
                self.pos = save;
            }
        }
        self.src[start..self.pos].parse().map_err(|_| Error::Parse {
            pos: start,
            reason: format!("malformed number '{}'", &self.src[start..self.pos]),
        })
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(constant(self.number()?)),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_alphanumeric()
                        || self.bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                match name {
                    "x" | "r" => Ok(var()),
                    "pi" => Ok(constant(std::f64::consts::PI)),
                    "exp" => {
                        self.expect(b'(')?;
                        let e = self.expr()?;
                        self.expect(b')')?;
                        Ok(exp(e))
                    }
                    _ => match self.params.get(name) {
                        Some(v) => Ok(constant(*v)),
                        None => Err(Error::Parse {
                            pos: start,
                            reason: format!("unknown identifier '{name}'"),
                        }),
                    },
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
