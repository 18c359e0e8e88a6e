//! Arithmetic expressions over `x1..xn`.
//!
//! Grammar, with `^` binding tighter than unary minus and right-associative:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'x' digits | '(' expr ')' | ('min' | 'max') '(' expr ',' expr ')'
//! ```

use std::fmt;

use num_rational::BigRational;

use super::EvalError;
use crate::scalar::{parse_rational, rational_to_f64, rational_to_literal, Scalar};

/// Numeric constant, kept both exactly and as the float nearest its text.
#[derive(Clone, Debug, PartialEq)]
pub struct Literal {
    exact: BigRational,
    float: f64,
}

impl Literal {
    pub fn from_rational(r: BigRational) -> Self {
        let float = rational_to_f64(&r);
        Literal { exact: r, float }
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    fn value<T: Scalar>(&self) -> T {
        if T::EXACT {
            T::from_rational(&self.exact)
        } else {
            // f64 backend: use the float parsed from the literal text.
            T::from_f64(self.float).expect("literal is finite")
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Min,
    Max,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Literal),
    /// Zero-based variable index.
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn constant(r: BigRational) -> Expr {
        Expr::Const(Literal::from_rational(r))
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(e) => e.max_var(),
            Expr::Binary(_, a, b) => a.max_var().max(b.max_var()),
        }
    }

    fn eval<T: Scalar>(&self, x: &[T]) -> Result<T, EvalError> {
        Ok(match self {
            Expr::Const(lit) => lit.value(),
            Expr::Var(i) => x[*i].clone(),
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Binary(op, a, b) => {
                let a = a.eval(x)?;
                let b = b.eval(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b.is_zero() {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                    BinOp::Pow => a.pow(&b).ok_or_else(|| EvalError::UndefinedPower {
                        base: a.to_f64(),
                        exponent: b.to_f64(),
                    })?,
                    BinOp::Min => T::min_of(a, b),
                    BinOp::Max => T::max_of(a, b),
                }
            }
        })
    }

    /// `true` when every power has a constant integer exponent.
    fn is_rational(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => true,
            Expr::Neg(e) => e.is_rational(),
            Expr::Binary(BinOp::Pow, a, b) => a.is_rational() && constant_integer(b),
            Expr::Binary(_, a, b) => a.is_rational() && b.is_rational(),
        }
    }
}

fn constant_integer(e: &Expr) -> bool {
    match e {
        Expr::Const(lit) => lit.exact.is_integer(),
        Expr::Neg(inner) => constant_integer(inner),
        _ => false,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(lit) => {
                let text = rational_to_literal(&lit.exact);
                if text.starts_with('-') || text.contains('/') {
                    write!(f, "({text})")
                } else {
                    f.write_str(&text)
                }
            }
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, a, b) => match op {
                BinOp::Min => write!(f, "min({a}, {b})"),
                BinOp::Max => write!(f, "max({a}, {b})"),
                _ => {
                    let sym = match op {
                        BinOp::Add => '+',
                        BinOp::Sub => '-',
                        BinOp::Mul => '*',
                        BinOp::Div => '/',
                        _ => '^',
                    };
                    write!(f, "({a} {sym} {b})")
                }
            },
        }
    }
}

/// A parsed expression together with its arity.
#[derive(Clone, Debug, PartialEq)]
pub struct FuncExpr {
    root: Expr,
    arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("variable x{index} out of range for arity {arity}")]
    VariableOutOfRange { index: usize, arity: usize },
    #[error("arity must be at least 1")]
    ZeroArity,
    #[error("empty expression")]
    Empty,
}

impl FuncExpr {
    pub fn new(root: Expr, arity: usize) -> Result<Self, ParseError> {
        if arity == 0 {
            return Err(ParseError::ZeroArity);
        }
        if let Some(i) = root.max_var() {
            if i >= arity {
                return Err(ParseError::VariableOutOfRange {
                    index: i + 1,
                    arity,
                });
            }
        }
        Ok(FuncExpr { root, arity })
    }

    pub fn parse(text: &str, arity: usize) -> Result<Self, ParseError> {
        if text.trim().is_empty() {
            return Err(ParseError::Empty);
        }
        let mut parser = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let root = parser.expr()?;
        parser.skip_ws();
        if parser.pos < parser.src.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        FuncExpr::new(root, arity)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    /// Raw evaluation; may return negative values.
    pub fn eval_raw<T: Scalar>(&self, x: &[T]) -> Result<T, EvalError> {
        self.root.eval(x)
    }

    pub fn is_rational(&self) -> bool {
        self.root.is_rational()
    }
}

impl fmt::Display for FuncExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
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

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        // optional exponent: e / E followed by an optionally signed integer
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let mut p = self.pos + 1;
            if p < self.src.len() && matches!(self.src[p], b'+' | b'-') {
                p += 1;
            }
            if p < self.src.len() && self.src[p].is_ascii_digit() {
                while p < self.src.len() && self.src[p].is_ascii_digit() {
                    p += 1;
                }
                self.pos = p;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let exact = parse_rational(text).ok_or(ParseError::Syntax {
            position: start,
            message: format!("invalid number '{text}'"),
        })?;
        let float: f64 = text.parse().map_err(|_| ParseError::Syntax {
            position: start,
            message: format!("invalid number '{text}'"),
        })?;
        Ok(Expr::Const(Literal { exact, float }))
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let ident = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match ident {
            "min" | "max" => {
                self.expect(b'(')?;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b')')?;
                let op = if ident == "min" {
                    BinOp::Min
                } else {
                    BinOp::Max
                };
                Ok(Expr::binary(op, a, b))
            }
            _ => {
                let index = ident
                    .strip_prefix('x')
                    .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                    .and_then(|d| d.parse::<usize>().ok())
                    .ok_or(ParseError::Syntax {
                        position: start,
                        message: format!("unknown identifier '{ident}'"),
                    })?;
                if index == 0 {
                    return Err(ParseError::VariableOutOfRange { index: 0, arity: 0 });
                }
                Ok(Expr::Var(index - 1))
            }
        }
    }
}
