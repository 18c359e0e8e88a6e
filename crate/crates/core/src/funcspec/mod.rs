//! Input functions: expressions, piecewise-linear specs and the builtin catalog.

pub mod catalog;
pub mod expr;
pub mod pl;

pub use catalog::{catalog_get, CatalogEntry, CatalogError, Params};
pub use expr::{BinOp, Expr, FuncExpr, ParseError};
pub use pl::{PlError, PlSpec};

use std::fmt;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("undefined power {base}^{exponent}")]
    UndefinedPower { base: f64, exponent: f64 },
    #[error("negative value {0} (aggregation codomain is [0, inf))")]
    NegativeValue(String),
    #[error("non-finite value {0}")]
    NotFinite(String),
    #[error("negative coordinate")]
    NegativeCoordinate,
    #[error("expected {expected} coordinates, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}

/// Anything that can be evaluated at a point of `[0, inf)^n`.
pub trait PointFn {
    fn arity(&self) -> usize;
    fn eval<T: Scalar>(&self, point: &[T]) -> Result<T, EvalError>;
}

/// A function definition accepted by the samplers.
#[derive(Clone, Debug, PartialEq)]
pub enum FuncSpec {
    Expr(FuncExpr),
    Pl(PlSpec),
    /// `base(x1) + x2 + ... + xn`.
    Lifted {
        base: Box<FuncSpec>,
        arity: usize,
    },
}

impl FuncSpec {
    pub fn parse(text: &str, arity: usize) -> Result<Self, ParseError> {
        FuncExpr::parse(text, arity).map(FuncSpec::Expr)
    }

    /// `true` when evaluation stays inside the rationals.
    pub fn is_rational(&self) -> bool {
        match self {
            FuncSpec::Expr(e) => e.is_rational(),
            FuncSpec::Pl(_) => true,
            FuncSpec::Lifted { base, .. } => base.is_rational(),
        }
    }

    fn eval_unchecked<T: Scalar>(&self, x: &[T]) -> Result<T, EvalError> {
        match self {
            FuncSpec::Expr(e) => e.eval_raw(x),
            FuncSpec::Pl(pl) => pl.eval(&x[0]),
            FuncSpec::Lifted { base, .. } => {
                let mut v = base.eval(&x[..1])?;
                for xi in &x[1..] {
                    v = v + xi.clone();
                }
                Ok(v)
            }
        }
    }
}

impl PointFn for FuncSpec {
    fn arity(&self) -> usize {
        match self {
            FuncSpec::Expr(e) => e.arity(),
            FuncSpec::Pl(_) => 1,
            FuncSpec::Lifted { arity, .. } => *arity,
        }
    }

    /// Evaluates at `point`; negative results are errors, not clamped.
    fn eval<T: Scalar>(&self, point: &[T]) -> Result<T, EvalError> {
        let expected = PointFn::arity(self);
        if point.len() != expected {
            return Err(EvalError::ArityMismatch {
                expected,
                got: point.len(),
            });
        }
        if point.iter().any(Scalar::is_negative) {
            return Err(EvalError::NegativeCoordinate);
        }
        let v = self.eval_unchecked(point)?;
        if v.is_negative() {
            return Err(EvalError::NegativeValue(v.to_string()));
        }
        if !T::EXACT && !v.to_f64().is_finite() {
            return Err(EvalError::NotFinite(v.to_string()));
        }
        Ok(v)
    }
}

impl From<FuncExpr> for FuncSpec {
    fn from(e: FuncExpr) -> Self {
        FuncSpec::Expr(e)
    }
}

impl fmt::Display for FuncSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuncSpec::Expr(e) => e.fmt(f),
            FuncSpec::Pl(p) => p.fmt(f),
            FuncSpec::Lifted { base, arity } => write!(f, "lifted[{arity}]({base})"),
        }
    }
}

impl From<PlSpec> for FuncSpec {
    fn from(p: PlSpec) -> Self {
        FuncSpec::Pl(p)
    }
}
