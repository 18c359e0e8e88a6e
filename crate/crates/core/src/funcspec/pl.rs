//! Continuous piecewise-linear functions of one variable.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::Value;

use super::EvalError;
use crate::scalar::{parse_rational, rational_to_literal, Scalar};

/// Knots `(x, y)` with strictly increasing `x` starting at 0, followed by a
/// linear tail of slope `tail_slope` beyond the last knot.
/// `(numerator, denominator)`.
pub type IntRatio = (i64, i64);

#[derive(Clone, Debug, PartialEq)]
pub struct PlSpec {
    knots: Vec<(BigRational, BigRational)>,
    tail_slope: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlError {
    #[error("piecewise-linear spec needs at least one knot")]
    NoKnots,
    #[error("first knot must be at x = 0, found {0}")]
    FirstKnotNotAtZero(String),
    #[error("knot {0}: x values must be strictly increasing")]
    NotIncreasing(usize),
    #[error("knot {0}: negative coordinate")]
    Negative(usize),
    #[error("negative tail slope")]
    NegativeTail,
    #[error("invalid piecewise-linear JSON: {0}")]
    Json(String),
}

impl std::fmt::Display for PlSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("pl[")?;
        for (i, (x, y)) in self.knots.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(
                f,
                "({}, {})",
                rational_to_literal(x),
                rational_to_literal(y)
            )?;
        }
        write!(f, "; tail {}]", rational_to_literal(&self.tail_slope))
    }
}

impl PlSpec {
    pub fn new(
        knots: Vec<(BigRational, BigRational)>,
        tail_slope: BigRational,
    ) -> Result<Self, PlError> {
        let first = knots.first().ok_or(PlError::NoKnots)?;
        if !first.0.is_zero() {
            return Err(PlError::FirstKnotNotAtZero(first.0.to_string()));
        }
        for (i, (x, y)) in knots.iter().enumerate() {
            if x.is_negative() || y.is_negative() {
                return Err(PlError::Negative(i));
            }
            if i > 0 && knots[i - 1].0 >= *x {
                return Err(PlError::NotIncreasing(i));
            }
        }
        if tail_slope.is_negative() {
            return Err(PlError::NegativeTail);
        }
        Ok(PlSpec { knots, tail_slope })
    }

    /// Builds a spec from integer-ratio pairs, `((xn, xd), (yn, yd))`.
    pub fn from_ratios(knots: &[(IntRatio, IntRatio)], tail: IntRatio) -> Result<Self, PlError> {
        let r = |(n, d): (i64, i64)| BigRational::new(BigInt::from(n), BigInt::from(d));
        PlSpec::new(knots.iter().map(|&(x, y)| (r(x), r(y))).collect(), r(tail))
    }

    pub fn knots(&self) -> &[(BigRational, BigRational)] {
        &self.knots
    }

    pub fn tail_slope(&self) -> &BigRational {
        &self.tail_slope
    }

    /// Evaluates at `x >= 0`.
    pub fn eval<T: Scalar>(&self, x: &T) -> Result<T, EvalError> {
        if x.is_negative() {
            return Err(EvalError::NegativeCoordinate);
        }
        let last = self.knots.len() - 1;
        // segment k covers [x_k, x_{k+1})
        let k = self
            .knots
            .partition_point(|(kx, _)| T::from_rational(kx) <= *x)
            .saturating_sub(1);
        if k == last {
            let (kx, ky) = &self.knots[last];
            return Ok(T::from_rational(ky)
                + T::from_rational(&self.tail_slope) * (x.clone() - T::from_rational(kx)));
        }
        Ok(self.segment_value(k, x))
    }

    /// Value of the affine piece on segment `k` (between knots `k` and
    /// `k + 1`) at `x`; exact at both endpoints in either backend.
    pub fn segment_value<T: Scalar>(&self, k: usize, x: &T) -> T {
        let (x0, y0) = &self.knots[k];
        let (x1, y1) = &self.knots[k + 1];
        let (x0, y0, x1, y1) = (
            T::from_rational(x0),
            T::from_rational(y0),
            T::from_rational(x1),
            T::from_rational(y1),
        );
        if *x == x0 {
            return y0;
        }
        if *x == x1 {
            return y1;
        }
        let slope = (y1.clone() - y0.clone()) / (x1 - x0.clone());
        let v = y0.clone() + slope * (x.clone() - x0);
        // keeps float evaluation monotone across knots
        let (lo, hi) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
        T::min_of(T::max_of(v, lo), hi)
    }

    /// Parses `{ "knots": [[x, y], ...], "tail_slope": s }` where every
    /// number is a decimal string, a JSON number, or an `[num, den]` pair.
    pub fn from_json(text: &str) -> Result<Self, PlError> {
        let v: Value = serde_json::from_str(text).map_err(|e| PlError::Json(e.to_string()))?;
        let knots = v
            .get("knots")
            .and_then(Value::as_array)
            .ok_or_else(|| PlError::Json("missing \"knots\" array".into()))?;
        let knots = knots
            .iter()
            .map(|k| match k.as_array().map(Vec::as_slice) {
                Some([x, y]) => Ok((json_number(x)?, json_number(y)?)),
                _ => Err(PlError::Json("each knot must be an [x, y] pair".into())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let tail = v
            .get("tail_slope")
            .ok_or_else(|| PlError::Json("missing \"tail_slope\"".into()))
            .and_then(json_number)?;
        PlSpec::new(knots, tail)
    }

    pub fn to_json(&self) -> Value {
        let num = |r: &BigRational| -> Value {
            if r.is_integer() || !rational_to_literal(r).contains('/') {
                Value::String(rational_to_literal(r))
            } else {
                match (r.numer().to_i64(), r.denom().to_i64()) {
                    (Some(n), Some(d)) => serde_json::json!([n, d]),
                    _ => serde_json::json!([r.numer().to_string(), r.denom().to_string()]),
                }
            }
        };
        serde_json::json!({
            "knots": self.knots.iter().map(|(x, y)| serde_json::json!([num(x), num(y)])).collect::<Vec<_>>(),
            "tail_slope": num(&self.tail_slope),
        })
    }
}

fn json_number(v: &Value) -> Result<BigRational, PlError> {
    match v {
        Value::String(s) => {
            parse_rational(s).ok_or_else(|| PlError::Json(format!("invalid number '{s}'")))
        }
        Value::Number(n) => parse_rational(&n.to_string())
            .ok_or_else(|| PlError::Json(format!("invalid number {n}"))),
        Value::Array(pair) if pair.len() == 2 => {
            let part = |p: &Value| {
                p.as_i64()
                    .map(BigInt::from)
                    .or_else(|| p.as_str().and_then(|s| s.parse::<BigInt>().ok()))
                    .ok_or_else(|| PlError::Json(format!("invalid integer {p}")))
            };
            let (n, d) = (part(&pair[0])?, part(&pair[1])?);
            if d.is_zero() {
                return Err(PlError::Json("zero denominator".into()));
            }
            Ok(BigRational::new(n, d))
        }
        other => Err(PlError::Json(format!("expected a number, found {other}"))),
    }
}
