//! Regular grids on boxes `[0, X1] x ... x [0, Xn]` and functions sampled on them.

pub mod csv;

use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::funcspec::{EvalError, PointFn};
use crate::scalar::Scalar;

/// Non-negative extended real: a finite value or `+inf`.
///
/// Variant order makes the derived ordering put `Infinite` above every
/// finite value.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub enum ExtValue<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> ExtValue<T> {
    pub fn zero() -> Self {
        ExtValue::Finite(T::zero())
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            ExtValue::Finite(v) => Some(v),
            ExtValue::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtValue::Infinite)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtValue::Finite(v) => v.to_f64(),
            ExtValue::Infinite => f64::INFINITY,
        }
    }

    /// Signed difference `self - other`.
    pub fn diff(&self, other: &Self) -> Slack<T> {
        match (self, other) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => Slack::Finite(a.clone() - b.clone()),
            (ExtValue::Infinite, ExtValue::Finite(_)) => Slack::PlusInfinity,
            (ExtValue::Finite(_), ExtValue::Infinite) => Slack::MinusInfinity,
            (ExtValue::Infinite, ExtValue::Infinite) => Slack::Finite(T::zero()),
        }
    }

    /// Division by a positive finite scalar.
    pub fn div_scalar(&self, d: &T) -> Self {
        match self {
            ExtValue::Finite(v) => ExtValue::Finite(v.clone() / d.clone()),
            ExtValue::Infinite => ExtValue::Infinite,
        }
    }

    pub fn to_csv(&self) -> String {
        match self {
            ExtValue::Finite(v) => v.to_csv(),
            ExtValue::Infinite => "inf".to_string(),
        }
    }
}

impl<T: Scalar> Add for ExtValue<T> {
    type Output = ExtValue<T>;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => ExtValue::Finite(a + b),
            _ => ExtValue::Infinite,
        }
    }
}

impl<T: Scalar> fmt::Display for ExtValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::Finite(v) => fmt::Display::fmt(v, f),
            ExtValue::Infinite => f.write_str("inf"),
        }
    }
}

impl<T: Scalar> Serialize for ExtValue<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtValue::Finite(v) => v.serialize(s),
            ExtValue::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Signed extended real, used for violation amounts and margins.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub enum Slack<T> {
    MinusInfinity,
    Finite(T),
    PlusInfinity,
}

impl<T: Scalar> Slack<T> {
    pub fn finite(&self) -> Option<&T> {
        match self {
            Slack::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Slack::MinusInfinity => Slack::PlusInfinity,
            Slack::Finite(v) => Slack::Finite(-v.clone()),
            Slack::PlusInfinity => Slack::MinusInfinity,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Slack::MinusInfinity => f64::NEG_INFINITY,
            Slack::Finite(v) => v.to_f64(),
            Slack::PlusInfinity => f64::INFINITY,
        }
    }
}

impl<T: Scalar> fmt::Display for Slack<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slack::MinusInfinity => f.write_str("-inf"),
            Slack::Finite(v) => fmt::Display::fmt(v, f),
            Slack::PlusInfinity => f.write_str("inf"),
        }
    }
}

impl<T: Scalar> Serialize for Slack<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Slack::Finite(v) => v.serialize(s),
            other => s.collect_str(other),
        }
    }
}

/// Caps on grid sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_points: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_points: 4_000_000,
        }
    }
}

impl Limits {
    /// Reads `ADDILOPE_MAX_GRID`, falling back to the default.
    pub fn from_env() -> Self {
        std::env::var("ADDILOPE_MAX_GRID")
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|v| *v >= 1.0)
            .map(|v| Limits {
                max_points: v as usize,
            })
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GridError {
    #[error("grid needs at least one axis")]
    NoAxes,
    #[error("steps and counts differ in length ({steps} vs {counts})")]
    AxisMismatch { steps: usize, counts: usize },
    #[error("axis {0}: step must be positive")]
    NonPositiveStep(usize),
    #[error("axis {0}: count must be at least 1")]
    ZeroCount(usize),
    #[error("grid of {points} points exceeds the limit of {limit}")]
    TooLarge { points: String, limit: usize },
    #[error("grids are incompatible: {0}")]
    Incompatible(String),
    #[error("expected {expected} values, got {got}")]
    ValueCount { expected: usize, got: usize },
}

/// Axis steps `h_i > 0` and counts `M_i >= 1`; point `m` sits at `m_i * h_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    steps: Vec<BigRational>,
    counts: Vec<usize>,
    strides: Vec<usize>,
}

impl GridSpec {
    pub fn new(steps: Vec<BigRational>, counts: Vec<usize>) -> Result<Self, GridError> {
        if steps.is_empty() {
            return Err(GridError::NoAxes);
        }
        if steps.len() != counts.len() {
            return Err(GridError::AxisMismatch {
                steps: steps.len(),
                counts: counts.len(),
            });
        }
        if let Some(i) = steps.iter().position(|h| !h.is_positive()) {
            return Err(GridError::NonPositiveStep(i));
        }
        if let Some(i) = counts.iter().position(|&m| m == 0) {
            return Err(GridError::ZeroCount(i));
        }
        let mut strides = vec![1usize; counts.len()];
        for i in (0..counts.len().saturating_sub(1)).rev() {
            strides[i] =
                strides[i + 1]
                    .checked_mul(counts[i + 1] + 1)
                    .ok_or(GridError::TooLarge {
                        points: "overflow".into(),
                        limit: usize::MAX,
                    })?;
        }
        strides[0]
            .checked_mul(counts[0] + 1)
            .ok_or(GridError::TooLarge {
                points: "overflow".into(),
                limit: usize::MAX,
            })?;
        Ok(GridSpec {
            steps,
            counts,
            strides,
        })
    }

    /// Same step and count on every axis.
    pub fn uniform(arity: usize, step: BigRational, count: usize) -> Result<Self, GridError> {
        GridSpec::new(vec![step; arity], vec![count; arity])
    }

    /// Integer-ratio step convenience: `h = num / den`.
    pub fn with_ratio(
        arity: usize,
        (num, den): (i64, i64),
        count: usize,
    ) -> Result<Self, GridError> {
        GridSpec::uniform(
            arity,
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            count,
        )
    }

    pub fn arity(&self) -> usize {
        self.counts.len()
    }

    pub fn steps(&self) -> &[BigRational] {
        &self.steps
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Total number of points, `prod(M_i + 1)`.
    pub fn len(&self) -> usize {
        self.strides[0] * (self.counts[0] + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn unflat(&self, mut flat: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|s| {
                let i = flat / s;
                flat %= s;
                i
            })
            .collect()
    }

    pub fn contains(&self, idx: &[usize]) -> bool {
        idx.len() == self.arity() && idx.iter().zip(&self.counts).all(|(i, m)| i <= m)
    }

    /// Coordinates `m_i * h_i` of a multi-index.
    pub fn point_of<T: Scalar>(&self, idx: &[usize]) -> Vec<T> {
        idx.iter()
            .zip(&self.steps)
            .map(|(&i, h)| coordinate::<T>(i, h))
            .collect()
    }

    /// Largest step over all axes.
    pub fn max_step(&self) -> &BigRational {
        self.steps.iter().max().expect("at least one axis")
    }

    /// Halves every step and doubles every count.
    pub fn refine(&self, limits: &Limits) -> Result<GridSpec, GridError> {
        let counts: Option<Vec<usize>> = self.counts.iter().map(|m| m.checked_mul(2)).collect();
        let counts = counts.ok_or(GridError::TooLarge {
            points: "overflow".into(),
            limit: limits.max_points,
        })?;
        let points = counts
            .iter()
            .try_fold(1usize, |acc, m| acc.checked_mul(m + 1));
        match points {
            Some(p) if p <= limits.max_points => {}
            Some(p) => {
                return Err(GridError::TooLarge {
                    points: p.to_string(),
                    limit: limits.max_points,
                })
            }
            None => {
                return Err(GridError::TooLarge {
                    points: "overflow".into(),
                    limit: limits.max_points,
                })
            }
        }
        let two = BigRational::from_integer(BigInt::from(2));
        GridSpec::new(self.steps.iter().map(|h| h / &two).collect(), counts)
    }

    pub fn check_size(&self, limits: &Limits) -> Result<(), GridError> {
        if self.len() > limits.max_points {
            Err(GridError::TooLarge {
                points: self.len().to_string(),
                limit: limits.max_points,
            })
        } else {
            Ok(())
        }
    }

    /// Per-axis integer factor `r_i` with `self.h_i = r_i * finer.h_i`, if
    /// every point of `self` is a point of `finer`.
    pub fn embedding_into(&self, finer: &GridSpec) -> Result<Vec<usize>, GridError> {
        if self.arity() != finer.arity() {
            return Err(GridError::Incompatible(format!(
                "arity {} vs {}",
                self.arity(),
                finer.arity()
            )));
        }
        (0..self.arity())
            .map(|i| {
                let ratio = &self.steps[i] / &finer.steps[i];
                let r = ratio
                    .is_integer()
                    .then(|| ratio.to_integer().to_usize())
                    .flatten()
                    .ok_or_else(|| {
                        GridError::Incompatible(format!(
                            "axis {i}: step ratio {ratio} is not an integer"
                        ))
                    })?;
                if self.counts[i] * r > finer.counts[i] {
                    return Err(GridError::Incompatible(format!(
                        "axis {i}: box exceeds the finer grid"
                    )));
                }
                Ok(r)
            })
            .collect()
    }

    /// Iterates multi-indices in lexicographic (flat) order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len()).map(|f| self.unflat(f))
    }
}

/// `index * step` in the backend's arithmetic.
pub fn coordinate<T: Scalar>(index: usize, step: &BigRational) -> T {
    T::from_usize(index) * T::from_rational(step)
}

/// Dense grid function with one [`ExtValue`] per grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn<T> {
    spec: GridSpec,
    values: Vec<ExtValue<T>>,
}

/// Why a grid function is not an aggregation function.
#[derive(Clone, Debug, PartialEq)]
pub enum AggregationViolation<T> {
    NonZeroOrigin(ExtValue<T>),
    /// `values[to] < values[from]` with `to = from + e_axis`.
    Decrease {
        from: Vec<usize>,
        to: Vec<usize>,
        axis: usize,
    },
}

impl<T: Scalar> GridFn<T> {
    pub fn new(spec: GridSpec, values: Vec<ExtValue<T>>) -> Result<Self, GridError> {
        if values.len() != spec.len() {
            return Err(GridError::ValueCount {
                expected: spec.len(),
                got: values.len(),
            });
        }
        Ok(GridFn { spec, values })
    }

    pub fn from_finite(spec: GridSpec, values: Vec<T>) -> Result<Self, GridError> {
        GridFn::new(spec, values.into_iter().map(ExtValue::Finite).collect())
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[ExtValue<T>] {
        &self.values
    }

    pub fn get(&self, idx: &[usize]) -> &ExtValue<T> {
        &self.values[self.spec.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: ExtValue<T>) {
        let f = self.spec.flat(idx);
        self.values[f] = v;
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> GridFn<U> {
        GridFn {
            spec: self.spec.clone(),
            values: self
                .values
                .iter()
                .map(|v| match v {
                    ExtValue::Finite(x) => ExtValue::Finite(f(x)),
                    ExtValue::Infinite => ExtValue::Infinite,
                })
                .collect(),
        }
    }

    /// Largest finite magnitude, used to scale tolerances.
    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .filter_map(ExtValue::finite)
            .fold(T::zero(), |acc, v| T::max_of(acc, v.abs()))
    }

    /// Value at the far corner `(M_1, ..., M_n)`.
    pub fn corner(&self) -> &ExtValue<T> {
        self.values.last().expect("grids are non-empty")
    }

    /// First violation of `a[0] = 0` and coordinatewise monotonicity, in
    /// lexicographic order.
    pub fn aggregation_violation(&self) -> Option<AggregationViolation<T>> {
        if self.values[0] != ExtValue::zero() {
            return Some(AggregationViolation::NonZeroOrigin(self.values[0].clone()));
        }
        let n = self.spec.arity();
        for (f, v) in self.values.iter().enumerate() {
            let idx = self.spec.unflat(f);
            for axis in 0..n {
                if idx[axis] < self.spec.counts[axis] {
                    let g = f + self.spec.strides[axis];
                    if self.values[g] < *v {
                        let mut to = idx.clone();
                        to[axis] += 1;
                        return Some(AggregationViolation::Decrease {
                            from: idx,
                            to,
                            axis,
                        });
                    }
                }
            }
        }
        None
    }

    /// Restriction to the points of a coarser grid embedded in this one.
    pub fn restrict_to(&self, coarse: &GridSpec) -> Result<GridFn<T>, GridError> {
        let factors = coarse.embedding_into(&self.spec)?;
        let values = coarse
            .indices()
            .map(|idx| {
                let fine: Vec<usize> = idx.iter().zip(&factors).map(|(i, r)| i * r).collect();
                self.get(&fine).clone()
            })
            .collect();
        GridFn::new(coarse.clone(), values)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SampleError {
    #[error("function arity {function} does not match grid arity {grid}")]
    ArityMismatch { function: usize, grid: usize },
    #[error("evaluation failed at {point:?}: {source}")]
    Eval {
        point: Vec<String>,
        source: EvalError,
    },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Samples `f` at every grid point.
pub fn sample<T: Scalar, F: PointFn + Sync + ?Sized>(
    f: &F,
    spec: &GridSpec,
) -> Result<GridFn<T>, SampleError> {
    if f.arity() != spec.arity() {
        return Err(SampleError::ArityMismatch {
            function: f.arity(),
            grid: spec.arity(),
        });
    }
    let values: Result<Vec<_>, _> = (0..spec.len())
        .into_par_iter()
        .map(|flat| {
            let point = spec.point_of::<T>(&spec.unflat(flat));
            f.eval(&point)
                .map(ExtValue::Finite)
                .map_err(|source| SampleError::Eval {
                    point: point.iter().map(|p| p.to_string()).collect(),
                    source,
                })
        })
        .collect();
    Ok(GridFn::new(spec.clone(), values?)?)
}

/// Maximum of `|a - b|` over the points of `a`, which must all be points of `b`.
///
/// Infinite on one side only gives `inf`; infinite on both sides counts as 0.
pub fn max_abs_diff<T: Scalar>(a: &GridFn<T>, b: &GridFn<T>) -> Result<ExtValue<T>, GridError> {
    let b = b.restrict_to(a.spec())?;
    let mut worst = ExtValue::zero();
    for (x, y) in a.values.iter().zip(&b.values) {
        let d = match (x, y) {
            (ExtValue::Finite(x), ExtValue::Finite(y)) => {
                ExtValue::Finite((x.clone() - y.clone()).abs())
            }
            (ExtValue::Infinite, ExtValue::Infinite) => ExtValue::zero(),
            _ => ExtValue::Infinite,
        };
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}
