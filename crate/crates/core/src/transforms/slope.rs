use serde::Serialize;

use crate::funcspec::{EvalError, PointFn};
use crate::grid::{coordinate, ExtValue, GridSpec};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct SlopeOptions {
    /// Number of steps evaluated per axis: the base step and its halvings.
    pub levels: usize,
    /// When set, the ratio trace must not increase as the step halves.
    pub declared_convex: bool,
    /// Ratio growth per halving that, sustained over the last two halvings,
    /// marks the axis unbounded.
    pub growth: f64,
}

impl Default for SlopeOptions {
    fn default() -> Self {
        SlopeOptions {
            levels: 4,
            declared_convex: false,
            growth: 1.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeSample<T> {
    pub step: T,
    pub ratio: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct AxisSlope<T> {
    pub axis: usize,
    /// Finest ratio, or infinite when the axis is flagged unbounded.
    pub estimate: ExtValue<T>,
    pub trace: Vec<SlopeSample<T>>,
    pub unbounded: bool,
    /// Ratios never increased (beyond rounding) as the step halved.
    pub non_increasing: bool,
}

/// Estimates of `lim_{t -> 0+} A(t e_i) / t` per axis.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SlopeEstimate<T> {
    pub axes: Vec<AxisSlope<T>>,
}

impl<T: Scalar> SlopeEstimate<T> {
    /// The estimated gradient, if every axis is bounded.
    pub fn gradient(&self) -> Option<Vec<T>> {
        self.axes
            .iter()
            .map(|a| a.estimate.finite().cloned())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SlopeError {
    #[error("at least one level is required")]
    NoLevels,
    #[error("function does not vanish at the origin")]
    NonZeroOrigin,
    #[error("evaluation failed on axis {axis}: {source}")]
    Eval { axis: usize, source: EvalError },
    #[error("axis {axis}: ratio increased at step {step} although convexity was declared")]
    NotMonotone { axis: usize, step: String },
}

/// Evaluates `A(h e_i) / h` for the base step of each axis and
/// `levels - 1` halvings of it.
pub fn axis_slope_estimate<T: Scalar, F: PointFn + ?Sized>(
    f: &F,
    spec: &GridSpec,
    opts: &SlopeOptions,
) -> Result<SlopeEstimate<T>, SlopeError> {
    if opts.levels == 0 {
        return Err(SlopeError::NoLevels);
    }
    let n = spec.arity();
    let origin = vec![T::zero(); n];
    let at_origin = f
        .eval(&origin)
        .map_err(|source| SlopeError::Eval { axis: 0, source })?;
    if !at_origin.is_zero() {
        return Err(SlopeError::NonZeroOrigin);
    }
    let two = T::from_usize(2);
    let axes = (0..n)
        .map(|axis| {
            let mut step: T = coordinate(1, &spec.steps()[axis]);
            let mut trace = Vec::with_capacity(opts.levels);
            for _ in 0..opts.levels {
                let mut point = origin.clone();
                point[axis] = step.clone();
                let v = f
                    .eval(&point)
                    .map_err(|source| SlopeError::Eval { axis, source })?;
                trace.push(SlopeSample {
                    ratio: v / step.clone(),
                    step: step.clone(),
                });
                step = step / two.clone();
            }
            let non_increasing = trace
                .windows(2)
                .all(|w| w[1].ratio <= w[0].ratio.clone() + T::default_tolerance(&w[0].ratio));
            if opts.declared_convex && !non_increasing {
                let bad = trace
                    .windows(2)
                    .find(|w| w[1].ratio > w[0].ratio.clone() + T::default_tolerance(&w[0].ratio))
                    .expect("violation exists");
                return Err(SlopeError::NotMonotone {
                    axis,
                    step: bad[1].step.to_string(),
                });
            }
            let growths: Vec<f64> = trace
                .windows(2)
                .map(|w| {
                    let (a, b) = (w[0].ratio.to_f64(), w[1].ratio.to_f64());
                    if a > 0.0 {
                        b / a
                    } else if b > 0.0 {
                        f64::INFINITY
                    } else {
                        1.0
                    }
                })
                .collect();
            let unbounded = growths.len() >= 2
                && growths[growths.len() - 2..]
                    .iter()
                    .all(|g| *g >= opts.growth);
            let estimate = if unbounded {
                ExtValue::Infinite
            } else {
                ExtValue::Finite(trace.last().expect("levels >= 1").ratio.clone())
            };
            Ok(AxisSlope {
                axis,
                estimate,
                trace,
                unbounded,
                non_increasing,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SlopeEstimate { axes })
}
