use serde_json::{json, Value};

use super::closure::{closure, ClosureError, Kind};
use super::slope::SlopeEstimate;
use crate::funcspec::PointFn;
use crate::grid::{
    max_abs_diff, sample, ExtValue, GridError, GridFn, GridSpec, Limits, SampleError,
};
use crate::scalar::{rational_to_literal, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct RefinementConfig {
    /// Total number of grids evaluated, the base grid included.
    pub levels: usize,
    /// Corner growth factor that, sustained over the last two refinements,
    /// flags divergence.
    pub divergence_growth: f64,
    pub limits: Limits,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        RefinementConfig {
            levels: 1,
            divergence_growth: 1.25,
            limits: Limits::default(),
        }
    }
}

impl RefinementConfig {
    pub fn with_levels(levels: usize) -> Self {
        RefinementConfig {
            levels,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransformError {
    #[error("at least one level is required")]
    NoLevels,
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureLevel<T> {
    pub spec: GridSpec,
    pub input: GridFn<T>,
    pub output: GridFn<T>,
}

/// Transform estimates over a sequence of refined grids.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureResult<T> {
    pub kind: Kind,
    pub levels: Vec<ClosureLevel<T>>,
    /// `max |B_l - B_{l-1}|` on the points of level `l - 1`.
    pub deltas: Vec<ExtValue<T>>,
    /// Transform value at the box corner on each level.
    pub corner_values: Vec<ExtValue<T>>,
    /// Ratio of consecutive corner values.
    pub growth_factors: Vec<f64>,
    pub divergence_flag: bool,
}

impl<T: Scalar> ClosureResult<T> {
    /// The finest-level transform.
    pub fn estimate(&self) -> &GridFn<T> {
        &self.levels.last().expect("at least one level").output
    }

    pub fn to_json(&self, slope: Option<&SlopeEstimate<T>>) -> Value {
        let levels: Vec<Value> = self
            .levels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                json!({
                    "level": i,
                    "steps": l.spec.steps().iter().map(rational_to_literal).collect::<Vec<_>>(),
                    "counts": l.spec.counts(),
                    "points": l.spec.len(),
                    "corner_value": self.corner_values[i],
                })
            })
            .collect();
        let mut doc = json!({
            "kind": self.kind,
            "exact": T::EXACT,
            "levels": levels,
            "deltas": self.deltas,
            "growth_factors": self.growth_factors.iter().map(|g| json_f64(*g)).collect::<Vec<_>>(),
            "divergence_flag": self.divergence_flag,
        });
        if let Some(s) = slope {
            doc["slope"] = serde_json::to_value(s).expect("serializable");
        }
        doc
    }
}

fn json_f64(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

/// Runs the closure on `base` and `config.levels - 1` successive refinements.
pub fn transform_with_refinement<T: Scalar, F: PointFn + Sync + ?Sized>(
    f: &F,
    base: &GridSpec,
    kind: Kind,
    config: &RefinementConfig,
) -> Result<ClosureResult<T>, TransformError> {
    if config.levels == 0 {
        return Err(TransformError::NoLevels);
    }
    base.check_size(&config.limits)?;
    let mut levels: Vec<ClosureLevel<T>> = Vec::with_capacity(config.levels);
    let mut spec = base.clone();
    for l in 0..config.levels {
        if l > 0 {
            spec = spec.refine(&config.limits)?;
        }
        let input: GridFn<T> = sample(f, &spec)?;
        let output = closure(&input, kind, &config.limits)?;
        levels.push(ClosureLevel {
            spec: spec.clone(),
            input,
            output,
        });
    }
    let deltas = levels
        .windows(2)
        .map(|w| max_abs_diff(&w[0].output, &w[1].output))
        .collect::<Result<Vec<_>, _>>()?;
    let corner_values: Vec<ExtValue<T>> =
        levels.iter().map(|l| l.output.corner().clone()).collect();
    let growth_factors: Vec<f64> = corner_values
        .windows(2)
        .map(|w| growth(&w[0], &w[1]))
        .collect();
    let divergence_flag = growth_factors.len() >= 2
        && growth_factors[growth_factors.len() - 2..]
            .iter()
            .all(|g| *g >= config.divergence_growth);
    Ok(ClosureResult {
        kind,
        levels,
        deltas,
        corner_values,
        growth_factors,
        divergence_flag,
    })
}

fn growth<T: Scalar>(prev: &ExtValue<T>, cur: &ExtValue<T>) -> f64 {
    match (prev, cur) {
        (ExtValue::Infinite, _) => 1.0,
        (_, ExtValue::Infinite) => f64::INFINITY,
        (ExtValue::Finite(p), ExtValue::Finite(c)) => {
            let (p, c) = (p.to_f64(), c.to_f64());
            if p == 0.0 {
                if c == 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            } else {
                c / p
            }
        }
    }
}
