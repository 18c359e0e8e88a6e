use num_rational::BigRational;
use serde::Serialize;

use super::{Consequence, NamedCheck, Scenario, TheoremError, TheoremReport};
use crate::funcspec::FuncSpec;
use crate::grid::{coordinate, max_abs_diff, sample, ExtValue, GridFn, GridSpec, Slack};
use crate::props::{check_directionally_concave, check_directionally_convex, Tolerance};
use crate::scalar::Scalar;
use crate::transforms::{
    axis_slope_estimate, subadditive_closure, superadditive_closure, transform_with_refinement,
    Kind, RefinementConfig, SlopeOptions,
};

/// Extra halvings used when estimating the gradient at the origin, beyond
/// the finest refinement level.
const SLOPE_DEPTH: usize = 30;

/// Checks that a transform which is strictly directionally convex (for the
/// super transform) or strictly directionally concave (for the sub
/// transform) coincides with the input on the grid.
pub fn verify_fixed_point<T: Scalar>(
    f: &FuncSpec,
    spec: &GridSpec,
    tol: Tolerance,
) -> Result<TheoremReport<T>, TheoremError> {
    let a: GridFn<T> = sample(f, spec)?;
    let upper = superadditive_closure(&a)?;
    let lower = subadditive_closure(&a)?;
    let mut report = TheoremReport::new(Scenario::FixedPoint, f.to_string());

    let convex = NamedCheck::holds(
        "super transform strictly directionally convex",
        check_directionally_convex(&upper, true, tol),
    );
    let scored = convex.satisfied;
    report.hypotheses.push(convex);
    report.consequences.push(deviation(
        "super transform equals input",
        scored,
        &upper,
        &a,
        tol,
    )?);

    let concave = NamedCheck::holds(
        "sub transform strictly directionally concave",
        check_directionally_concave(&lower, true, tol),
    );
    let scored = concave.satisfied;
    report.hypotheses.push(concave);
    report.consequences.push(deviation(
        "sub transform equals input",
        scored,
        &lower,
        &a,
        tol,
    )?);
    report
        .notes
        .push("the concave branch is stated for the sub transform".to_string());
    Ok(report.conclude())
}

fn deviation<T: Scalar>(
    name: &str,
    scored: bool,
    b: &GridFn<T>,
    a: &GridFn<T>,
    tol: Tolerance,
) -> Result<Consequence<T>, TheoremError> {
    let tau = tol.resolve(&T::max_of(a.max_abs(), b.max_abs()));
    let d = max_abs_diff(b, a)?;
    let measured = match d {
        ExtValue::Finite(v) => Slack::Finite(v),
        ExtValue::Infinite => Slack::PlusInfinity,
    };
    Ok(Consequence::at_most(
        name,
        scored,
        measured,
        Slack::Finite(tau),
    ))
}

/// Gradient, slope constant and per-level gaps behind the linear-dual check.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct LinearDualDetail<T> {
    pub gradient: Option<Vec<T>>,
    /// Largest step on each level.
    pub steps: Vec<T>,
    /// `max_x (C(x) - grad . x)` on each level.
    pub gaps: Vec<Slack<T>>,
    /// `K` with `gap_0 = K h_0`.
    pub k: Option<T>,
    /// `gap_l / gap_{l-1}`, when the previous gap exceeds the tolerance.
    pub ratios: Vec<Option<f64>>,
}

/// Checks `grad . x <= C(x) <= grad . x + K h` for the sub transform on
/// `levels` refinements of `spec`, with the gap roughly halving per level.
/// Scored only when the super transform on the base grid is strictly
/// directionally convex.
pub fn verify_linear_dual<T: Scalar>(
    f: &FuncSpec,
    spec: &GridSpec,
    levels: usize,
    tol: Tolerance,
) -> Result<TheoremReport<T>, TheoremError> {
    let a: GridFn<T> = sample(f, spec)?;
    let upper = superadditive_closure(&a)?;
    let convex = NamedCheck::holds(
        "super transform strictly directionally convex",
        check_directionally_convex(&upper, true, tol),
    );
    let scored = convex.satisfied;
    let mut report = TheoremReport::new(Scenario::LinearDual, f.to_string());
    report.hypotheses.push(convex);

    let slope = axis_slope_estimate::<T, _>(
        f,
        spec,
        &SlopeOptions {
            levels: levels + SLOPE_DEPTH,
            ..Default::default()
        },
    )?;
    let gradient = slope.gradient();
    let result = transform_with_refinement::<T, _>(
        f,
        spec,
        Kind::Sub,
        &RefinementConfig::with_levels(levels),
    )?;
    let mut detail = LinearDualDetail {
        gradient: gradient.clone(),
        steps: Vec::new(),
        gaps: Vec::new(),
        k: None,
        ratios: Vec::new(),
    };
    let Some(grad) = gradient else {
        report
            .notes
            .push("gradient at the origin is unbounded".to_string());
        report.linear_dual = Some(detail);
        return Ok(report.conclude());
    };

    for (l, level) in result.levels.iter().enumerate() {
        let c = &level.output;
        let tau = tol.resolve(&c.max_abs());
        let (below, gap) = gaps(c, &grad);
        let h = T::from_rational(level.spec.max_step());
        report.consequences.push(Consequence::at_most(
            format!("level {l}: gradient bound below"),
            scored,
            below,
            Slack::Finite(tau.clone()),
        ));
        if l == 0 {
            detail.k = gap.finite().map(|g| g.clone() / h.clone());
        } else {
            let k = detail.k.clone().map_or(Slack::PlusInfinity, Slack::Finite);
            let bound = match k {
                Slack::Finite(k) => Slack::Finite(k * h.clone() + tau.clone()),
                other => other,
            };
            report.consequences.push(Consequence::at_most(
                format!("level {l}: gap within K h"),
                scored,
                gap.clone(),
                bound,
            ));
            let prev = detail.gaps[l - 1].clone();
            if prev > Slack::Finite(tau.clone()) {
                let ratio = gap.to_f64() / prev.to_f64();
                detail.ratios.push(Some(ratio));
                report.consequences.push(Consequence {
                    name: format!("level {l}: gap ratio in [0.4, 0.6]"),
                    scored,
                    holds: (0.4..=0.6).contains(&ratio),
                    measured: T::from_f64(ratio).map(Slack::Finite),
                    bound: None,
                    point: None,
                });
            } else {
                detail.ratios.push(None);
                report.consequences.push(Consequence::at_most(
                    format!("level {l}: gap stays within tolerance"),
                    scored,
                    gap.clone(),
                    Slack::Finite(tau.clone()),
                ));
            }
        }
        detail.steps.push(h);
        detail.gaps.push(gap);
    }
    report.linear_dual = Some(detail);
    Ok(report.conclude())
}

/// `(max (grad . x - C(x)), max (C(x) - grad . x))` over the grid.
fn gaps<T: Scalar>(c: &GridFn<T>, grad: &[T]) -> (Slack<T>, Slack<T>) {
    let spec = c.spec();
    let mut below = Slack::MinusInfinity;
    let mut above = Slack::MinusInfinity;
    for (flat, v) in c.values().iter().enumerate() {
        let idx = spec.unflat(flat);
        let fit = idx.iter().zip(spec.steps()).zip(grad).fold(
            T::zero(),
            |acc, ((i, h), g): ((&usize, &BigRational), &T)| {
                acc + g.clone() * coordinate::<T>(*i, h)
            },
        );
        let d = v.diff(&ExtValue::Finite(fit));
        if d.neg() > below {
            below = d.neg();
        }
        if d > above {
            above = d;
        }
    }
    (below, above)
}
