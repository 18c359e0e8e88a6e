use rayon::prelude::*;
use serde::Serialize;

use super::{CheckReport, Property, Scan, Tolerance, WitnessKind};
use crate::grid::{coordinate, ExtValue, GridError, GridFn};
use crate::scalar::Scalar;

/// Direction for [`check_ratio_monotone`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ray {
    /// Points `k e_i`, parameter `t = k h_i`.
    Axis(usize),
    /// Points `k (1, ..., 1)` in index space, parameter `t = k`.
    Diagonal,
}

fn one<T: Scalar>() -> T {
    T::from_usize(1)
}

fn origin_visit<T: Scalar>(scan: &mut Scan<'_, T>, a: &GridFn<T>) {
    let v = &a.values()[0];
    let c = match v {
        ExtValue::Finite(x) if x.is_negative() => -one::<T>(),
        _ => one(),
    };
    scan.visit(WitnessKind::Point, &[0], &[v], &[c], &T::zero(), false);
}

/// `|a[0]| <= tau`.
pub fn check_zero_origin<T: Scalar>(a: &GridFn<T>, tol: Tolerance) -> CheckReport<T> {
    let tau = tol.resolve(&a.max_abs());
    let mut scan = Scan::new(&tau, false);
    origin_visit(&mut scan, a);
    scan.finish(Property::ZeroOrigin, a)
}

/// Zero at the origin and non-decreasing along every axis step.
pub fn check_aggregation<T: Scalar>(a: &GridFn<T>, tol: Tolerance) -> CheckReport<T> {
    let spec = a.spec();
    let tau = tol.resolve(&a.max_abs());
    let coefficients = [one::<T>(), -one::<T>()];
    let zero = T::zero();
    let values = a.values();
    let mut scan = (0..spec.len())
        .into_par_iter()
        .fold(
            || Scan::new(&tau, false),
            |mut scan, m| {
                let idx = spec.unflat(m);
                for (axis, s) in spec.strides().iter().enumerate() {
                    if idx[axis] < spec.counts()[axis] {
                        let to = m + s;
                        scan.visit(
                            WitnessKind::AxisPair,
                            &[m, to],
                            &[&values[m], &values[to]],
                            &coefficients,
                            &zero,
                            false,
                        );
                    }
                }
                scan
            },
        )
        .reduce(|| Scan::new(&tau, false), Scan::merge);
    origin_visit(&mut scan, a);
    scan.finish(Property::Aggregation, a)
}

/// Fits `grad_i = a[e_i] / h_i` and requires `|a[m] - grad . x(m)| <= tau`
/// at every point. The fitted gradient is reported when finite.
pub fn check_linear<T: Scalar>(a: &GridFn<T>, tol: Tolerance) -> CheckReport<T> {
    let spec = a.spec();
    let tau = tol.resolve(&a.max_abs());
    let values = a.values();
    let gradient: Option<Vec<T>> = spec
        .strides()
        .iter()
        .zip(spec.steps())
        .map(|(s, h)| values[*s].finite().map(|v| v.clone() / T::from_rational(h)))
        .collect();
    let Some(grad) = gradient else {
        let mut scan = Scan::new(&tau, false);
        for s in spec.strides() {
            if values[*s].is_infinite() {
                scan.visit(
                    WitnessKind::Point,
                    &[*s],
                    &[&values[*s]],
                    &[one()],
                    &T::zero(),
                    true,
                );
            }
        }
        return scan.finish(Property::Linear, a);
    };
    let scan = (0..spec.len())
        .into_par_iter()
        .fold(
            || Scan::new(&tau, false),
            |mut scan, m| {
                let idx = spec.unflat(m);
                let fit = idx
                    .iter()
                    .zip(spec.steps())
                    .zip(&grad)
                    .fold(T::zero(), |acc, ((i, h), g)| {
                        acc + g.clone() * coordinate::<T>(*i, h)
                    });
                let above = match &values[m] {
                    ExtValue::Finite(v) => *v >= fit,
                    ExtValue::Infinite => true,
                };
                let (c, offset) = if above {
                    (one(), -fit)
                } else {
                    (-one::<T>(), fit)
                };
                scan.visit(WitnessKind::Point, &[m], &[&values[m]], &[c], &offset, true);
                scan
            },
        )
        .reduce(|| Scan::new(&tau, false), Scan::merge);
    let mut report = scan.finish(Property::Linear, a);
    report.gradient = Some(grad);
    report
}

/// `a[p_k] / t_k` is non-decreasing (strict: increasing) along the ray.
/// A nonzero origin value is reported as a point witness.
pub fn check_ratio_monotone<T: Scalar>(
    a: &GridFn<T>,
    ray: Ray,
    strict: bool,
    tol: Tolerance,
) -> CheckReport<T> {
    let spec = a.spec();
    let tau = tol.resolve(&a.max_abs());
    let mut scan = Scan::new(&tau, strict);
    let values = a.values();
    let (stride, steps, step): (usize, usize, T) = match ray {
        Ray::Axis(i) => (
            spec.strides()[i],
            spec.counts()[i],
            T::from_rational(&spec.steps()[i]),
        ),
        Ray::Diagonal => (
            spec.strides().iter().sum(),
            *spec.counts().iter().min().expect("at least one axis"),
            one(),
        ),
    };
    let mut report = if values[0] != ExtValue::zero() {
        origin_visit(&mut scan, a);
        let mut r = scan.finish(Property::RatioMonotone, a);
        r.notes
            .push("ratio undefined: nonzero value at the origin".to_string());
        r
    } else {
        for k in 1..steps {
            let (p, q) = (k * stride, (k + 1) * stride);
            let tp = T::from_usize(k) * step.clone();
            let tq = T::from_usize(k + 1) * step.clone();
            scan.visit(
                WitnessKind::RayPair,
                &[p, q],
                &[&values[p], &values[q]],
                &[one::<T>() / tp, -(one::<T>() / tq)],
                &T::zero(),
                true,
            );
        }
        scan.finish(Property::RatioMonotone, a)
    };
    report.notes.push(match ray {
        Ray::Axis(i) => format!("ray along axis {i}"),
        Ray::Diagonal => "ray along the index diagonal".to_string(),
    });
    report
}

/// `a[(p + q) / 2] <= (a[p] + a[q]) / 2` for every pair `p < q` whose
/// midpoint is a grid point (strict: `<` by more than tau).
pub fn check_midpoint_convex<T: Scalar>(
    a: &GridFn<T>,
    strict: bool,
    tol: Tolerance,
) -> CheckReport<T> {
    let spec = a.spec();
    let tau = tol.resolve(&a.max_abs());
    let half = one::<T>() / T::from_usize(2);
    let coefficients = [-half.clone(), -half, one()];
    let zero = T::zero();
    let values = a.values();
    let indices: Vec<Vec<usize>> = spec.indices().collect();
    let scan = (0..spec.len())
        .into_par_iter()
        .fold(
            || Scan::new(&tau, strict),
            |mut scan, p| {
                for q in p + 1..spec.len() {
                    if indices[p]
                        .iter()
                        .zip(&indices[q])
                        .any(|(x, y)| (x + y) % 2 != 0)
                    {
                        continue;
                    }
                    let mid = (p + q) / 2;
                    scan.visit(
                        WitnessKind::Segment,
                        &[p, q, mid],
                        &[&values[p], &values[q], &values[mid]],
                        &coefficients,
                        &zero,
                        true,
                    );
                }
                scan
            },
        )
        .reduce(|| Scan::new(&tau, strict), Scan::merge);
    scan.finish(Property::MidpointConvex, a)
}

/// `f <= g + tau` pointwise on a common grid. The margin is taken over
/// nonzero points.
pub fn check_dominated<T: Scalar>(
    f: &GridFn<T>,
    g: &GridFn<T>,
    tol: Tolerance,
) -> Result<CheckReport<T>, GridError> {
    if f.spec() != g.spec() {
        return Err(GridError::Incompatible(
            "dominance needs a common grid".to_string(),
        ));
    }
    let tau = tol.resolve(&T::max_of(f.max_abs(), g.max_abs()));
    let coefficients = [one::<T>(), -one::<T>()];
    let zero = T::zero();
    let mut scan = Scan::new(&tau, false);
    for (p, (x, y)) in f.values().iter().zip(g.values()).enumerate() {
        scan.visit(
            WitnessKind::Point,
            &[p, p],
            &[x, y],
            &coefficients,
            &zero,
            p != 0,
        );
    }
    Ok(scan.finish(Property::Dominated, f))
}
