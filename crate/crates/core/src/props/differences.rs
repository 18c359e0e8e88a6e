use rayon::prelude::*;

use super::{conjunction, CheckReport, Property, Scan, Tolerance, WitnessKind};
use crate::grid::{GridFn, GridSpec};
use crate::scalar::Scalar;

/// Directional convexity is cross-validated by a direct quadruple scan on
/// grids with at most this many nontrivial quadruples.
pub const CROSS_VALIDATION_LIMIT: usize = 5000;

/// Sign of the second differences being checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Curvature {
    Convex,
    Concave,
}

impl Curvature {
    /// Coefficients on `(u, v, x, y)` giving the violation of
    /// `a[x] + a[y] <= a[u] + a[v]` (convex) or its reverse (concave).
    fn coefficients<T: Scalar>(self) -> [T; 4] {
        let one = T::from_usize(1);
        let (outer, inner) = match self {
            Curvature::Convex => (-one.clone(), one),
            Curvature::Concave => (one.clone(), -one),
        };
        [outer.clone(), outer, inner.clone(), inner]
    }
}

/// Every axis second difference `a[m + 2e_i] - 2a[m + e_i] + a[m]` is
/// `>= -tau` (strict: `> tau`).
pub fn check_coordinatewise_convex<T: Scalar>(
    a: &GridFn<T>,
    strict: bool,
    tol: Tolerance,
) -> CheckReport<T> {
    axis_differences(a, strict, tol, Curvature::Convex)
}

pub fn check_coordinatewise_concave<T: Scalar>(
    a: &GridFn<T>,
    strict: bool,
    tol: Tolerance,
) -> CheckReport<T> {
    axis_differences(a, strict, tol, Curvature::Concave)
}

/// Every mixed difference `a[m + e_i + e_j] - a[m + e_i] - a[m + e_j] + a[m]`
/// with `i != j` is `>= -tau` (strict: `> tau`).
pub fn check_supermodular<T: Scalar>(
    a: &GridFn<T>,
    strict: bool,
    tol: Tolerance,
) -> CheckReport<T> {
    mixed_differences(a, strict, tol, Curvature::Convex)
}

pub fn check_submodular<T: Scalar>(a: &GridFn<T>, strict: bool, tol: Tolerance) -> CheckReport<T> {
    mixed_differences(a, strict, tol, Curvature::Concave)
}

/// Coordinatewise convexity together with supermodularity.
pub fn check_directionally_convex<T: Scalar>(
    a: &GridFn<T>,
    strict: bool,
    tol: Tolerance,
) -> CheckReport<T> {
    directional(a, strict, tol, Curvature::Convex)
}

/// Coordinatewise concavity together with submodularity.
pub fn check_directionally_concave<T: Scalar>(
    a: &GridFn<T>,
    strict: bool,
    tol: Tolerance,
) -> CheckReport<T> {
    directional(a, strict, tol, Curvature::Concave)
}

fn directional<T: Scalar>(
    a: &GridFn<T>,
    strict: bool,
    tol: Tolerance,
    curvature: Curvature,
) -> CheckReport<T> {
    let property = match curvature {
        Curvature::Convex => Property::DirectionallyConvex,
        Curvature::Concave => Property::DirectionallyConcave,
    };
    let mut report = conjunction(
        property,
        axis_differences(a, strict, tol, curvature),
        mixed_differences(a, strict, tol, curvature),
    );
    if quadruple_count(a.spec(), CROSS_VALIDATION_LIMIT).is_some() {
        let direct = quadruple_scan(a, strict, tol, curvature);
        report.cross_validated = Some(direct.verdict == report.verdict);
    }
    report
}

fn axis_differences<T: Scalar>(
    a: &GridFn<T>,
    strict: bool,
    tol: Tolerance,
    curvature: Curvature,
) -> CheckReport<T> {
    let property = match curvature {
        Curvature::Convex => Property::CoordinatewiseConvex,
        Curvature::Concave => Property::CoordinatewiseConcave,
    };
    let spec = a.spec();
    let tau = tol.resolve(&a.max_abs());
    let coefficients = curvature.coefficients::<T>();
    let zero = T::zero();
    let values = a.values();
    let scan = (0..spec.len())
        .into_par_iter()
        .fold(
            || Scan::new(&tau, strict),
            |mut scan, m| {
                let idx = spec.unflat(m);
                for (axis, s) in spec.strides().iter().enumerate() {
                    if idx[axis] + 2 <= spec.counts()[axis] {
                        let (x, v) = (m + s, m + 2 * s);
                        scan.visit(
                            WitnessKind::Quadruple,
                            &[m, v, x, x],
                            &[&values[m], &values[v], &values[x], &values[x]],
                            &coefficients,
                            &zero,
                            true,
                        );
                    }
                }
                scan
            },
        )
        .reduce(|| Scan::new(&tau, strict), Scan::merge);
    let mut report = scan.finish(property, a);
    for (axis, m) in spec.counts().iter().enumerate() {
        if *m < 2 {
            report.notes.push(format!(
                "axis {axis} has fewer than two steps; no second differences evaluated"
            ));
        }
    }
    report
}

fn mixed_differences<T: Scalar>(
    a: &GridFn<T>,
    strict: bool,
    tol: Tolerance,
    curvature: Curvature,
) -> CheckReport<T> {
    let property = match curvature {
        Curvature::Convex => Property::Supermodular,
        Curvature::Concave => Property::Submodular,
    };
    let spec = a.spec();
    let n = spec.arity();
    let tau = tol.resolve(&a.max_abs());
    let coefficients = curvature.coefficients::<T>();
    let zero = T::zero();
    let values = a.values();
    let strides = spec.strides();
    let scan = (0..spec.len())
        .into_par_iter()
        .fold(
            || Scan::new(&tau, strict),
            |mut scan, m| {
                let idx = spec.unflat(m);
                for i in 0..n {
                    for j in i + 1..n {
                        if idx[i] < spec.counts()[i] && idx[j] < spec.counts()[j] {
                            let (x, y) = (m + strides[i], m + strides[j]);
                            let v = x + strides[j];
                            scan.visit(
                                WitnessKind::Quadruple,
                                &[m, v, x, y],
                                &[&values[m], &values[v], &values[x], &values[y]],
                                &coefficients,
                                &zero,
                                true,
                            );
                        }
                    }
                }
                scan
            },
        )
        .reduce(|| Scan::new(&tau, strict), Scan::merge);
    let mut report = scan.finish(property, a);
    if n == 1 {
        report
            .notes
            .push("one axis: no mixed differences, holds vacuously".to_string());
    }
    report
}

/// Calls `visit(u, x, y, v)` for every nontrivial quadruple
/// `x = u + p`, `y = u + q`, `v = u + p + q` with `p, q` nonzero and
/// `p <= q` in flat order. Stops early when `visit` returns `false`.
fn for_each_quadruple(spec: &GridSpec, mut visit: impl FnMut(usize, usize, usize, usize) -> bool) {
    let counts = spec.counts();
    let indices: Vec<Vec<usize>> = spec.indices().collect();
    let fits =
        |a: &[usize], b: &[usize]| a.iter().zip(b).zip(counts).all(|((x, y), m)| x + y <= *m);
    for u in 0..spec.len() {
        for p in 1..spec.len() {
            if !fits(&indices[u], &indices[p]) {
                continue;
            }
            let x = u + p;
            for q in p..spec.len() {
                if !fits(&indices[x], &indices[q]) {
                    continue;
                }
                if !visit(u, x, u + q, x + q) {
                    return;
                }
            }
        }
    }
}

/// Number of nontrivial quadruples `u <= x, y <= v`, `u + v = x + y`,
/// `{x, y} != {u, v}`, counted up to symmetry; `None` if it exceeds `cap`.
pub fn quadruple_count(spec: &GridSpec, cap: usize) -> Option<usize> {
    let mut count = 0usize;
    let mut over = false;
    for_each_quadruple(spec, |_, _, _, _| {
        count += 1;
        over = count > cap;
        !over
    });
    (!over).then_some(count)
}

/// Directional convexity (or concavity) checked on every nontrivial
/// quadruple directly.
pub fn quadruple_scan<T: Scalar>(
    a: &GridFn<T>,
    strict: bool,
    tol: Tolerance,
    curvature: Curvature,
) -> CheckReport<T> {
    let property = match curvature {
        Curvature::Convex => Property::DirectionallyConvex,
        Curvature::Concave => Property::DirectionallyConcave,
    };
    let tau = tol.resolve(&a.max_abs());
    let coefficients = curvature.coefficients::<T>();
    let zero = T::zero();
    let values = a.values();
    let mut scan = Scan::new(&tau, strict);
    for_each_quadruple(a.spec(), |u, x, y, v| {
        scan.visit(
            WitnessKind::Quadruple,
            &[u, v, x, y],
            &[&values[u], &values[v], &values[x], &values[y]],
            &coefficients,
            &zero,
            true,
        );
        true
    });
    scan.finish(property, a)
}
