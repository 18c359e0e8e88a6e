use rayon::prelude::*;

use super::{CheckReport, Property, Scan, Tolerance, WitnessKind};
use crate::grid::GridFn;
use crate::scalar::Scalar;

/// `a[p] + a[q] <= a[p + q]` for every pair with `p + q` on the grid.
///
/// The strict variant requires `a[p] + a[q] < a[p + q] - tau` for nonzero
/// `p, q`, and on one axis only for `p != q`.
pub fn check_superadditive<T: Scalar>(
    a: &GridFn<T>,
    strict: bool,
    tol: Tolerance,
) -> CheckReport<T> {
    pair_scan(a, strict, tol, Property::Superadditive, 1)
}

/// `a[p + q] <= a[p] + a[q]` for every pair with `p + q` on the grid.
pub fn check_subadditive<T: Scalar>(a: &GridFn<T>, strict: bool, tol: Tolerance) -> CheckReport<T> {
    pair_scan(a, strict, tol, Property::Subadditive, -1)
}

fn pair_scan<T: Scalar>(
    a: &GridFn<T>,
    strict: bool,
    tol: Tolerance,
    property: Property,
    sign: i64,
) -> CheckReport<T> {
    let spec = a.spec();
    let tau = tol.resolve(&a.max_abs());
    let one = T::from_usize(1);
    let (pos, neg) = if sign > 0 {
        (one.clone(), -one)
    } else {
        (-one.clone(), one)
    };
    let coefficients = [pos.clone(), pos, neg];
    let zero = T::zero();
    let indices: Vec<Vec<usize>> = spec.indices().collect();
    let counts = spec.counts();
    let one_axis = spec.arity() == 1;
    let values = a.values();
    let scan = (0..spec.len())
        .into_par_iter()
        .fold(
            || Scan::new(&tau, strict),
            |mut scan, p| {
                for q in p..spec.len() {
                    let fits = indices[p]
                        .iter()
                        .zip(&indices[q])
                        .zip(counts)
                        .all(|((x, y), m)| x + y <= *m);
                    if !fits {
                        continue;
                    }
                    let s = p + q;
                    let eligible = p != 0 && q != 0 && !(one_axis && p == q);
                    scan.visit(
                        WitnessKind::Pair,
                        &[p, q, s],
                        &[&values[p], &values[q], &values[s]],
                        &coefficients,
                        &zero,
                        eligible,
                    );
                }
                scan
            },
        )
        .reduce(|| Scan::new(&tau, strict), Scan::merge);
    scan.finish(property, a)
}
