use num_rational::BigRational;

use super::{Consequence, Scenario, TheoremError, TheoremReport};
use crate::funcspec::{catalog_get, FuncSpec, Params, PointFn};
use crate::grid::{sample, ExtValue, GridFn, GridSpec};
use crate::props::{
    check_coordinatewise_convex, check_directionally_concave, check_directionally_convex,
    check_midpoint_convex, check_ratio_monotone, check_subadditive, check_superadditive,
    check_zero_origin, Ray, Tolerance,
};
use crate::scalar::Scalar;

/// Step and per-axis count of the grid used for the two separating examples.
pub const SEPARATION_GRID: ((i64, i64), usize) = ((1, 1), 4);

/// Implications between directional convexity, convexity, additivity and
/// ratio monotonicity, checked for each function on a uniform grid of its
/// arity, plus the two fixed separating examples.
pub fn lemma_suite<T: Scalar>(
    fns: &[(String, FuncSpec)],
    step: &BigRational,
    count: usize,
    tol: Tolerance,
) -> Result<TheoremReport<T>, TheoremError> {
    let mut report = TheoremReport::new(
        Scenario::Lemmas,
        fns.iter()
            .map(|(n, _)| n.as_str())
            .collect::<Vec<_>>()
            .join(", "),
    );
    for (name, f) in fns {
        let spec = GridSpec::uniform(f.arity(), step.clone(), count)?;
        let a: GridFn<T> = sample(f, &spec)?;
        implications(&mut report, name, &a, tol);
    }
    separations(&mut report, tol)?;
    Ok(report.conclude())
}

fn implications<T: Scalar>(
    report: &mut TheoremReport<T>,
    name: &str,
    a: &GridFn<T>,
    tol: Tolerance,
) {
    let convex = check_directionally_convex(a, false, tol).holds();
    let strictly_convex = check_directionally_convex(a, true, tol).holds();
    let concave = check_directionally_concave(a, false, tol).holds();
    let strictly_concave = check_directionally_concave(a, true, tol).holds();
    let c = &mut report.consequences;
    if a.spec().arity() == 1 {
        let midpoint = check_midpoint_convex(a, false, tol).holds();
        let strict_midpoint = check_midpoint_convex(a, true, tol).holds();
        c.push(Consequence::flag(
            format!("{name}: directional and midpoint convexity agree"),
            true,
            convex == midpoint,
        ));
        c.push(Consequence::flag(
            format!("{name}: strict directional and strict midpoint convexity agree"),
            true,
            strictly_convex == strict_midpoint,
        ));
    }
    if !check_zero_origin(a, tol).holds() {
        return;
    }
    if convex {
        c.push(Consequence::flag(
            format!("{name}: directionally convex implies super-additive"),
            true,
            check_superadditive(a, false, tol).holds(),
        ));
        let mut rays: Vec<Ray> = (0..a.spec().arity()).map(Ray::Axis).collect();
        rays.push(Ray::Diagonal);
        for ray in rays {
            let holds = check_ratio_monotone(a, ray, false, tol).holds();
            c.push(Consequence::flag(
                format!("{name}: directionally convex implies ratio monotone along {ray:?}"),
                true,
                holds,
            ));
        }
    }
    if strictly_convex {
        c.push(Consequence::flag(
            format!("{name}: strictly directionally convex implies strictly super-additive"),
            true,
            check_superadditive(a, true, tol).holds(),
        ));
    }
    if concave {
        c.push(Consequence::flag(
            format!("{name}: directionally concave implies sub-additive"),
            true,
            check_subadditive(a, false, tol).holds(),
        ));
    }
    if strictly_concave {
        c.push(Consequence::flag(
            format!("{name}: strictly directionally concave implies strictly sub-additive"),
            true,
            check_subadditive(a, true, tol).holds(),
        ));
    }
}

fn separations<T: Scalar>(
    report: &mut TheoremReport<T>,
    tol: Tolerance,
) -> Result<(), TheoremError> {
    let ((num, den), count) = SEPARATION_GRID;
    let spec = GridSpec::with_ratio(2, (num, den), count)?;
    let none = Params::default();
    let product: GridFn<T> = sample(&catalog_get("product_minus_one", &none, None)?, &spec)?;
    let skew: GridFn<T> = sample(&catalog_get("skew_quadratic", &none, None)?, &spec)?;
    let c = &mut report.consequences;

    c.push(Consequence::flag(
        "product_minus_one: directionally convex",
        true,
        check_directionally_convex(&product, false, tol).holds(),
    ));
    let midpoint = check_midpoint_convex(&product, false, tol);
    let anti_diagonal = midpoint.witness.as_ref().is_some_and(|w| {
        w.indices == [vec![0, 2], vec![2, 0], vec![1, 1]]
            && w.values[2] == ExtValue::Finite(T::from_usize(3))
            && w.values[0].clone() + w.values[1].clone() == ExtValue::Finite(T::from_usize(4))
    });
    c.push(Consequence::flag(
        "product_minus_one: midpoint convexity fails on the anti-diagonal, 3 > 2",
        true,
        anti_diagonal,
    ));

    c.push(Consequence::flag(
        "skew_quadratic: midpoint convex",
        true,
        check_midpoint_convex(&skew, false, tol).holds(),
    ));
    c.push(Consequence::flag(
        "skew_quadratic: coordinatewise convex",
        true,
        check_coordinatewise_convex(&skew, false, tol).holds(),
    ));
    let superadditive = check_superadditive(&skew, false, tol);
    let pair = superadditive.witness.as_ref().is_some_and(|w| {
        let mut p = w.indices[..2].to_vec();
        p.sort();
        p == [vec![0, 1], vec![1, 0]]
            && w.values[0].clone() + w.values[1].clone() == ExtValue::Finite(T::from_usize(6))
            && w.values[2] == ExtValue::Finite(T::from_usize(4))
    });
    c.push(Consequence::flag(
        "skew_quadratic: super-additivity fails at (1,0), (0,1), 6 > 4",
        true,
        pair,
    ));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspec::catalog::standard_entries;
    use crate::scalar::Exact;
    use crate::theorems::TheoremVerdict;
    use num_bigint::BigInt;

    #[test]
    fn catalog_is_consistent() {
        let fns: Vec<(String, FuncSpec)> = standard_entries()
            .into_iter()
            .map(|e| (e.name, e.body))
            .collect();
        let step = BigRational::new(BigInt::from(1), BigInt::from(2));
        let r = lemma_suite::<f64>(&fns, &step, 6, Tolerance::Default).unwrap();
        assert_eq!(
            r.verdict,
            TheoremVerdict::Consistent,
            "{:#?}",
            r.consequences
                .iter()
                .filter(|c| !c.holds)
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn square_is_strictly_superadditive() {
        let f = catalog_get("power(2)", &Params::default(), None).unwrap();
        let r = lemma_suite::<Exact>(
            &[("power(2)".into(), f)],
            &BigRational::from_integer(BigInt::from(1)),
            8,
            Tolerance::Default,
        )
        .unwrap();
        assert!(
            r.consequence(
                "power(2): strictly directionally convex implies strictly super-additive"
            )
            .unwrap()
            .holds
        );
        assert_eq!(r.verdict, TheoremVerdict::Consistent);
    }
}
