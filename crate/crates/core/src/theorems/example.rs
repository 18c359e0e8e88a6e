use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use super::{Consequence, NamedCheck, Scenario, TheoremError, TheoremReport};
use crate::funcspec::{catalog_get, Params};
use crate::grid::{max_abs_diff, sample, ExtValue, GridFn, GridSpec, Slack};
use crate::props::{check_aggregation, check_dominated, Tolerance};
use crate::scalar::{rational_to_literal, Exact};
use crate::transforms::{subadditive_closure, superadditive_closure};

/// The one-axis grid must reach at least this far.
pub const EXAMPLE_MIN_EXTENT: i64 = 40;
/// Extent per axis of the lifted two-axis grid.
pub const EXAMPLE_LIFT_EXTENT: i64 = 24;

/// Exact reproduction of the piecewise-linear example: the super transform
/// of `A` is `g`, the sub transform is `f`, both also after lifting
/// `A(x1) + x2` to two axes.
pub fn reproduce_example1(
    step: &BigRational,
    count: usize,
) -> Result<TheoremReport<Exact>, TheoremError> {
    if !step.is_positive() || !step.recip().is_integer() {
        return Err(TheoremError::Precondition(format!(
            "1/h must be an integer, got h = {}",
            rational_to_literal(step)
        )));
    }
    let extent = step * BigRational::from_integer(BigInt::from(count));
    if extent < BigRational::from_integer(BigInt::from(EXAMPLE_MIN_EXTENT)) {
        return Err(TheoremError::Precondition(format!(
            "grid must reach {EXAMPLE_MIN_EXTENT}, reaches {}",
            rational_to_literal(&extent)
        )));
    }
    let none = Params::default();
    let tol = Tolerance::Default;
    let mut report = TheoremReport::new(
        Scenario::Example,
        format!("example1_A, h = {}", rational_to_literal(step)),
    );

    let spec = GridSpec::uniform(1, step.clone(), count)?;
    let [a, f, g]: [GridFn<Exact>; 3] = ["example1_A", "example1_f", "example1_g"]
        .map(|name| {
            catalog_get(name, &none, None)
                .map_err(TheoremError::from)
                .and_then(|s| Ok(sample(&s, &spec)?))
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?
        .try_into()
        .expect("three grids");
    let aggregation = NamedCheck::holds("A is an aggregation function", check_aggregation(&a, tol));
    let scored = aggregation.satisfied;
    report.hypotheses.push(aggregation);

    let upper = superadditive_closure(&a)?;
    let lower = subadditive_closure(&a)?;
    report
        .consequences
        .push(equal("super transform equals g", scored, &upper, &g)?);
    report
        .consequences
        .push(equal("sub transform equals f", scored, &lower, &f)?);
    for (name, lo, hi) in [
        ("f <= sub transform", &f, &lower),
        ("sub transform <= A", &lower, &a),
        ("A <= super transform", &a, &upper),
        ("super transform <= g", &upper, &g),
    ] {
        let holds = check_dominated(lo, hi, tol)?.holds();
        report
            .consequences
            .push(Consequence::flag(name, scored, holds));
    }
    for (label, grid, x, expected) in [
        ("super transform", &upper, 8, Exact::integer(8)),
        ("super transform", &upper, 30, Exact::new(65, 2)),
        ("sub transform", &lower, 14, Exact::new(35, 3)),
        ("sub transform", &lower, 5, Exact::new(9, 2)),
    ] {
        if let Some(idx) = index_of(step, &[x], &spec) {
            report.consequences.push(spot(
                format!("{label} at {x} is {expected}"),
                scored,
                grid,
                idx,
                expected,
            ));
        }
    }

    let lift_count = (BigRational::from_integer(BigInt::from(EXAMPLE_LIFT_EXTENT)) / step)
        .ceil()
        .to_integer()
        .to_usize()
        .ok_or_else(|| TheoremError::Precondition("lifted grid too large".to_string()))?;
    let lifted_spec = GridSpec::uniform(2, step.clone(), lift_count)?;
    let [la, lf, lg]: [GridFn<Exact>; 3] = [
        "lifted(example1_A)",
        "lifted(example1_f)",
        "lifted(example1_g)",
    ]
    .map(|name| {
        catalog_get(name, &none, Some(2))
            .map_err(TheoremError::from)
            .and_then(|s| Ok(sample(&s, &lifted_spec)?))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?
    .try_into()
    .expect("three grids");
    let lifted_upper = superadditive_closure(&la)?;
    let lifted_lower = subadditive_closure(&la)?;
    report.consequences.push(equal(
        "lifted super transform equals lifted g",
        scored,
        &lifted_upper,
        &lg,
    )?);
    report.consequences.push(equal(
        "lifted sub transform equals lifted f",
        scored,
        &lifted_lower,
        &lf,
    )?);
    if let Some(idx) = index_of(step, &[8, 4], &lifted_spec) {
        report.consequences.push(spot(
            "lifted super transform at (8, 4) is 12".to_string(),
            scored,
            &lifted_upper,
            idx,
            Exact::integer(12),
        ));
    }
    Ok(report.conclude())
}

fn index_of(step: &BigRational, x: &[i64], spec: &GridSpec) -> Option<Vec<usize>> {
    let idx: Option<Vec<usize>> = x
        .iter()
        .map(|&v| {
            let r = BigRational::from_integer(BigInt::from(v)) / step;
            r.is_integer().then(|| r.to_integer().to_usize()).flatten()
        })
        .collect();
    idx.filter(|i| spec.contains(i))
}

fn spot(
    name: String,
    scored: bool,
    grid: &GridFn<Exact>,
    idx: Vec<usize>,
    expected: Exact,
) -> Consequence<Exact> {
    let measured = grid.get(&idx).diff(&ExtValue::Finite(expected));
    let measured = match measured {
        Slack::Finite(d) => Slack::Finite(Exact(d.0.abs())),
        _ => Slack::PlusInfinity,
    };
    Consequence::at_most(name, scored, measured, Slack::Finite(Exact::integer(0))).at(idx)
}

/// Exact equality, reporting the largest difference and the first
/// differing point.
fn equal(
    name: &str,
    scored: bool,
    x: &GridFn<Exact>,
    y: &GridFn<Exact>,
) -> Result<Consequence<Exact>, TheoremError> {
    let measured = match max_abs_diff(x, y)? {
        ExtValue::Finite(v) => Slack::Finite(v),
        ExtValue::Infinite => Slack::PlusInfinity,
    };
    let first = x.values().iter().zip(y.values()).position(|(a, b)| a != b);
    let mut c = Consequence::at_most(name, scored, measured, Slack::Finite(Exact::integer(0)));
    if let Some(flat) = first {
        c = c.at(x.spec().unflat(flat));
    }
    Ok(c)
}
