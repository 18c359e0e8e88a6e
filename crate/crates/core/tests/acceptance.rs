//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::time::{Duration, Instant};

use addilope_core::funcspec::catalog::standard_entries;
use addilope_core::grid::{max_abs_diff, GridSpec, Slack};
use addilope_core::props::{
    check_aggregation, check_coordinatewise_convex, check_directionally_concave,
    check_directionally_convex, check_dominated, check_midpoint_convex, check_subadditive,
    check_superadditive, quadruple_count, Tolerance, CROSS_VALIDATION_LIMIT,
};
use addilope_core::theorems::{
    reproduce_example1, screen_grids, screen_pair, verify_fixed_point, verify_linear_dual, Branch,
    Conclusion, TheoremVerdict,
};
use addilope_core::transforms::{
    closure, decomposition_closure, subadditive_closure, superadditive_closure,
    transform_with_refinement, Kind, RefinementConfig,
};
use addilope_core::{catalog_get, Exact, ExtValue, FuncSpec, GridFn, Limits, Params};
use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn catalog(name: &str, arity: Option<usize>) -> FuncSpec {
    catalog_get(name, &Params::default(), arity).expect("catalog entry")
}

fn example_exactness() -> Outcome {
    let start = Instant::now();
    let none = Params::default();
    for (h, m) in [(q(1, 1), 40usize), (q(1, 2), 80)] {
        let spec = GridSpec::uniform(1, h.clone(), m).unwrap();
        let a: GridFn<Exact> =
            addilope_core::sample(&catalog_get("example1_A", &none, None).unwrap(), &spec).unwrap();
        let f: GridFn<Exact> =
            addilope_core::sample(&catalog_get("example1_f", &none, None).unwrap(), &spec).unwrap();
        let g: GridFn<Exact> =
            addilope_core::sample(&catalog_get("example1_g", &none, None).unwrap(), &spec).unwrap();
        let upper = superadditive_closure(&a).map_err(|e| e.to_string())?;
        let lower = subadditive_closure(&a).map_err(|e| e.to_string())?;
        ensure(upper == g, || {
            format!("h={h}: super transform differs from g")
        })?;
        ensure(lower == f, || {
            format!("h={h}: sub transform differs from f")
        })?;
        let at = |grid: &GridFn<Exact>, x: i64| {
            let i = (q(x, 1) / &h).to_integer();
            grid.get(&[i.try_into().unwrap()]).clone()
        };
        for (label, grid, x, expected) in [
            ("A*", &upper, 8, Exact::integer(8)),
            ("A*", &upper, 30, Exact::new(65, 2)),
            ("A_", &lower, 14, Exact::new(35, 3)),
            ("A_", &lower, 5, Exact::new(9, 2)),
        ] {
            let got = at(grid, x);
            ensure(got == ExtValue::Finite(expected.clone()), || {
                format!("h={h}: {label}({x}) = {got}, expected {expected}")
            })?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    for (h, m) in [(q(1, 1), 40usize), (q(1, 2), 80)] {
        let r = reproduce_example1(&h, m).map_err(|e| e.to_string())?;
        ensure(r.verdict == TheoremVerdict::Consistent, || {
            format!(
                "scenario h={h}: {:?}",
                r.consequences
                    .iter()
                    .filter(|c| !c.holds)
                    .collect::<Vec<_>>()
            )
        })?;
    }
    Ok(format!(
        "1-D pipeline {elapsed:?}; scenario with lifted grid consistent at h=1 and h=1/2"
    ))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut grids = 0;
    for entry in standard_entries() {
        let shapes: Vec<Vec<usize>> = match entry.arity {
            1 => (1..=12).map(|m| vec![m]).collect(),
            2 => (1..=4)
                .flat_map(|a| (1..=4).map(move |b| vec![a, b]))
                .collect(),
            n => return Err(format!("unexpected arity {n}")),
        };
        for counts in shapes {
            for h in [q(1, 1), q(1, 2)] {
                let spec = GridSpec::new(vec![h.clone(); counts.len()], counts.clone()).unwrap();
                let a = sample_exact(&entry.body, &spec);
                for kind in [Kind::Super, Kind::Sub] {
                    let oracle = decomposition_oracle(&a, kind);
                    let dp = finite_values(&decomposition_closure(&a, kind));
                    ensure(dp == oracle, || {
                        format!("{} {kind:?} on {counts:?}, h={h}", entry.name)
                    })?;
                    if a.aggregation_violation().is_none() {
                        let checked =
                            closure(&a, kind, &Limits::default()).map_err(|e| e.to_string())?;
                        ensure(
                            finite_values(&checked) == covering_oracle(&oracle, &spec, kind),
                            || format!("{} {kind:?} covering form on {counts:?}", entry.name),
                        )?;
                    }
                }
                grids += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{grids} grids, both transforms, exact; {elapsed:?}"
    ))
}

fn counterexamples() -> Outcome {
    let spec = GridSpec::uniform(2, q(1, 1), 4).unwrap();
    let tol = Tolerance::Default;
    let product: GridFn<Exact> =
        addilope_core::sample(&catalog("product_minus_one", None), &spec).unwrap();
    ensure(
        check_directionally_convex(&product, false, tol).holds(),
        || "product_minus_one not dirconvex".into(),
    )?;
    let mid = check_midpoint_convex(&product, false, tol);
    let w = mid
        .witness
        .ok_or("product_minus_one passes midpoint convexity")?;
    ensure(w.indices == [vec![0, 2], vec![2, 0], vec![1, 1]], || {
        format!("midpoint witness {:?}", w.indices)
    })?;
    ensure(w.values[2] == ExtValue::Finite(Exact::integer(3)), || {
        format!("midpoint value {}", w.values[2])
    })?;
    let average = (w.values[0].clone() + w.values[1].clone()).div_scalar(&Exact::integer(2));
    ensure(average == ExtValue::Finite(Exact::integer(2)), || {
        format!("endpoint average {average}")
    })?;
    ensure(
        w.recompute() == w.slack && w.slack == Slack::Finite(Exact::integer(1)),
        || format!("slack {}", w.slack),
    )?;

    let skew: GridFn<Exact> =
        addilope_core::sample(&catalog("skew_quadratic", None), &spec).unwrap();
    ensure(
        check_coordinatewise_convex(&skew, false, tol).holds(),
        || "skew_quadratic not coordinatewise convex".into(),
    )?;
    ensure(check_midpoint_convex(&skew, false, tol).holds(), || {
        "skew_quadratic not midpoint convex".into()
    })?;
    let sup = check_superadditive(&skew, false, tol);
    let w = sup
        .witness
        .ok_or("skew_quadratic passes super-additivity")?;
    let mut pair = w.indices[..2].to_vec();
    pair.sort();
    ensure(pair == [vec![0, 1], vec![1, 0]], || {
        format!("pair witness {:?}", w.indices)
    })?;
    let lhs = w.values[0].clone() + w.values[1].clone();
    ensure(
        lhs == ExtValue::Finite(Exact::integer(6))
            && w.values[2] == ExtValue::Finite(Exact::integer(4)),
        || format!("pair values {lhs} vs {}", w.values[2]),
    )?;
    Ok("anti-diagonal 3 > 2; pair (1,0),(0,1): 6 > 4".into())
}

fn fixed_point_consequences() -> Outcome {
    let tol = Tolerance::Default;
    let cases = [
        (
            "power(2)",
            catalog("power(2)", None),
            GridSpec::uniform(1, q(1, 2), 10).unwrap(),
            GridSpec::uniform(1, q(1, 2), 4).unwrap(),
        ),
        (
            "skew_quad_strict",
            catalog("skew_quad_strict", None),
            GridSpec::uniform(2, q(1, 2), 8).unwrap(),
            GridSpec::uniform(2, q(1, 2), 4).unwrap(),
        ),
    ];
    let mut summary = Vec::new();
    for (name, f, spec, base) in cases {
        let r = verify_fixed_point::<f64>(&f, &spec, tol).map_err(|e| e.to_string())?;
        ensure(r.verdict == TheoremVerdict::Consistent, || {
            format!("{name}: fixed point {:?}", r.verdict)
        })?;
        let hyp = r
            .hypothesis("super transform strictly directionally convex")
            .ok_or("missing hypothesis")?;
        ensure(
            hyp.satisfied
                && hyp
                    .report
                    .margin
                    .as_ref()
                    .is_some_and(|m| *m > Slack::Finite(0.0)),
            || format!("{name}: strict convexity margin {:?}", hyp.report.margin),
        )?;
        let dev = r
            .consequence("super transform equals input")
            .ok_or("missing consequence")?;
        ensure(
            dev.scored && dev.measured == Some(Slack::Finite(0.0)),
            || format!("{name}: deviation {:?}", dev.measured),
        )?;

        let d = verify_linear_dual::<f64>(&f, &base, 3, tol).map_err(|e| e.to_string())?;
        ensure(d.verdict == TheoremVerdict::Consistent, || {
            format!(
                "{name}: linear dual {:?}",
                d.consequences
                    .iter()
                    .filter(|c| !c.holds)
                    .collect::<Vec<_>>()
            )
        })?;
        let detail = d.linear_dual.ok_or("missing detail")?;
        ensure(detail.ratios.len() == 2, || {
            format!("{name}: ratios {:?}", detail.ratios)
        })?;
        for ratio in &detail.ratios {
            let ratio = ratio.ok_or_else(|| format!("{name}: gap vanished"))?;
            ensure((0.4..=0.6).contains(&ratio), || {
                format!("{name}: gap ratio {ratio}")
            })?;
        }
        summary.push(format!(
            "{name}: margin {}, K {:.4}, ratios {:?}",
            hyp.report.margin.as_ref().unwrap(),
            detail.k.unwrap_or(f64::NAN),
            detail
                .ratios
                .iter()
                .map(|r| format!("{:.4}", r.unwrap()))
                .collect::<Vec<_>>()
        ));
    }
    Ok(summary.join("; "))
}

fn divergence() -> Outcome {
    let f = catalog("sqrt", None);
    let base = GridSpec::uniform(1, q(1, 4), 16).unwrap();
    let r = transform_with_refinement::<f64, _>(
        &f,
        &base,
        Kind::Super,
        &RefinementConfig::with_levels(4),
    )
    .map_err(|e| e.to_string())?;
    ensure(r.divergence_flag, || {
        format!("no divergence; growth {:?}", r.growth_factors)
    })?;
    let root2 = 2f64.sqrt();
    for g in &r.growth_factors {
        ensure((g - root2).abs() <= 0.1 * root2, || format!("growth {g}"))?;
    }
    Ok(format!("growth factors {:?}", r.growth_factors))
}

fn screener() -> Outcome {
    let tol = Tolerance::Default;
    let example = screen_pair::<Exact>(
        &catalog("example1_f", None),
        &catalog("example1_g", None),
        &GridSpec::uniform(1, q(1, 1), 40).unwrap(),
        tol,
    )
    .map_err(|e| e.to_string())?;
    ensure(
        example.conclusion == Conclusion::NoTheoremObstruction,
        || "example pair obstructed".into(),
    )?;

    let f = FuncSpec::parse("x1/(1+x1)", 1).unwrap();
    let g = FuncSpec::parse("x1^2+x1", 1).unwrap();
    let r = screen_pair::<f64>(&f, &g, &GridSpec::uniform(1, q(1, 4), 16).unwrap(), tol)
        .map_err(|e| e.to_string())?;
    ensure(
        r.conclusion == Conclusion::ObstructionFound
            && r.obstruction_branch == Some(Branch::ConcaveF),
        || {
            format!(
                "concave pair: {:?} via {:?}",
                r.conclusion, r.obstruction_branch
            )
        },
    )?;
    let branch = r
        .branches
        .iter()
        .find(|b| b.branch == Branch::ConcaveF)
        .unwrap();
    for h in r.common.iter().chain(&branch.hypotheses) {
        ensure(h.clears_margin, || {
            format!(
                "hypothesis `{}` without margin: {:?}",
                h.name, h.report.margin
            )
        })?;
    }

    let mut realized = 0;
    for entry in standard_entries() {
        let spec =
            GridSpec::uniform(entry.arity, q(1, 2), if entry.arity == 1 { 12 } else { 4 }).unwrap();
        let a: GridFn<f64> = addilope_core::sample(&entry.body, &spec).unwrap();
        if !check_aggregation(&a, tol).holds() {
            continue;
        }
        let lower = subadditive_closure(&a).map_err(|e| e.to_string())?;
        let upper = superadditive_closure(&a).map_err(|e| e.to_string())?;
        let s = screen_grids(&lower, &upper, tol).map_err(|e| e.to_string())?;
        ensure(s.conclusion == Conclusion::NoTheoremObstruction, || {
            format!("realized pair of {} flagged", entry.name)
        })?;
        realized += 1;
    }
    Ok(format!(
        "example pair clear, concave pair obstructed, {realized} realized pairs clear"
    ))
}

fn invariant_suite() -> Outcome {
    const PER_CONFIG: usize = 200;
    let tol = Tolerance::Relative(1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let configs: Vec<Vec<usize>> = vec![vec![10], vec![4, 4], vec![2, 2, 2]];
    let mut checks = 0usize;
    for counts in &configs {
        let coarse = GridSpec::new(vec![q(1, 2); counts.len()], counts.clone()).unwrap();
        let fine = coarse.refine(&Limits::default()).unwrap();
        for i in 0..PER_CONFIG {
            let label = || format!("{counts:?} #{i}");
            let a_fine = random_monotone_f64(&fine, &mut rng);
            let a = a_fine.restrict_to(&coarse).unwrap();
            let upper = superadditive_closure(&a).map_err(|e| e.to_string())?;
            let lower = subadditive_closure(&a).map_err(|e| e.to_string())?;
            let dominated =
                |x: &GridFn<f64>, y: &GridFn<f64>| check_dominated(x, y, tol).unwrap().holds();
            ensure(dominated(&a, &upper), || {
                format!("{}: domination A <= A*", label())
            })?;
            ensure(dominated(&lower, &a), || {
                format!("{}: domination A_ <= A", label())
            })?;
            ensure(dominated(&lower, &upper), || {
                format!("{}: sandwich", label())
            })?;
            ensure(check_superadditive(&upper, false, tol).holds(), || {
                format!("{}: A* not super-additive", label())
            })?;
            ensure(check_subadditive(&lower, false, tol).holds(), || {
                format!("{}: A_ not sub-additive", label())
            })?;
            let again_up = superadditive_closure(&upper).map_err(|e| e.to_string())?;
            let again_low = subadditive_closure(&lower).map_err(|e| e.to_string())?;
            let tau = tol.resolve(&upper.max_abs());
            ensure(
                max_abs_diff(&again_up, &upper).unwrap() <= ExtValue::Finite(tau),
                || format!("{}: idempotence", label()),
            )?;
            let tau = tol.resolve(&lower.max_abs());
            ensure(
                max_abs_diff(&again_low, &lower).unwrap() <= ExtValue::Finite(tau),
                || format!("{}: idempotence", label()),
            )?;
            ensure(
                check_aggregation(&upper, tol).holds() && check_aggregation(&lower, tol).holds(),
                || format!("{}: monotonicity not preserved", label()),
            )?;
            let upper_fine = superadditive_closure(&a_fine)
                .unwrap()
                .restrict_to(&coarse)
                .unwrap();
            let lower_fine = subadditive_closure(&a_fine)
                .unwrap()
                .restrict_to(&coarse)
                .unwrap();
            ensure(
                dominated(&upper, &upper_fine) && dominated(&lower_fine, &lower),
                || format!("{}: refinement monotonicity", label()),
            )?;
            checks += 1;
        }
    }
    Ok(format!(
        "{checks} random monotone functions over {} configurations, zero violations",
        configs.len()
    ))
}

fn checker_oracle() -> Outcome {
    let zero = Exact::integer(0);
    let tol = Tolerance::Default;
    let mut grids = 0;
    let mut compare = |label: &str, a: &GridFn<Exact>| -> Result<(), String> {
        for strict in [false, true] {
            let convex = check_directionally_convex(a, strict, tol).holds();
            let concave = check_directionally_concave(a, strict, tol).holds();
            ensure(convex == quadruple_oracle(a, false, strict, &zero), || {
                format!("{label}: convex strict={strict}")
            })?;
            ensure(concave == quadruple_oracle(a, true, strict, &zero), || {
                format!("{label}: concave strict={strict}")
            })?;
        }
        grids += 1;
        Ok(())
    };
    let shapes: Vec<Vec<usize>> = (1..=40)
        .map(|m| vec![m])
        .chain((1..=7).flat_map(|a| (1..=7).map(move |b| vec![a, b])))
        .filter(|c| {
            let spec = GridSpec::new(vec![q(1, 1); c.len()], c.clone()).unwrap();
            quadruple_count(&spec, CROSS_VALIDATION_LIMIT).is_some()
        })
        .collect();
    for entry in standard_entries() {
        for counts in shapes.iter().filter(|c| c.len() == entry.arity) {
            let spec = GridSpec::new(vec![q(1, 2); counts.len()], counts.clone()).unwrap();
            compare(
                &format!("{} on {counts:?}", entry.name),
                &sample_exact(&entry.body, &spec),
            )?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let random_shapes = [vec![8], vec![12], vec![3, 3], vec![4, 2], vec![2, 2, 1]];
    for i in 0..50 {
        let counts = &random_shapes[i % random_shapes.len()];
        let spec = GridSpec::new(vec![q(1, 1); counts.len()], counts.clone()).unwrap();
        compare(
            &format!("random #{i} on {counts:?}"),
            &random_curvature(&spec, &mut rng),
        )?;
    }
    Ok(format!(
        "{grids} grids with at most {CROSS_VALIDATION_LIMIT} quadruples, strict and non-strict"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("example exactness", example_exactness),
        ("brute-force oracle equivalence", oracle_equivalence),
        ("counterexample suite", counterexamples),
        ("fixed point and linear dual", fixed_point_consequences),
        ("divergence detection", divergence),
        ("screener", screener),
        ("invariant suite", invariant_suite),
        ("checker-oracle agreement", checker_oracle),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!(
                "PASS criterion {} ({name}): {detail} [{:?}]",
                i + 1,
                start.elapsed()
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "FAIL criterion {} ({name}): {why} [{:?}]",
                    i + 1,
                    start.elapsed()
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
