mod common;

use addilope_core::grid::GridSpec;
use addilope_core::props::{
    check_directionally_concave, check_directionally_convex, check_midpoint_convex,
    check_subadditive, check_superadditive, quadruple_scan, Curvature, Tolerance,
};
use addilope_core::{Exact, GridFn};
use common::*;
use rand::SeedableRng;

fn zero() -> Exact {
    Exact::integer(0)
}

fn assert_agrees(label: &str, a: &GridFn<Exact>) {
    for strict in [false, true] {
        let convex = check_directionally_convex(a, strict, Tolerance::Default);
        assert_eq!(
            convex.holds(),
            quadruple_oracle(a, false, strict, &zero()),
            "{label} convex strict={strict}"
        );
        let concave = check_directionally_concave(a, strict, Tolerance::Default);
        assert_eq!(
            concave.holds(),
            quadruple_oracle(a, true, strict, &zero()),
            "{label} concave strict={strict}"
        );
        let direct = quadruple_scan(a, strict, Tolerance::Default, Curvature::Convex);
        assert_eq!(
            direct.holds(),
            convex.holds(),
            "{label} library scan strict={strict}"
        );
        for report in [&convex, &concave, &direct] {
            if let Some(w) = &report.witness {
                assert_eq!(w.recompute(), w.slack, "{label} witness");
            }
        }
    }
}

#[test]
fn catalog_functions_agree_with_quadruple_oracle() {
    for n in [1, 2] {
        for entry in entries_of_arity(n) {
            for m in [2, 3, 5] {
                let spec = GridSpec::uniform(n, q(1, 2), m).unwrap();
                assert_agrees(&entry.name, &sample_exact(&entry.body, &spec));
            }
        }
    }
}

#[test]
fn random_functions_agree_with_quadruple_oracle() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for counts in [vec![6], vec![3, 3], vec![2, 1, 2]] {
        let spec = GridSpec::new(counts.iter().map(|_| q(1, 1)).collect(), counts.clone()).unwrap();
        for i in 0..15 {
            assert_agrees(
                &format!("random {i} on {counts:?}"),
                &random_curvature(&spec, &mut rng),
            );
        }
    }
}

/// Pair scans against a direct double loop over coordinates.
#[test]
fn additivity_agrees_with_pair_loop() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let spec = GridSpec::new(vec![q(1, 1), q(1, 1)], vec![3, 2]).unwrap();
    let points = box_points(spec.counts());
    for _ in 0..30 {
        let a = random_curvature(&spec, &mut rng);
        let v = |p: &[usize]| a.get(p).finite().unwrap().clone();
        let mut superadditive = true;
        let mut subadditive = true;
        for p in &points {
            for r in &points {
                let s: Vec<usize> = p.iter().zip(r).map(|(x, y)| x + y).collect();
                if !spec.contains(&s) {
                    continue;
                }
                superadditive &= v(p) + v(r) <= v(&s);
                subadditive &= v(&s) <= v(p) + v(r);
            }
        }
        assert_eq!(
            check_superadditive(&a, false, Tolerance::Default).holds(),
            superadditive
        );
        assert_eq!(
            check_subadditive(&a, false, Tolerance::Default).holds(),
            subadditive
        );
    }
}

#[test]
fn one_axis_midpoint_matches_directional() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let spec = GridSpec::uniform(1, q(1, 1), 7).unwrap();
    for _ in 0..40 {
        let a = random_curvature(&spec, &mut rng);
        for strict in [false, true] {
            assert_eq!(
                check_midpoint_convex(&a, strict, Tolerance::Default).holds(),
                check_directionally_convex(&a, strict, Tolerance::Default).holds()
            );
        }
    }
}

#[test]
fn concavity_is_convexity_of_the_reflection() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let spec = GridSpec::uniform(2, q(1, 1), 3).unwrap();
    for _ in 0..30 {
        let a = random_curvature(&spec, &mut rng);
        let k = a.max_abs();
        let reflected = a.map(|v| k.clone() - v.clone());
        for strict in [false, true] {
            let concave = check_directionally_concave(&a, strict, Tolerance::Default);
            let convex = check_directionally_convex(&reflected, strict, Tolerance::Default);
            assert_eq!(concave.holds(), convex.holds());
            assert_eq!(
                concave.witness.map(|w| w.indices),
                convex.witness.map(|w| w.indices)
            );
        }
    }
}
