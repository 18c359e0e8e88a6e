//! Independent brute-force oracles and random grid functions shared by the
//! integration tests.
#![allow(dead_code)]

use addilope_core::funcspec::catalog::{standard_entries, CatalogEntry};
use addilope_core::grid::{ExtValue, GridFn, GridSpec};
use addilope_core::transforms::Kind;
use addilope_core::{sample, Exact, FuncSpec, PointFn, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Samples exactly when the function is rational, otherwise in floats and
/// converts each float to its exact value.
pub fn sample_exact(f: &FuncSpec, spec: &GridSpec) -> GridFn<Exact> {
    if f.is_rational() {
        sample(f, spec).expect("sampling succeeds")
    } else {
        let g: GridFn<f64> = sample(f, spec).expect("sampling succeeds");
        g.map(|v| Exact::from_f64(*v).expect("finite"))
    }
}

pub fn entries_of_arity(n: usize) -> Vec<CatalogEntry> {
    standard_entries()
        .into_iter()
        .filter(|e| e.arity == n)
        .collect()
}

/// All multi-indices of a box, in lexicographic order.
pub fn box_points(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &m in counts {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=m).map(move |i| {
                    let mut p = p.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out
}

fn leq(a: &[usize], b: &[usize]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn better<T: Scalar>(kind: Kind, a: &T, b: &T) -> bool {
    match kind {
        Kind::Super => a > b,
        Kind::Sub => a < b,
    }
}

/// Optimum of `sum a[k_j]` over every multiset `{k_1, ..., k_r}` of nonzero
/// grid points with `sum k_j = m`, by explicit enumeration of multisets in
/// non-increasing lexicographic order of parts.
pub fn decomposition_oracle<T: Scalar>(a: &GridFn<T>, kind: Kind) -> Vec<T> {
    let counts = a.spec().counts().to_vec();
    let points = box_points(&counts);
    let value = |p: &[usize]| a.get(p).finite().expect("finite input").clone();
    points
        .iter()
        .map(|m| {
            if m.iter().all(|&c| c == 0) {
                return value(m);
            }
            let mut best: Option<T> = None;
            let mut parts: Vec<usize> = Vec::new();
            enumerate(&points, m, points.len() - 1, &mut parts, &mut |parts| {
                let total = parts
                    .iter()
                    .fold(T::zero(), |acc, &i| acc + value(&points[i]));
                if best.as_ref().is_none_or(|b| better(kind, &total, b)) {
                    best = Some(total);
                }
            });
            best.expect("m itself is a decomposition")
        })
        .collect()
}

/// Enumerates multisets of nonzero points (indices into `points`, each at
/// most `max`) summing to `remaining`.
fn enumerate(
    points: &[Vec<usize>],
    remaining: &[usize],
    max: usize,
    parts: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if remaining.iter().all(|&c| c == 0) {
        visit(parts);
        return;
    }
    for i in (1..=max).rev() {
        let p = &points[i];
        if !leq(p, remaining) {
            continue;
        }
        let rest: Vec<usize> = remaining.iter().zip(p).map(|(r, x)| r - x).collect();
        parts.push(i);
        enumerate(points, &rest, i, parts, visit);
        parts.pop();
    }
}

/// Covering form of the transforms for monotone inputs: the super transform
/// optimises over families with `sum <= m`, the sub transform over families
/// with `sum >= m` inside the box.
pub fn covering_oracle<T: Scalar>(exact: &[T], spec: &GridSpec, kind: Kind) -> Vec<T> {
    let points = box_points(spec.counts());
    points
        .iter()
        .map(|m| {
            let mut best: Option<T> = None;
            for (p, v) in points.iter().zip(exact) {
                let admissible = match kind {
                    Kind::Super => leq(p, m),
                    Kind::Sub => leq(m, p),
                };
                if admissible && best.as_ref().is_none_or(|b| better(kind, v, b)) {
                    best = Some(v.clone());
                }
            }
            best.expect("m is admissible")
        })
        .collect()
}

/// All multi-indices `p` with `lo <= p <= hi`, in lexicographic order.
pub fn box_between(lo: &[usize], hi: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for (&l, &h) in lo.iter().zip(hi) {
        out = out
            .into_iter()
            .flat_map(|p| {
                (l..=h).map(move |i| {
                    let mut p = p.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out
}

/// Exhaustive directional convexity (or, with `concave`, concavity) over all
/// `u <= x <= v` with `y = u + v - x`, skipping `{x, y} = {u, v}`.
pub fn quadruple_oracle<T: Scalar>(a: &GridFn<T>, concave: bool, strict: bool, tau: &T) -> bool {
    let counts = a.spec().counts();
    let value = |p: &[usize]| a.get(p).finite().expect("finite input").clone();
    for u in box_points(counts) {
        for v in box_between(&u, counts) {
            let outer = value(&u) + value(&v);
            for x in box_between(&u, &v) {
                let y: Vec<usize> = u
                    .iter()
                    .zip(&v)
                    .zip(&x)
                    .map(|((u, v), x)| u + v - x)
                    .collect();
                if (x == u && y == v) || (x == v && y == u) {
                    continue;
                }
                let inner = value(&x) + value(&y);
                let slack = if concave {
                    outer.clone() - inner
                } else {
                    inner - outer.clone()
                };
                let fails = if strict {
                    slack >= -tau.clone()
                } else {
                    slack > tau.clone()
                };
                if fails {
                    return false;
                }
            }
        }
    }
    true
}

/// Random grid function with `a[0] = 0`, non-decreasing along every axis.
/// Exact values are multiples of 1/4 below 8 per step; float values are
/// uniform increments.
pub fn random_monotone_exact(spec: &GridSpec, rng: &mut impl Rng) -> GridFn<Exact> {
    random_monotone(spec, rng, |rng| Exact::new(rng.gen_range(0..32), 4))
}

pub fn random_monotone_f64(spec: &GridSpec, rng: &mut impl Rng) -> GridFn<f64> {
    random_monotone(spec, rng, |rng| rng.gen_range(0.0..2.0))
}

fn random_monotone<T: Scalar, R: Rng>(
    spec: &GridSpec,
    rng: &mut R,
    mut increment: impl FnMut(&mut R) -> T,
) -> GridFn<T> {
    let points = box_points(spec.counts());
    let mut values: Vec<T> = Vec::with_capacity(points.len());
    for p in &points {
        if p.iter().all(|&c| c == 0) {
            values.push(T::zero());
            continue;
        }
        let floor = (0..p.len())
            .filter(|&i| p[i] > 0)
            .map(|i| {
                let mut prev = p.clone();
                prev[i] -= 1;
                values[spec.flat(&prev)].clone()
            })
            .fold(T::zero(), T::max_of);
        values.push(floor + increment(rng));
    }
    GridFn::from_finite(spec.clone(), values).expect("sizes match")
}

/// Random exact grid function: either a quadratic `sum c_i m_i^2 +
/// sum d_ij m_i m_j + sum b_i m_i` with random signs of curvature, so that
/// both verdicts occur, or small random integers.
pub fn random_curvature(spec: &GridSpec, rng: &mut impl Rng) -> GridFn<Exact> {
    let n = spec.arity();
    let points = box_points(spec.counts());
    if rng.gen_bool(0.25) {
        let values = points
            .iter()
            .map(|_| Exact::integer(rng.gen_range(0..6)))
            .collect();
        return GridFn::from_finite(spec.clone(), values).expect("sizes match");
    }
    let sign: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
    let c: Vec<i64> = (0..n).map(|_| sign * rng.gen_range(0..3)).collect();
    let d: Vec<i64> = (0..n * n).map(|_| sign * rng.gen_range(0..3)).collect();
    let b: Vec<i64> = (0..n).map(|_| rng.gen_range(0..4)).collect();
    let values = points
        .iter()
        .map(|m| {
            let m: Vec<i64> = m.iter().map(|&x| x as i64).collect();
            let mut v = 0i64;
            for i in 0..n {
                v += c[i] * m[i] * m[i] + b[i] * m[i];
                for j in i + 1..n {
                    v += d[i * n + j] * m[i] * m[j];
                }
            }
            Exact::integer(v)
        })
        .collect();
    GridFn::from_finite(spec.clone(), values).expect("sizes match")
}

pub fn finite_values<T: Scalar>(a: &GridFn<T>) -> Vec<T> {
    a.values()
        .iter()
        .map(|v| v.finite().expect("finite").clone())
        .collect()
}

pub fn ext<T: Scalar>(v: &[T]) -> Vec<ExtValue<T>> {
    v.iter().cloned().map(ExtValue::Finite).collect()
}

pub fn describe(f: &FuncSpec) -> String {
    format!("{f} (arity {})", f.arity())
}
