use rayon::prelude::*;
use serde::Serialize;

use crate::grid::{AggregationViolation, ExtValue, GridError, GridFn, Limits};
use crate::scalar::Scalar;

/// Which transform: `Super` maximises over decompositions, `Sub` minimises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Super,
    Sub,
}

impl Kind {
    fn improves<T: Scalar>(self, candidate: &ExtValue<T>, best: &ExtValue<T>) -> bool {
        match self {
            Kind::Super => candidate > best,
            Kind::Sub => candidate < best,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClosureError {
    #[error("input is not an aggregation function: value {0} at the origin")]
    NonZeroOrigin(String),
    #[error("input is not an aggregation function: decreases from {from:?} to {to:?}")]
    NotMonotone { from: Vec<usize>, to: Vec<usize> },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Least super-additive grid majorant of an aggregation function.
pub fn superadditive_closure<T: Scalar>(a: &GridFn<T>) -> Result<GridFn<T>, ClosureError> {
    closure(a, Kind::Super, &Limits::default())
}

/// Greatest sub-additive grid minorant of an aggregation function.
pub fn subadditive_closure<T: Scalar>(a: &GridFn<T>) -> Result<GridFn<T>, ClosureError> {
    closure(a, Kind::Sub, &Limits::default())
}

/// Validated closure. Inputs must vanish at the origin and be
/// non-decreasing along every axis, which lets exact decompositions stand in
/// for the covering (`>=`) and packing (`<=`) constraints.
pub fn closure<T: Scalar>(
    a: &GridFn<T>,
    kind: Kind,
    limits: &Limits,
) -> Result<GridFn<T>, ClosureError> {
    a.spec().check_size(limits)?;
    match a.aggregation_violation() {
        None => Ok(decomposition_closure(a, kind)),
        Some(AggregationViolation::NonZeroOrigin(v)) => {
            Err(ClosureError::NonZeroOrigin(v.to_string()))
        }
        Some(AggregationViolation::Decrease { from, to, .. }) => {
            Err(ClosureError::NotMonotone { from, to })
        }
    }
}

/// Optimum over all decompositions `m = k_1 + ... + k_r` into nonzero grid
/// points of `sum a[k_j]`, without validating the input.
///
/// Uses `B[m] = opt(a[m], opt_{0 < k < m} B[k] + B[m - k])`, evaluated in
/// wavefronts of equal coordinate sum. Each point depends only on points of
/// strictly smaller sum and reduces its candidates in a fixed order, so the
/// output does not depend on scheduling.
pub fn decomposition_closure<T: Scalar>(a: &GridFn<T>, kind: Kind) -> GridFn<T> {
    let spec = a.spec();
    let n = spec.arity();
    let mut by_sum: Vec<Vec<usize>> = vec![Vec::new(); spec.counts().iter().sum::<usize>() + 1];
    for flat in 0..spec.len() {
        let s: usize = spec.unflat(flat).iter().sum();
        by_sum[s].push(flat);
    }
    let strides = spec.strides().to_vec();
    let mut out = a.values().to_vec();
    for wave in by_sum.iter().skip(1) {
        let updated: Vec<ExtValue<T>> = wave
            .par_iter()
            .map(|&flat| {
                let m = spec.unflat(flat);
                best_split(&out, flat, &m, &strides, n, kind)
            })
            .collect();
        for (&flat, v) in wave.iter().zip(updated) {
            out[flat] = v;
        }
    }
    GridFn::new(spec.clone(), out).expect("same shape")
}

fn best_split<T: Scalar>(
    values: &[ExtValue<T>],
    flat: usize,
    m: &[usize],
    strides: &[usize],
    n: usize,
    kind: Kind,
) -> ExtValue<T> {
    let mut best = values[flat].clone();
    // k runs over the box [0, m] in lexicographic order; flat(m - k) =
    // flat(m) - flat(k), and k <= m - k in that order iff 2 flat(k) <= flat(m).
    let mut k = vec![0usize; n];
    let mut fk = 0usize;
    loop {
        // advance odometer
        let mut axis = n;
        loop {
            if axis == 0 {
                return best;
            }
            axis -= 1;
            if k[axis] < m[axis] {
                k[axis] += 1;
                fk += strides[axis];
                break;
            }
            fk -= k[axis] * strides[axis];
            k[axis] = 0;
        }
        if 2 * fk > flat {
            return best;
        }
        let candidate = values[fk].clone() + values[flat - fk].clone();
        if kind.improves(&candidate, &best) {
            best = candidate;
        }
    }
}
