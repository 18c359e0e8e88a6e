//! Grid-level property checkers. Each returns a [`CheckReport`] whose
//! failing verdicts carry a concrete [`Witness`].

mod additive;
mod differences;
mod shape;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::grid::{ExtValue, GridFn, Slack};
use crate::scalar::Scalar;

pub use additive::{check_subadditive, check_superadditive};
pub use differences::{
    check_coordinatewise_concave, check_coordinatewise_convex, check_directionally_concave,
    check_directionally_convex, check_submodular, check_supermodular, quadruple_count,
    quadruple_scan, Curvature, CROSS_VALIDATION_LIMIT,
};
pub use shape::{
    check_aggregation, check_dominated, check_linear, check_midpoint_convex, check_ratio_monotone,
    check_zero_origin, Ray,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Property {
    #[serde(rename = "aggregation")]
    Aggregation,
    #[serde(rename = "super")]
    Superadditive,
    #[serde(rename = "sub")]
    Subadditive,
    #[serde(rename = "cconvex")]
    CoordinatewiseConvex,
    #[serde(rename = "cconcave")]
    CoordinatewiseConcave,
    #[serde(rename = "supermod")]
    Supermodular,
    #[serde(rename = "submod")]
    Submodular,
    #[serde(rename = "dirconvex")]
    DirectionallyConvex,
    #[serde(rename = "dirconcave")]
    DirectionallyConcave,
    #[serde(rename = "linear")]
    Linear,
    #[serde(rename = "ratio")]
    RatioMonotone,
    #[serde(rename = "midpoint")]
    MidpointConvex,
    #[serde(rename = "zero-origin")]
    ZeroOrigin,
    #[serde(rename = "dominated")]
    Dominated,
}

impl Property {
    pub const ALL: [Property; 14] = [
        Property::Aggregation,
        Property::Superadditive,
        Property::Subadditive,
        Property::CoordinatewiseConvex,
        Property::CoordinatewiseConcave,
        Property::Supermodular,
        Property::Submodular,
        Property::DirectionallyConvex,
        Property::DirectionallyConcave,
        Property::Linear,
        Property::RatioMonotone,
        Property::MidpointConvex,
        Property::ZeroOrigin,
        Property::Dominated,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Property::Aggregation => "aggregation",
            Property::Superadditive => "super",
            Property::Subadditive => "sub",
            Property::CoordinatewiseConvex => "cconvex",
            Property::CoordinatewiseConcave => "cconcave",
            Property::Supermodular => "supermod",
            Property::Submodular => "submod",
            Property::DirectionallyConvex => "dirconvex",
            Property::DirectionallyConcave => "dirconcave",
            Property::Linear => "linear",
            Property::RatioMonotone => "ratio",
            Property::MidpointConvex => "midpoint",
            Property::ZeroOrigin => "zero-origin",
            Property::Dominated => "dominated",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown property `{0}`")]
pub struct UnknownProperty(pub String);

impl FromStr for Property {
    type Err = UnknownProperty;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .iter()
            .copied()
            .find(|p| p.id() == s)
            .ok_or_else(|| UnknownProperty(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
}

/// Comparison slack used by the checkers.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum Tolerance {
    /// `1e-9 * (1 + max|a|)` for floats, zero for exact grids.
    #[default]
    Default,
    Absolute(f64),
    /// `r * (1 + max|a|)`.
    Relative(f64),
}

impl Tolerance {
    pub fn resolve<T: Scalar>(&self, scale: &T) -> T {
        match *self {
            Tolerance::Default => T::default_tolerance(scale),
            Tolerance::Absolute(t) => T::from_f64(t).unwrap_or_else(T::zero),
            Tolerance::Relative(r) => {
                T::from_f64(r).unwrap_or_else(T::zero) * (T::from_usize(1) + scale.abs())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    /// `(p, q, p + q)`.
    Pair,
    /// `(u, v, x, y)` with `u <= x, y <= v` and `u + v = x + y`.
    Quadruple,
    /// `(m, m + e_i)`.
    AxisPair,
    /// A single point, or a point of two grids compared with each other.
    Point,
    /// Consecutive points on a ray from the origin.
    RayPair,
    /// `(p, q, (p + q) / 2)`.
    Segment,
}

/// Grid points whose values violate a property's defining inequality.
///
/// The violation is `slack = sum_i coefficients[i] * values[i] + offset`,
/// positive when the inequality fails.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct Witness<T> {
    pub kind: WitnessKind,
    pub indices: Vec<Vec<usize>>,
    pub points: Vec<Vec<T>>,
    pub values: Vec<ExtValue<T>>,
    pub coefficients: Vec<T>,
    pub offset: T,
    pub slack: Slack<T>,
}

impl<T: Scalar> Witness<T> {
    /// Re-evaluates the slack from the stored values.
    pub fn recompute(&self) -> Slack<T> {
        combine(&self.coefficients, self.values.iter(), &self.offset)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct CheckReport<T> {
    pub property: Property,
    pub strict: bool,
    pub verdict: Verdict,
    pub witness: Option<Witness<T>>,
    pub tolerance: T,
    /// Smallest `-slack` over the tuples that strictness applies to.
    pub margin: Option<Slack<T>>,
    /// Number of tuples evaluated.
    pub tuples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradient: Option<Vec<T>>,
    /// Agreement with the exhaustive quadruple scan, when it was run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_validated: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl<T: Scalar> CheckReport<T> {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    /// Holds, and every strict-eligible tuple clears the tolerance.
    pub fn holds_with_margin(&self) -> bool {
        self.holds()
            && match &self.margin {
                Some(m) => *m > Slack::Finite(self.tolerance.clone()),
                None => true,
            }
    }
}

/// `sum c_i v_i + offset`, accumulating positive and negative parts
/// separately so that infinite values on both sides cancel to zero.
pub(crate) fn combine<'a, T: Scalar>(
    coefficients: &[T],
    values: impl Iterator<Item = &'a ExtValue<T>>,
    offset: &T,
) -> Slack<T> {
    fn push<T: Scalar>(slot: &mut Option<ExtValue<T>>, term: ExtValue<T>) {
        *slot = Some(match slot.take() {
            None => term,
            Some(acc) => acc + term,
        });
    }
    let mut pos = None;
    let mut neg = None;
    for (c, v) in coefficients.iter().zip(values) {
        match c.unit_sign() {
            Some(true) => push(&mut pos, v.clone()),
            Some(false) => push(&mut neg, v.clone()),
            None if c.is_negative() => push(&mut neg, scale(&c.abs(), v)),
            None => push(&mut pos, scale(c, v)),
        }
    }
    if offset.is_negative() {
        push(&mut neg, ExtValue::Finite(offset.abs()));
    } else if !offset.is_zero() {
        push(&mut pos, ExtValue::Finite(offset.clone()));
    }
    pos.unwrap_or_else(ExtValue::zero)
        .diff(&neg.unwrap_or_else(ExtValue::zero))
}

fn scale<T: Scalar>(c: &T, v: &ExtValue<T>) -> ExtValue<T> {
    match v {
        ExtValue::Finite(x) => ExtValue::Finite(c.clone() * x.clone()),
        ExtValue::Infinite if c.is_zero() => ExtValue::zero(),
        ExtValue::Infinite => ExtValue::Infinite,
    }
}

struct Violation<T> {
    kind: WitnessKind,
    points: Vec<usize>,
    values: Vec<ExtValue<T>>,
    coefficients: Vec<T>,
    offset: T,
    slack: Slack<T>,
}

/// Accumulates one checker pass: the lexicographically smallest violation,
/// the largest slack over margin-eligible tuples and a tuple count.
pub(crate) struct Scan<'t, T> {
    tau: &'t T,
    above: Slack<T>,
    below: Slack<T>,
    strict: bool,
    worst: Option<Slack<T>>,
    violation: Option<Violation<T>>,
    count: usize,
}

impl<'t, T: Scalar> Scan<'t, T> {
    pub(crate) fn new(tau: &'t T, strict: bool) -> Self {
        Scan {
            tau,
            above: Slack::Finite(tau.clone()),
            below: Slack::Finite(-tau.clone()),
            strict,
            worst: None,
            violation: None,
            count: 0,
        }
    }

    /// Records one tuple. `points` are flat indices, which order like the
    /// multi-indices they encode. `eligible` marks tuples subject to the
    /// strict inequality and to the margin.
    pub(crate) fn visit(
        &mut self,
        kind: WitnessKind,
        points: &[usize],
        values: &[&ExtValue<T>],
        coefficients: &[T],
        offset: &T,
        eligible: bool,
    ) {
        self.count += 1;
        let slack = combine(coefficients, values.iter().copied(), offset);
        let violated = slack > self.above || (self.strict && eligible && slack >= self.below);
        if eligible && self.worst.as_ref().is_none_or(|w| slack > *w) {
            self.worst = Some(slack.clone());
        }
        if violated
            && self
                .violation
                .as_ref()
                .is_none_or(|v| points < v.points.as_slice())
        {
            self.violation = Some(Violation {
                kind,
                points: points.to_vec(),
                values: values.iter().map(|v| (*v).clone()).collect(),
                coefficients: coefficients.to_vec(),
                offset: offset.clone(),
                slack,
            });
        }
    }

    pub(crate) fn merge(mut self, other: Self) -> Self {
        self.count += other.count;
        if let Some(w) = other.worst {
            if self.worst.as_ref().is_none_or(|s| w > *s) {
                self.worst = Some(w);
            }
        }
        if let Some(v) = other.violation {
            if self.violation.as_ref().is_none_or(|s| v.points < s.points) {
                self.violation = Some(v);
            }
        }
        self
    }

    pub(crate) fn finish(self, property: Property, grid: &GridFn<T>) -> CheckReport<T> {
        let spec = grid.spec();
        let witness = self.violation.map(|v| {
            let indices: Vec<Vec<usize>> = v.points.iter().map(|&f| spec.unflat(f)).collect();
            Witness {
                kind: v.kind,
                points: indices.iter().map(|i| spec.point_of(i)).collect(),
                indices,
                values: v.values,
                coefficients: v.coefficients,
                offset: v.offset,
                slack: v.slack,
            }
        });
        CheckReport {
            property,
            strict: self.strict,
            verdict: if witness.is_some() {
                Verdict::Fails
            } else {
                Verdict::Holds
            },
            witness,
            tolerance: self.tau.clone(),
            margin: self.worst.map(|w| w.neg()),
            tuples: self.count,
            gradient: None,
            cross_validated: None,
            notes: Vec::new(),
        }
    }
}

/// Combines two reports on the same grid into one for their conjunction.
pub(crate) fn conjunction<T: Scalar>(
    property: Property,
    a: CheckReport<T>,
    b: CheckReport<T>,
) -> CheckReport<T> {
    let witness = match (a.witness, b.witness) {
        (Some(x), Some(y)) => Some(if y.indices < x.indices { y } else { x }),
        (x, y) => x.or(y),
    };
    let margin = match (a.margin, b.margin) {
        (Some(x), Some(y)) => Some(if y < x { y } else { x }),
        (x, y) => x.or(y),
    };
    let mut notes = a.notes;
    notes.extend(b.notes);
    CheckReport {
        property,
        strict: a.strict,
        verdict: if witness.is_some() {
            Verdict::Fails
        } else {
            Verdict::Holds
        },
        witness,
        tolerance: a.tolerance,
        margin,
        tuples: a.tuples + b.tuples,
        gradient: None,
        cross_validated: None,
        notes,
    }
}
