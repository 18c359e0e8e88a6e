//! Scenario harness: checks the testable consequences of the fixed-point,
//! linear-dual and nonexistence results, the lemma implications, and the
//! worked piecewise-linear example.

mod example;
mod fixed_point;
mod lemmas;
mod screen;

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::funcspec::CatalogError;
use crate::grid::{GridError, SampleError, Slack};
use crate::props::{CheckReport, Verdict};
use crate::scalar::Scalar;
use crate::transforms::{ClosureError, SlopeError, TransformError};

pub use example::{reproduce_example1, EXAMPLE_LIFT_EXTENT, EXAMPLE_MIN_EXTENT};
pub use fixed_point::{verify_fixed_point, verify_linear_dual, LinearDualDetail};
pub use lemmas::{lemma_suite, SEPARATION_GRID};
pub use screen::{screen_grids, screen_pair, Branch, BranchReport, Conclusion, ScreenerReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scenario {
    #[serde(rename = "fixed-point")]
    FixedPoint,
    #[serde(rename = "linear-dual")]
    LinearDual,
    #[serde(rename = "lemmas")]
    Lemmas,
    #[serde(rename = "example1")]
    Example,
    #[serde(rename = "screen")]
    Screen,
}

impl Scenario {
    pub fn id(self) -> &'static str {
        match self {
            Scenario::FixedPoint => "fixed-point",
            Scenario::LinearDual => "linear-dual",
            Scenario::Lemmas => "lemmas",
            Scenario::Example => "example1",
            Scenario::Screen => "screen",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremVerdict {
    Consistent,
    Inconsistent,
    HypothesesNotMet,
}

/// A checker run together with the verdict the scenario needs from it.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct NamedCheck<T> {
    pub name: String,
    pub expected: Verdict,
    pub satisfied: bool,
    /// Satisfied, and a required `holds` clears the tolerance on every
    /// strict-eligible tuple.
    pub clears_margin: bool,
    pub report: CheckReport<T>,
}

impl<T: Scalar> NamedCheck<T> {
    pub fn new(name: impl Into<String>, expected: Verdict, report: CheckReport<T>) -> Self {
        let (satisfied, clears_margin) = match expected {
            Verdict::Holds => (report.holds(), report.holds_with_margin()),
            Verdict::Fails => (!report.holds(), !report.holds()),
        };
        NamedCheck {
            name: name.into(),
            expected,
            satisfied,
            clears_margin,
            report,
        }
    }

    pub fn holds(name: impl Into<String>, report: CheckReport<T>) -> Self {
        NamedCheck::new(name, Verdict::Holds, report)
    }

    pub fn fails(name: impl Into<String>, report: CheckReport<T>) -> Self {
        NamedCheck::new(name, Verdict::Fails, report)
    }
}

/// One predicted fact and whether the grid computation agrees with it.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct Consequence<T> {
    pub name: String,
    /// Whether the hypotheses behind this prediction held; unscored
    /// consequences are informational.
    pub scored: bool,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<Slack<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<Slack<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<usize>>,
}

impl<T: Scalar> Consequence<T> {
    /// `measured <= bound`.
    pub fn at_most(
        name: impl Into<String>,
        scored: bool,
        measured: Slack<T>,
        bound: Slack<T>,
    ) -> Self {
        Consequence {
            name: name.into(),
            scored,
            holds: measured <= bound,
            measured: Some(measured),
            bound: Some(bound),
            point: None,
        }
    }

    pub fn flag(name: impl Into<String>, scored: bool, holds: bool) -> Self {
        Consequence {
            name: name.into(),
            scored,
            holds,
            measured: None,
            bound: None,
            point: None,
        }
    }

    pub fn at(mut self, point: Vec<usize>) -> Self {
        self.point = Some(point);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct TheoremReport<T> {
    pub scenario: Scenario,
    pub subject: String,
    pub hypotheses: Vec<NamedCheck<T>>,
    pub consequences: Vec<Consequence<T>>,
    pub verdict: TheoremVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linear_dual: Option<LinearDualDetail<T>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl<T: Scalar> TheoremReport<T> {
    pub(crate) fn new(scenario: Scenario, subject: impl Into<String>) -> Self {
        TheoremReport {
            scenario,
            subject: subject.into(),
            hypotheses: Vec::new(),
            consequences: Vec::new(),
            verdict: TheoremVerdict::HypothesesNotMet,
            linear_dual: None,
            notes: Vec::new(),
        }
    }

    /// Inconsistent if a scored consequence fails, consistent if any was
    /// scored, otherwise hypotheses-not-met.
    pub(crate) fn conclude(mut self) -> Self {
        let scored: Vec<&Consequence<T>> = self.consequences.iter().filter(|c| c.scored).collect();
        self.verdict = if scored.iter().any(|c| !c.holds) {
            TheoremVerdict::Inconsistent
        } else if scored.is_empty() {
            TheoremVerdict::HypothesesNotMet
        } else {
            TheoremVerdict::Consistent
        };
        self
    }

    pub fn consequence(&self, name: &str) -> Option<&Consequence<T>> {
        self.consequences.iter().find(|c| c.name == name)
    }

    pub fn hypothesis(&self, name: &str) -> Option<&NamedCheck<T>> {
        self.hypotheses.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TheoremError {
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Slope(#[from] SlopeError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// Writes one CSV row per report: scenario, subject, verdict, hypotheses
/// satisfied, consequences holding.
pub fn write_summary<T: Scalar, W: Write>(
    reports: &[TheoremReport<T>],
    w: W,
) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "scenario",
        "subject",
        "verdict",
        "hypotheses_satisfied",
        "consequences_holding",
    ])?;
    for r in reports {
        let verdict = serde_json::to_value(r.verdict).expect("serializable");
        out.write_record([
            r.scenario.id().to_string(),
            r.subject.clone(),
            verdict.as_str().unwrap_or_default().to_string(),
            format!(
                "{}/{}",
                r.hypotheses.iter().filter(|h| h.satisfied).count(),
                r.hypotheses.len()
            ),
            format!(
                "{}/{}",
                r.consequences.iter().filter(|c| c.holds).count(),
                r.consequences.len()
            ),
        ])?;
    }
    out.flush()?;
    Ok(())
}
