//! Super-additive and sub-additive transforms of aggregation functions on
//! regular grids, checkers for the properties relating them, and scenario
//! harnesses for the resulting fixed-point and nonexistence statements.

pub mod funcspec;
pub mod grid;
pub mod props;
pub mod scalar;
pub mod theorems;
pub mod transforms;

pub use funcspec::{catalog_get, EvalError, FuncExpr, FuncSpec, Params, PlSpec, PointFn};
pub use grid::{sample, ExtValue, GridFn, GridSpec, Limits, Slack};
pub use props::{CheckReport, Property, Tolerance, Verdict, Witness};
pub use scalar::{Exact, Scalar};
pub use theorems::{ScreenerReport, TheoremReport, TheoremVerdict};
pub use transforms::{ClosureResult, Kind, RefinementConfig};
