//! Super-additive and sub-additive closures of grid functions, refinement
//! drivers and axis-slope estimates.

mod closure;
mod refinement;
mod slope;

pub use closure::{
    closure, decomposition_closure, subadditive_closure, superadditive_closure, ClosureError, Kind,
};
pub use refinement::{
    transform_with_refinement, ClosureLevel, ClosureResult, RefinementConfig, TransformError,
};
pub use slope::{
    axis_slope_estimate, AxisSlope, SlopeError, SlopeEstimate, SlopeOptions, SlopeSample,
};
