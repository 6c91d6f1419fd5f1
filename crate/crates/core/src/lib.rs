//! Trajectory planning by demonstration.
//!
//! A recorded, timestamped 3D point sequence is trimmed, reduced to a set of
//! waypoints and interpolated axis by axis with natural cubic splines. The
//! resulting trajectory can be checked against a flight volume and dynamic
//! limits, edited with affine transforms and compared to the recording or to
//! a programmed reference path.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`). The aliases
//! at the crate root fix the scalar to `f64`, which is what the file formats,
//! the CLI and the service use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod editing;
pub mod error;
pub mod error_metrics;
pub mod feasibility;
pub mod geometry;
pub mod mission;
pub mod pipeline;
pub mod recording;
pub mod sampling;
pub mod scalar;
pub mod similarity;
pub mod spline;

pub use error::{Error, Result};
pub use geometry::Vec3;
pub use scalar::Scalar;

pub type Point = geometry::Vec3<f64>;
pub type TrackedPoint = recording::TrackedPoint<f64>;
pub type FlightPath = recording::FlightPath<f64>;
pub type WaypointSet = sampling::WaypointSet<f64>;
pub type CubicSpline1D = spline::CubicSpline1D<f64>;
pub type Trajectory = spline::Trajectory<f64>;
pub type ControlPoint = spline::ControlPoint<f64>;
pub type FeasibilityLimits = feasibility::FeasibilityLimits<f64>;
pub type FeasibilityReport = feasibility::FeasibilityReport<f64>;
pub type EditOp = editing::EditOp<f64>;
pub type ErrorSeries = error_metrics::ErrorSeries<f64>;
pub type ErrorReport = error_metrics::ErrorReport<f64>;
pub type SimilarityReport = similarity::SimilarityReport<f64>;
pub type Mission = mission::Mission<f64>;
pub type PlanRequest = pipeline::PlanRequest<f64>;
pub type PlanResult = pipeline::PlanResult<f64>;
