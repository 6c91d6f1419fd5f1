//! JSON exchange documents shared by the CLI and the session service.
//!
//! A [`PlanBundle`] carries the request that produced it, so it can be
//! edited and replanned later without the original recording file.

use serde::{Deserialize, Serialize};

use crate::editing::EditOp;
use crate::error_metrics::{color_scale, ErrorReport, ErrorSeries};
use crate::feasibility::{FeasibilityLimits, FeasibilityReport};
use crate::pipeline::{run_pipeline, PlanRequest, PlanResult};
use crate::recording::{FlightPath, PointRecord};
use crate::sampling::{SamplingConfig, SamplingStrategy, WaypointSet, RNG_ALGORITHM};
use crate::spline::{ControlPoint, CubicSpline1D, SegmentCoeffs, Trajectory};
use crate::Result;

pub const BUNDLE_FORMAT: &str = "drawjectory.plan.v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisExport {
    pub values: Vec<f64>,
    pub segments: Vec<SegmentCoeffs<f64>>,
}

impl From<&CubicSpline1D<f64>> for AxisExport {
    fn from(s: &CubicSpline1D<f64>) -> Self {
        Self { values: s.values().to_vec(), segments: s.segments().to_vec() }
    }
}

/// Knot vector, per-axis coefficients and sampled control points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryExport {
    pub t0: f64,
    pub tmax: f64,
    pub knots: Vec<f64>,
    pub x: AxisExport,
    pub y: AxisExport,
    pub z: AxisExport,
    pub samples: Vec<ControlPoint<f64>>,
}

impl TrajectoryExport {
    pub fn new(trajectory: &Trajectory<f64>, samples: Vec<ControlPoint<f64>>) -> Self {
        Self {
            t0: trajectory.t0(),
            tmax: trajectory.tmax(),
            knots: trajectory.knots().to_vec(),
            x: trajectory.x().into(),
            y: trajectory.y().into(),
            z: trajectory.z().into(),
            samples,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientEntry {
    pub t: f64,
    pub rgb: [u8; 3],
}

/// Error report plus its green-to-red gradient for rendering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorExport {
    pub rsme: f64,
    pub mae: f64,
    pub series: ErrorSeries<f64>,
    pub normalized: Vec<f64>,
    pub gradient: Vec<GradientEntry>,
}

impl From<&ErrorReport<f64>> for ErrorExport {
    fn from(report: &ErrorReport<f64>) -> Self {
        Self {
            rsme: report.rsme,
            mae: report.mae,
            series: report.series.clone(),
            normalized: report.normalized.clone(),
            gradient: color_scale(report).into_iter().map(|(t, rgb)| GradientEntry { t, rgb }).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingRecord {
    pub strategy: SamplingStrategy,
    pub n: usize,
    pub seed: u64,
    pub rng: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestRecord {
    pub sampling: SamplingRecord,
    pub limits: FeasibilityLimits<f64>,
    pub edits: Vec<EditOp<f64>>,
    /// Trimmed recording the plan was made from.
    pub demonstration: Vec<PointRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanBundle {
    pub format: String,
    pub request: RequestRecord,
    /// Number of waypoints actually selected (may differ from `request.sampling.n`).
    pub waypoint_count: usize,
    pub waypoints: Vec<PointRecord>,
    pub trajectory: TrajectoryExport,
    pub feasibility: FeasibilityReport<f64>,
    pub error: ErrorExport,
}

pub fn waypoint_records(set: &WaypointSet<f64>) -> Vec<PointRecord> {
    set.waypoints()
        .iter()
        .enumerate()
        .map(|(k, p)| PointRecord::from_point(p, set.source_indices().map(|ix| ix[k])))
        .collect()
}

impl PlanBundle {
    pub fn new(request: &PlanRequest<f64>, result: &PlanResult<f64>) -> Self {
        let sampling = request.sampling;
        Self {
            format: BUNDLE_FORMAT.to_string(),
            request: RequestRecord {
                sampling: SamplingRecord {
                    strategy: sampling.strategy,
                    n: sampling.n,
                    seed: sampling.seed,
                    rng: RNG_ALGORITHM.to_string(),
                },
                limits: request.limits,
                edits: request.edits.clone(),
                demonstration: request
                    .flight_path
                    .effective_points()
                    .iter()
                    .map(|p| PointRecord::from_point(p, None))
                    .collect(),
            },
            waypoint_count: result.waypoints.len(),
            waypoints: waypoint_records(&result.waypoints),
            trajectory: TrajectoryExport::new(&result.trajectory, result.control_points.clone()),
            feasibility: result.feasibility.clone(),
            error: (&result.error).into(),
        }
    }

    /// Runs the pipeline and wraps the outcome.
    pub fn plan(request: &PlanRequest<f64>) -> Result<(Self, PlanResult<f64>)> {
        let result = run_pipeline(request)?;
        Ok((Self::new(request, &result), result))
    }

    /// Reconstructs the request, with the demonstration as an untrimmed path.
    pub fn to_request(&self) -> Result<PlanRequest<f64>> {
        let sampling = &self.request.sampling;
        Ok(PlanRequest {
            flight_path: FlightPath::new(self.request.demonstration.iter().map(|r| r.to_point()).collect())?,
            sampling: SamplingConfig { strategy: sampling.strategy, n: sampling.n, seed: sampling.seed },
            limits: self.request.limits,
            edits: self.request.edits.clone(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
