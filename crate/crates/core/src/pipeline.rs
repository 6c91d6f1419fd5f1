//! End-to-end planning: trim, sample, interpolate, edit, check, measure.

use std::time::{Duration, Instant};

use crate::editing::{edit_and_replan, EditOp};
use crate::error_metrics::{aggregate_errors, position_error_series, ErrorReport};
use crate::feasibility::{FeasibilityLimits, FeasibilityReport};
use crate::recording::FlightPath;
use crate::sampling::{SamplingConfig, WaypointSet};
use crate::spline::{ControlPoint, Trajectory};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct PlanRequest<T> {
    /// Recording with its trim bounds; only the effective points are used.
    pub flight_path: FlightPath<T>,
    pub sampling: SamplingConfig,
    pub limits: FeasibilityLimits<T>,
    pub edits: Vec<EditOp<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult<T> {
    /// Waypoints as sampled, before any edit.
    pub sampled: WaypointSet<T>,
    /// Waypoints after all edits; equal to `sampled` when there are none.
    pub waypoints: WaypointSet<T>,
    pub trajectory: Trajectory<T>,
    pub feasibility: FeasibilityReport<T>,
    /// Trimmed recording against `trajectory`.
    pub error: ErrorReport<T>,
    /// `trajectory` sampled every `limits.check_step`.
    pub control_points: Vec<ControlPoint<T>>,
}

impl<T: Scalar> PlanResult<T> {
    pub fn feasible(&self) -> bool {
        self.feasibility.feasible
    }
}

/// Runs every planning phase. The outcome depends only on the request; an
/// infeasible trajectory is reported, not rejected.
pub fn run_pipeline<T: Scalar>(request: &PlanRequest<T>) -> Result<PlanResult<T>> {
    request.limits.validate()?;
    let demonstration = request.flight_path.effective_points();
    let sampled = request.sampling.sample(demonstration)?;
    let outcome = edit_and_replan(&sampled, &request.edits, &request.limits)?;
    let error = aggregate_errors(position_error_series(demonstration, &outcome.trajectory)?)?;
    let control_points = outcome.trajectory.sample(request.limits.check_step)?;
    Ok(PlanResult {
        sampled,
        waypoints: outcome.waypoints,
        trajectory: outcome.trajectory,
        feasibility: outcome.feasibility,
        error,
        control_points,
    })
}

/// Wall-clock timer for human-paced planning sessions.
#[derive(Debug, Clone, Default)]
pub struct Stopwatch {
    started: Option<Instant>,
    last: Option<Duration>,
}

impl Stopwatch {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts (or restarts) timing.
    pub fn start(&mut self) {
        self.started = Some(Instant::now());
    }

    /// Stops timing and returns the elapsed seconds.
    pub fn stop(&mut self) -> Result<f64> {
        let started = self.started.take().ok_or(Error::StopWithoutStart)?;
        let elapsed = started.elapsed();
        self.last = Some(elapsed);
        Ok(elapsed.as_secs_f64())
    }

    pub fn is_running(&self) -> bool {
        self.started.is_some()
    }

    /// Seconds measured by the most recent `stop`.
    pub fn last_elapsed(&self) -> Option<f64> {
        self.last.map(|d| d.as_secs_f64())
    }
}
