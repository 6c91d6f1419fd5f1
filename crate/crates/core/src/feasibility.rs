//! Flight-volume and dynamic-limit checks on planned trajectories.
//!
//! Checks are sample based: the trajectory is evaluated every `check_step`
//! seconds and at every knot. A violation that starts and ends strictly
//! between two samples on a curved segment can be missed.

use serde::{Deserialize, Serialize};

use crate::spline::{sample_times, Trajectory};
use crate::{Error, Result, Scalar, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityLimits<T> {
    pub box_min: Vec3<T>,
    pub box_max: Vec3<T>,
    /// Speed limit in m/s.
    pub v_max: T,
    /// Acceleration limit in m/s²; unchecked when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_max: Option<T>,
    pub check_step: T,
}

impl<T: Scalar> Default for FeasibilityLimits<T> {
    /// 6 m x 4 m x 3 m flight volume, 1.5 m/s, no acceleration limit, 10 ms.
    fn default() -> Self {
        Self {
            box_min: Vec3::zero(),
            box_max: Vec3::new(T::lit(6.0), T::lit(4.0), T::lit(3.0)),
            v_max: T::lit(1.5),
            a_max: None,
            check_step: T::lit(0.01),
        }
    }
}

impl<T: Scalar> FeasibilityLimits<T> {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = (self.box_min, self.box_max);
        if !(lo.x < hi.x && lo.y < hi.y && lo.z < hi.z) {
            return Err(Error::InvalidArgument("box_min must be below box_max on every axis".into()));
        }
        if !(self.v_max > T::zero()) {
            return Err(Error::InvalidArgument("v_max must be positive".into()));
        }
        if let Some(a) = self.a_max {
            if !(a > T::zero()) {
                return Err(Error::InvalidArgument("a_max must be positive".into()));
            }
        }
        if !(self.check_step > T::zero()) {
            return Err(Error::NonPositiveStep(self.check_step.to_f64_lossy()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Bounds,
    Velocity,
    Acceleration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
    Z,
}

/// One constraint breach. For bounds violations `value` is the offending
/// coordinate and `limit` the face of the box it crossed; otherwise both are
/// vector norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation<T> {
    pub t: T,
    pub kind: ViolationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Axis>,
    pub value: T,
    pub limit: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport<T> {
    pub feasible: bool,
    pub violations: Vec<Violation<T>>,
}

impl<T: Scalar> FeasibilityReport<T> {
    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

fn check_times<T: Scalar>(trajectory: &Trajectory<T>, step: T) -> Result<Vec<T>> {
    let mut times = sample_times(trajectory.t0(), trajectory.tmax(), step)?;
    times.extend_from_slice(trajectory.knots());
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite sample times"));
    times.dedup();
    Ok(times)
}

pub fn check_feasibility<T: Scalar>(
    trajectory: &Trajectory<T>,
    limits: &FeasibilityLimits<T>,
) -> Result<FeasibilityReport<T>> {
    limits.validate()?;
    let lo = limits.box_min.to_array();
    let hi = limits.box_max.to_array();
    let mut violations = Vec::new();
    for t in check_times(trajectory, limits.check_step)? {
        let cp = trajectory.control_point(t)?;
        let p = cp.position.to_array();
        for (k, axis) in [Axis::X, Axis::Y, Axis::Z].into_iter().enumerate() {
            let crossed = if p[k] < lo[k] {
                Some(lo[k])
            } else if p[k] > hi[k] {
                Some(hi[k])
            } else {
                None
            };
            if let Some(limit) = crossed {
                violations.push(Violation { t, kind: ViolationKind::Bounds, axis: Some(axis), value: p[k], limit });
            }
        }
        let speed = cp.velocity.norm();
        if speed > limits.v_max {
            violations.push(Violation {
                t,
                kind: ViolationKind::Velocity,
                axis: None,
                value: speed,
                limit: limits.v_max,
            });
        }
        if let Some(a_max) = limits.a_max {
            let accel = cp.acceleration.norm();
            if accel > a_max {
                violations.push(Violation {
                    t,
                    kind: ViolationKind::Acceleration,
                    axis: None,
                    value: accel,
                    limit: a_max,
                });
            }
        }
    }
    Ok(FeasibilityReport { feasible: violations.is_empty(), violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recording::TrackedPoint;
    use crate::sampling::WaypointSet;

    fn plan(points: &[(f64, f64, f64, f64)]) -> Trajectory<f64> {
        let w = WaypointSet::new(points.iter().map(|&(t, x, y, z)| TrackedPoint::new(t, x, y, z)).collect()).unwrap();
        Trajectory::plan(&w).unwrap()
    }

    #[test]
    fn slow_diagonal_is_feasible() {
        let traj = plan(&[(0.0, 0.5, 0.5, 1.0), (10.0, 5.5, 3.5, 1.0)]);
        let report = check_feasibility(&traj, &FeasibilityLimits::default()).unwrap();
        assert!(report.feasible, "{report:?}");
        assert!((traj.velocity(3.0).unwrap().norm() - 34f64.sqrt() / 10.0).abs() < 1e-12);
    }

    #[test]
    fn fast_line_violates_velocity() {
        let traj = plan(&[(0.0, 1.0, 1.0, 1.0), (1.0, 4.0, 1.0, 1.0)]);
        let report = check_feasibility(&traj, &FeasibilityLimits::default()).unwrap();
        assert!(!report.feasible);
        assert_eq!(report.count(ViolationKind::Velocity), 101);
        assert!((report.violations[0].value - 3.0).abs() < 1e-12);
        assert_eq!(report.violations[0].limit, 1.5);
    }

    #[test]
    fn waypoint_outside_box() {
        let traj = plan(&[(0.0, 5.0, 1.0, 1.0), (2.0, 6.5, 1.0, 1.0), (4.0, 5.0, 1.0, 1.0)]);
        let report = check_feasibility(&traj, &FeasibilityLimits::default()).unwrap();
        assert!(!report.feasible);
        let at_knot = report.violations.iter().find(|v| v.t == 2.0).expect("violation at knot time");
        assert_eq!(at_knot.kind, ViolationKind::Bounds);
        assert_eq!(at_knot.axis, Some(Axis::X));
        assert_eq!(at_knot.value, 6.5);
        assert_eq!(at_knot.limit, 6.0);
        assert!(report.violations.windows(2).all(|w| w[0].t <= w[1].t));
    }

    #[test]
    fn knot_off_grid_is_checked() {
        // the knot at 1.005 is not on the 10 ms grid
        let traj = plan(&[(0.0, 3.0, 1.0, 1.0), (1.005, 3.0, 1.0, 3.2), (2.0, 3.0, 1.0, 1.0)]);
        let limits = FeasibilityLimits { v_max: 100.0, ..Default::default() };
        let report = check_feasibility(&traj, &limits).unwrap();
        assert!(report.violations.iter().any(|v| v.t == 1.005 && v.axis == Some(Axis::Z)));
    }

    #[test]
    fn acceleration_is_opt_in() {
        let traj = plan(&[(0.0, 1.0, 1.0, 1.0), (1.0, 2.0, 2.0, 1.0), (2.0, 3.0, 1.0, 1.0)]);
        let mut limits = FeasibilityLimits::default();
        assert_eq!(check_feasibility(&traj, &limits).unwrap().count(ViolationKind::Acceleration), 0);
        limits.a_max = Some(0.5);
        assert!(check_feasibility(&traj, &limits).unwrap().count(ViolationKind::Acceleration) > 0);
    }

    #[test]
    fn invalid_limits() {
        let traj = plan(&[(0.0, 1.0, 1.0, 1.0), (1.0, 2.0, 1.0, 1.0)]);
        for limits in [
            FeasibilityLimits { v_max: 0.0, ..Default::default() },
            FeasibilityLimits { a_max: Some(-1.0), ..Default::default() },
            FeasibilityLimits { check_step: 0.0, ..Default::default() },
            FeasibilityLimits { box_max: Vec3::new(6.0, 0.0, 3.0), ..Default::default() },
        ] {
            assert!(check_feasibility(&traj, &limits).is_err());
        }
    }
}
