//! Waypoint edits applied after planning, followed by replanning.

use serde::{Deserialize, Serialize};

use crate::feasibility::{check_feasibility, FeasibilityLimits, FeasibilityReport};
use crate::sampling::WaypointSet;
use crate::spline::Trajectory;
use crate::{Error, Result, Scalar, Vec3};

/// A single edit. Rotation and scaling pivot on the first waypoint;
/// timestamps are never touched.
///
/// JSON form: `{"kind":"rotate","angle":1.5708}`,
/// `{"kind":"shift","offset":[0.1,0,0]}`, `{"kind":"scale","factor":2}`,
/// `{"kind":"move_waypoint","index":3,"position":[1,2,1]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EditOp<T> {
    Shift {
        offset: Vec3<T>,
    },
    /// Counterclockwise seen from +z, in radians.
    Rotate {
        angle: T,
    },
    Scale {
        factor: T,
    },
    MoveWaypoint {
        index: usize,
        position: Vec3<T>,
    },
}

pub fn apply_edit<T: Scalar>(waypoints: &WaypointSet<T>, op: &EditOp<T>) -> Result<WaypointSet<T>> {
    let pivot = waypoints.first().position;
    let positions = waypoints.positions();
    let edited: Vec<Vec3<T>> = match *op {
        EditOp::Shift { offset } => {
            if !offset.is_finite() {
                return Err(Error::InvalidArgument("shift offset must be finite".into()));
            }
            positions.into_iter().map(|p| p + offset).collect()
        }
        EditOp::Rotate { angle } => {
            if !angle.is_finite() {
                return Err(Error::InvalidArgument("rotation angle must be finite".into()));
            }
            positions.into_iter().map(|p| p.rotated_xy(pivot, angle)).collect()
        }
        EditOp::Scale { factor } => {
            if !(factor > T::zero()) || !factor.is_finite() {
                return Err(Error::InvalidArgument("scale factor must be positive".into()));
            }
            positions.into_iter().map(|p| pivot + (p - pivot) * factor).collect()
        }
        EditOp::MoveWaypoint { index, position } => {
            if index >= positions.len() {
                return Err(Error::IndexOutOfRange { index, len: positions.len() });
            }
            if !position.is_finite() {
                return Err(Error::InvalidArgument("waypoint position must be finite".into()));
            }
            let mut positions = positions;
            positions[index] = position;
            positions
        }
    };
    Ok(waypoints.with_positions(edited))
}

pub fn apply_edits<T: Scalar>(waypoints: &WaypointSet<T>, ops: &[EditOp<T>]) -> Result<WaypointSet<T>> {
    ops.iter().try_fold(waypoints.clone(), |w, op| apply_edit(&w, op))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EditOutcome<T> {
    pub waypoints: WaypointSet<T>,
    pub trajectory: Trajectory<T>,
    pub feasibility: FeasibilityReport<T>,
}

/// Applies `ops` in order, replans and checks the result. An infeasible
/// outcome is returned as is; committing it is the caller's decision.
pub fn edit_and_replan<T: Scalar>(
    waypoints: &WaypointSet<T>,
    ops: &[EditOp<T>],
    limits: &FeasibilityLimits<T>,
) -> Result<EditOutcome<T>> {
    let waypoints = apply_edits(waypoints, ops)?;
    let trajectory = Trajectory::plan(&waypoints)?;
    let feasibility = check_feasibility(&trajectory, limits)?;
    Ok(EditOutcome { waypoints, trajectory, feasibility })
}
