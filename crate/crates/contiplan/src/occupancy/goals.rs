//! Candidate approach poses around a goal position.

use super::grid::OccupancyGrid;
use crate::kinematics::{rot_x, rot_y, Pose};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// A tip pose approaching the goal along a world-frame cardinal direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoalCandidate {
    /// Target tip pose: position at `goal − standoff·d`, z-axis along `d`.
    pub pose: Pose,
    /// Unit vector pointing from the candidate position toward the goal.
    pub approach_direction: Vector3<f64>,
}

/// Orientation whose z-axis (the tip approach axis) equals `d`, with a fixed
/// deterministic roll per cardinal.
fn cardinal_orientation(d: &Vector3<f64>) -> Matrix3<f64> {
    if d.x > 0.5 {
        rot_y(FRAC_PI_2)
    } else if d.x < -0.5 {
        rot_y(-FRAC_PI_2)
    } else if d.y > 0.5 {
        rot_x(-FRAC_PI_2)
    } else {
        rot_x(FRAC_PI_2)
    }
}

/// Candidate poses at `goal − standoff·d` for the four horizontal cardinals,
/// dropping any whose position voxel is occupied, sorted by distance from the
/// home tip (ascending; ties keep the +x, −x, +y, −y order).
pub fn goal_candidates(
    goal_position: &Vector3<f64>,
    standoff: f64,
    grid: &OccupancyGrid,
    home_tip: &Vector3<f64>,
) -> Vec<GoalCandidate> {
    let cardinals = [
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(-1.0, 0.0, 0.0),
        Vector3::new(0.0, 1.0, 0.0),
        Vector3::new(0.0, -1.0, 0.0),
    ];
    let mut candidates: Vec<GoalCandidate> = cardinals
        .iter()
        .map(|d| GoalCandidate {
            pose: Pose::new(cardinal_orientation(d), goal_position - standoff * d),
            approach_direction: *d,
        })
        .filter(|c| !grid.occ(&c.pose.translation))
        .collect();
    candidates.sort_by(|a, b| {
        let da = (a.pose.translation - home_tip).norm();
        let db = (b.pose.translation - home_tip).norm();
        da.partial_cmp(&db).unwrap()
    });
    candidates
}
