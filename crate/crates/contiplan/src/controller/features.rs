use crate::kinematics::Pose;

use super::types::InputFormat;

/// Values per encoded pose: translation plus the first two rotation columns.
pub const POSE_DIM: usize = 9;

/// Flatten a pose to 9 values: translation, then rotation columns x and y.
/// The third column is redundant (cross product of the first two).
pub fn encode_pose(pose: &Pose) -> [f64; POSE_DIM] {
    let t = pose.translation;
    let r = pose.rotation;
    [
        t.x,
        t.y,
        t.z,
        r[(0, 0)],
        r[(1, 0)],
        r[(2, 0)],
        r[(0, 1)],
        r[(1, 1)],
        r[(2, 1)],
    ]
}

/// Goal expressed in the current tip frame: `current⁻¹ ∘ goal`.
pub fn relative_pose(current: &Pose, goal: &Pose) -> Pose {
    current.relative_to(goal)
}

/// Network input width for a format.
pub fn input_dim(format: InputFormat) -> usize {
    match format {
        InputFormat::CurrentPlusRelative | InputFormat::CurrentPlusGoal => 2 * POSE_DIM,
        InputFormat::GoalOnly | InputFormat::RelativeOnly => POSE_DIM,
    }
}

/// Assemble the controller input vector for one (current, goal) pose pair.
pub fn build_input(format: InputFormat, current: &Pose, goal: &Pose) -> Vec<f64> {
    let mut out = vec![0.0; input_dim(format)];
    build_input_into(format, current, goal, &mut out);
    out
}

/// `build_input` writing into a caller-provided slice of `input_dim` length;
/// the training loop fills batch matrices row by row this way.
pub fn build_input_into(format: InputFormat, current: &Pose, goal: &Pose, out: &mut [f64]) {
    debug_assert_eq!(out.len(), input_dim(format));
    match format {
        InputFormat::CurrentPlusRelative => {
            out[..POSE_DIM].copy_from_slice(&encode_pose(current));
            out[POSE_DIM..].copy_from_slice(&encode_pose(&relative_pose(current, goal)));
        }
        InputFormat::GoalOnly => out.copy_from_slice(&encode_pose(goal)),
        InputFormat::CurrentPlusGoal => {
            out[..POSE_DIM].copy_from_slice(&encode_pose(current));
            out[POSE_DIM..].copy_from_slice(&encode_pose(goal));
        }
        InputFormat::RelativeOnly => {
            out.copy_from_slice(&encode_pose(&relative_pose(current, goal)))
        }
    }
}
