use nalgebra::Vector3;

use crate::kinematics::{
    actuation_to_soft, ik_actuation, tip_pose, ArmGeometry, HybridConfig, IkOptions, Pose,
    RigidConfig, SoftConfig,
};
use crate::occupancy::OccupancyGrid;
use crate::planner::{CollisionStats, Plan};

use super::model::ControllerModel;
use super::types::Actuation;
use super::ControllerError;

/// Invert the chamber map: commands whose differential part reproduces
/// (kappa, phi), centered in [0,1]. Exact round-trip wherever the chamber
/// spread fits the unit range; curvatures beyond that saturate.
pub fn soft_to_actuation(geometry: &ArmGeometry, soft: &SoftConfig) -> [f64; 3] {
    let mut rho = soft.kappa / geometry.chamber_gain;
    let thirds = 2.0 * std::f64::consts::PI / 3.0;
    let scale = (2.0f64 / 3.0).sqrt();
    let shape: [f64; 3] = std::array::from_fn(|i| scale * (soft.phi - thirds * i as f64).cos());
    let spread = shape.iter().cloned().fold(f64::MIN, f64::max)
        - shape.iter().cloned().fold(f64::MAX, f64::min);
    if rho * spread > 1.0 {
        rho = 1.0 / spread;
    }
    let e: [f64; 3] = std::array::from_fn(|i| rho * shape[i]);
    let max_e = e.iter().cloned().fold(f64::MIN, f64::max);
    let min_e = e.iter().cloned().fold(f64::MAX, f64::min);
    let center = 0.5 - 0.5 * (max_e + min_e);
    std::array::from_fn(|i| (e[i] + center).clamp(0.0, 1.0))
}

/// Actuation that realizes a hybrid configuration on the simulated plant.
pub fn config_to_actuation(geometry: &ArmGeometry, config: &HybridConfig) -> Actuation {
    Actuation {
        rigid_targets: config.rigid.joints,
        soft_commands: soft_to_actuation(geometry, &config.soft),
    }
}

/// The simulation plant: an actuation maps instantaneously through the
/// kinematics to a configuration (commands are clamped first).
pub fn actuation_to_config(
    geometry: &ArmGeometry,
    actuation: &Actuation,
) -> Result<HybridConfig, ControllerError> {
    let u = actuation.clamped(geometry);
    Ok(HybridConfig {
        rigid: RigidConfig::new(u.rigid_targets),
        soft: actuation_to_soft(geometry, u.soft_commands)?,
    })
}

/// Anything that can command the arm toward a target tip pose given the
/// current tip pose and the last applied actuation.
pub trait WaypointController {
    fn command(
        &self,
        geometry: &ArmGeometry,
        current: &Pose,
        target: &Pose,
        last: &Actuation,
    ) -> Actuation;
}

impl WaypointController for ControllerModel {
    fn command(
        &self,
        _geometry: &ArmGeometry,
        current: &Pose,
        target: &Pose,
        _last: &Actuation,
    ) -> Actuation {
        self.infer(current, target)
    }
}

/// Ground-truth baseline: damped-least-squares IK through the full forward
/// kinematics, warm-started from the last applied actuation.
#[derive(Debug, Clone)]
pub struct OracleController {
    pub options: IkOptions,
}

impl Default for OracleController {
    fn default() -> Self {
        Self {
            options: IkOptions {
                position_tolerance: 1e-4,
                axis_tolerance: 1e-3,
                ..IkOptions::default()
            },
        }
    }
}

impl WaypointController for OracleController {
    fn command(
        &self,
        geometry: &ArmGeometry,
        _current: &Pose,
        target: &Pose,
        last: &Actuation,
    ) -> Actuation {
        match ik_actuation(geometry, &last.as_array(), target, &self.options) {
            Ok(outcome) => Actuation::from_array(&outcome.solution),
            Err(_) => *last,
        }
    }
}

/// Best-effort actuation whose forward-kinematics tip pose matches `target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub actuation: Actuation,
    pub position_error: f64,
    pub axis_error: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn oracle_actuation(
    geometry: &ArmGeometry,
    target_tip: &Pose,
    init: &Actuation,
) -> Result<OracleResult, ControllerError> {
    let opts = OracleController::default().options;
    let outcome = ik_actuation(geometry, &init.as_array(), target_tip, &opts)?;
    Ok(OracleResult {
        actuation: Actuation::from_array(&outcome.solution),
        position_error: outcome.position_error,
        axis_error: outcome.axis_error,
        iterations: outcome.iterations,
        converged: outcome.converged,
    })
}

/// One applied command during execution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub waypoint: usize,
    pub actuation: Actuation,
    pub tip_position: [f64; 3],
    /// Distance from the active waypoint's tip position after the command.
    pub position_error: f64,
    pub stats: CollisionStats,
}

/// Outcome of tracking a plan's waypoints closed-loop.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionTrace {
    /// Every waypoint loop ended within tolerance.
    pub reached: bool,
    /// Tip position error when each waypoint's loop ended.
    pub waypoint_errors: Vec<f64>,
    pub final_tip: [f64; 3],
    pub final_tip_pose: Pose,
    /// Collision stats of every visited configuration, starting posture first.
    pub contacts: Vec<CollisionStats>,
    pub steps: Vec<StepRecord>,
}

impl ExecutionTrace {
    pub fn max_rigid_contacts(&self) -> usize {
        self.contacts.iter().map(|s| s.c_rigid).max().unwrap_or(0)
    }

    pub fn max_soft_contacts(&self) -> usize {
        self.contacts.iter().map(|s| s.c_soft).max().unwrap_or(0)
    }
}

/// Track each waypoint's tip pose with pose feedback: read the simulated tip,
/// command toward the waypoint, apply, until within `tolerance` meters or
/// `max_steps_per_waypoint` commands; then move on regardless and record how
/// close the loop got.
pub fn execute_waypoints<C: WaypointController>(
    plan: &Plan,
    controller: &C,
    geometry: &ArmGeometry,
    grid: &OccupancyGrid,
    tolerance: f64,
    max_steps_per_waypoint: usize,
) -> Result<ExecutionTrace, ControllerError> {
    if plan.waypoints.is_empty() {
        return Err(ControllerError::InvalidConfig(
            "plan has no waypoints to execute".into(),
        ));
    }
    if !tolerance.is_finite() || tolerance <= 0.0 || max_steps_per_waypoint == 0 {
        return Err(ControllerError::InvalidConfig(
            "tolerance must be positive and max_steps_per_waypoint >= 1".into(),
        ));
    }
    let targets = plan
        .tip_poses(geometry)
        .map_err(|e| ControllerError::InvalidConfig(format!("plan does not evaluate: {e}")))?;
    let n_backbone = plan.config.n_backbone;

    let mut u = config_to_actuation(geometry, &plan.waypoints[0]);
    let mut config = actuation_to_config(geometry, &u)?;
    let mut pose = tip_pose(geometry, &config)?;
    let mut contacts = vec![plan.model.count(grid, geometry, &config, n_backbone)?];
    let mut steps = Vec::new();
    let mut waypoint_errors = Vec::with_capacity(targets.len());
    let mut reached = true;

    for (w, target) in targets.iter().enumerate() {
        let mut err = (pose.translation - target.translation).norm();
        for _ in 0..max_steps_per_waypoint {
            if err < tolerance {
                break;
            }
            u = controller.command(geometry, &pose, target, &u).clamped(geometry);
            config = actuation_to_config(geometry, &u)?;
            pose = tip_pose(geometry, &config)?;
            let stats = plan.model.count(grid, geometry, &config, n_backbone)?;
            contacts.push(stats);
            err = (pose.translation - target.translation).norm();
            steps.push(StepRecord {
                waypoint: w,
                actuation: u,
                tip_position: [pose.translation.x, pose.translation.y, pose.translation.z],
                position_error: err,
                stats,
            });
        }
        waypoint_errors.push(err);
        if err >= tolerance {
            reached = false;
        }
    }

    let final_tip: Vector3<f64> = pose.translation;
    Ok(ExecutionTrace {
        reached,
        waypoint_errors,
        final_tip: [final_tip.x, final_tip.y, final_tip.z],
        final_tip_pose: pose,
        contacts,
        steps,
    })
}
