use std::time::Instant;

use nalgebra::Vector3;

use super::types::{Method, StageTimings, TrialConfig, TrialController, TrialResult};
use super::HarnessError;
use crate::controller::{
    execute_waypoints, Actuation, ExecutionTrace, OracleController, WaypointController,
};
use crate::kinematics::{
    actuation_to_soft, ik_rigid_only, tip_pose, ArmGeometry, HybridConfig, IkOptions, Pose,
    RigidConfig,
};
use crate::occupancy::{goal_candidates, rasterize_scene, OccupancyGrid, SceneSpec};
use crate::planner::{
    plan, plan_end_effector_only, plan_rigid_only, validate_plan, Plan, PlannerError,
};

/// Rest configuration of the arm: home joints plus home chamber commands.
pub fn home_config(geometry: &ArmGeometry) -> Result<HybridConfig, HarnessError> {
    Ok(HybridConfig {
        rigid: RigidConfig::new(geometry.home_joints),
        soft: actuation_to_soft(geometry, geometry.home_chambers)?,
    })
}

/// Waypoint tracker for the rigid-only arm: damped-least-squares over the six
/// joints, chambers pinned at home (the substitute link cannot bend).
#[derive(Debug, Clone)]
pub struct RigidOnlyOracle {
    pub options: IkOptions,
}

impl Default for RigidOnlyOracle {
    fn default() -> Self {
        Self {
            options: IkOptions {
                max_iterations: 40,
                position_tolerance: 1e-4,
                axis_tolerance: 1e-3,
                axis_weight: 0.0,
                ..IkOptions::default()
            },
        }
    }
}

impl WaypointController for RigidOnlyOracle {
    fn command(
        &self,
        geometry: &ArmGeometry,
        _current: &Pose,
        target: &Pose,
        last: &Actuation,
    ) -> Actuation {
        let seed = RigidConfig::new(last.joints);
        let joints = match ik_rigid_only(geometry, &seed, target, &self.options) {
            Ok(outcome) => outcome.solution.joints,
            Err(_) => last.joints,
        };
        Actuation {
            joints,
            chambers: geometry.home_chambers,
        }
    }
}

fn plan_for_method(
    method: Method,
    start: &HybridConfig,
    goals: &[crate::occupancy::GoalCandidate],
    grid: &OccupancyGrid,
    geometry: &ArmGeometry,
    cfg: &TrialConfig,
    seed: u64,
) -> Result<Plan, PlannerError> {
    match method {
        Method::Ours | Method::OracleController => {
            plan(start, goals, grid, geometry, &cfg.planner, seed)
        }
        Method::NoShape => plan_end_effector_only(start, goals, grid, geometry, &cfg.planner, seed),
        Method::RigidOnly => plan_rigid_only(start, goals, grid, geometry, &cfg.planner, seed),
    }
}

fn execute_for_method(
    method: Method,
    plan: &Plan,
    controller: &TrialController<'_>,
    geometry: &ArmGeometry,
    grid: &OccupancyGrid,
    cfg: &TrialConfig,
) -> Result<ExecutionTrace, HarnessError> {
    let trace = match method {
        Method::RigidOnly => execute_waypoints(
            plan,
            &RigidOnlyOracle::default(),
            geometry,
            grid,
            cfg.waypoint_tolerance,
            cfg.max_steps_per_waypoint,
        )?,
        Method::OracleController => execute_waypoints(
            plan,
            &OracleController::default(),
            geometry,
            grid,
            cfg.waypoint_tolerance,
            cfg.max_steps_per_waypoint,
        )?,
        Method::Ours | Method::NoShape => match controller {
            TrialController::Learned(model) => execute_waypoints(
                plan,
                *model,
                geometry,
                grid,
                cfg.waypoint_tolerance,
                cfg.max_steps_per_waypoint,
            )?,
            TrialController::Oracle(opts) => execute_waypoints(
                plan,
                &OracleController { options: *opts },
                geometry,
                grid,
                cfg.waypoint_tolerance,
                cfg.max_steps_per_waypoint,
            )?,
        },
    };
    Ok(trace)
}

/// Run one seeded end-to-end trial: rasterize the scene, derive goal
/// candidates, plan with the method's variant, shortcut, execute closed-loop,
/// and score the outcome. Failures are recorded in the result, never raised;
/// errors are reserved for invalid configuration or broken inputs.
pub fn run_trial(
    scene: &SceneSpec,
    method: Method,
    controller: &TrialController<'_>,
    geometry: &ArmGeometry,
    cfg: &TrialConfig,
    seed: u64,
) -> Result<TrialResult, HarnessError> {
    cfg.validate()?;
    geometry.validate()?;

    let t_start = Instant::now();
    let grid = rasterize_scene(scene, cfg.voxel_size)?;
    let start = home_config(geometry)?;
    let home_tip_pose = tip_pose(geometry, &start)?;
    let home_tip = home_tip_pose.translation;
    let goal = scene.goal();
    let init_delta = (home_tip - goal).norm();
    let scene_s = t_start.elapsed().as_secs_f64();

    let mut result = TrialResult {
        archetype: scene.archetype,
        scene_seed: scene.seed,
        trial_seed: seed,
        method,
        tau: cfg.planner.tau,
        plan_found: false,
        success_2cm: false,
        success_touch: false,
        trans_err: init_delta,
        init_delta,
        rigid_contact_violations: 0,
        plan_soft_contacts: 0,
        plan_cost: 0.0,
        n_waypoints: 0,
        execution_reached: false,
        timings: StageTimings::default(),
    };

    let goals = goal_candidates(&goal, cfg.standoff, &grid, &home_tip);
    let t_plan = Instant::now();
    let planned = if goals.is_empty() {
        None
    } else {
        plan_for_method(method, &start, &goals, &grid, geometry, cfg, seed).ok()
    };
    let planned = match planned {
        None => {
            // the arm never moves; score the resting tip
            result.timings = StageTimings {
                scene_s,
                plan_s: t_plan.elapsed().as_secs_f64(),
                execute_s: 0.0,
                total_s: t_start.elapsed().as_secs_f64(),
            };
            score(&mut result, &grid, &home_tip, &goal);
            return Ok(result);
        }
        Some(p) => p,
    };
    let planned = if cfg.shortcut && cfg.planner.shortcut_attempts > 0 {
        crate::planner::shortcut(
            &planned,
            &grid,
            geometry,
            crate::seed::mix_seed(seed, &[7]),
            cfg.planner.shortcut_attempts,
        )?
    } else {
        planned
    };
    let plan_s = t_plan.elapsed().as_secs_f64();

    result.plan_found = true;
    result.plan_cost = planned.cost;
    result.n_waypoints = planned.waypoints.len();
    result.plan_soft_contacts = planned.stats.iter().map(|s| s.c_soft).sum();

    // recheck against the physically honest model: the full backbone for the
    // real arm, the straight substitute for the rigid-only arm
    let recheck_model = match method {
        Method::RigidOnly => crate::planner::CollisionModel::RigidSubstitute,
        _ => crate::planner::CollisionModel::FullBackbone,
    };
    let report = validate_plan(
        &planned,
        &grid,
        geometry,
        Some(&start),
        Some(&goals),
        Some(recheck_model),
    )?;
    result.rigid_contact_violations = report.violations;

    let t_exec = Instant::now();
    let trace = execute_for_method(method, &planned, controller, geometry, &grid, cfg)?;
    let execute_s = t_exec.elapsed().as_secs_f64();

    result.execution_reached = trace.reached;
    let final_tip = Vector3::from_column_slice(&trace.final_tip);
    score(&mut result, &grid, &final_tip, &goal);
    result.timings = StageTimings {
        scene_s,
        plan_s,
        execute_s,
        total_s: t_start.elapsed().as_secs_f64(),
    };
    Ok(result)
}

/// Success metrics from a final tip position: translation error, the 2 cm
/// criterion gated on a clear tip-to-goal ray, and voxel-dilated touch.
fn score(result: &mut TrialResult, grid: &OccupancyGrid, tip: &Vector3<f64>, goal: &Vector3<f64>) {
    result.trans_err = (tip - goal).norm();
    let sight = !grid.segment_hits_occupied(tip, goal);
    result.success_2cm = result.trans_err <= 0.02 && sight;
    result.success_touch = match grid.voxel_index(goal) {
        Some(goal_idx) => grid.dilated_contains(goal_idx, tip, 1),
        None => false,
    };
}

/// Configuration the execution layer starts from when replaying a plan.
pub fn start_actuation(geometry: &ArmGeometry) -> Actuation {
    Actuation {
        joints: geometry.home_joints,
        chambers: geometry.home_chambers,
    }
}
