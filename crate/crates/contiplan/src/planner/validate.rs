use super::collision::{CollisionModel, CollisionStats};
use super::config::TauMode;
use super::metric::{config_distance, interpolate};
use super::rrt::Plan;
use super::PlannerError;
use crate::kinematics::{tip_pose, ArmGeometry, HybridConfig};
use crate::occupancy::{GoalCandidate, OccupancyGrid};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checked_configs: usize,
    /// Configurations violating the feasibility rule (per-config mode) or
    /// rigid contacts plus budget overruns (per-path mode).
    pub violations: usize,
    pub worst: CollisionStats,
    /// Endpoint invariants: first waypoint is the expected start, last
    /// waypoint's tip matches a goal candidate within tolerance.
    pub endpoints_ok: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.endpoints_ok
    }
}

/// Recheck every waypoint and re-interpolate every edge at 10x the planner's
/// collision resolution. Written against the plan contract, not the planner
/// internals, so it exercises an independent code path.
pub fn validate_plan(
    plan: &Plan,
    grid: &OccupancyGrid,
    geometry: &ArmGeometry,
    start: Option<&HybridConfig>,
    goals: Option<&[GoalCandidate]>,
    model_override: Option<CollisionModel>,
) -> Result<ValidationReport, PlannerError> {
    if plan.waypoints.is_empty() {
        return Err(PlannerError::InvalidPlan("plan has no waypoints".into()));
    }
    let cfg = &plan.config;
    let model = model_override.unwrap_or(plan.model);
    let resolution = cfg.edge_check_resolution / 10.0;

    let mut checked = 0;
    let mut violations = 0;
    let mut worst = CollisionStats::default();
    let mut path_budget = 0usize;

    let mut audit = |q: &HybridConfig| -> Result<CollisionStats, PlannerError> {
        let stats = model.count(grid, geometry, q, cfg.n_backbone)?;
        checked += 1;
        worst = worst.max(&stats);
        match cfg.tau_mode {
            TauMode::PerConfig => {
                if stats.c_rigid > 0 || stats.c_soft > cfg.tau {
                    violations += 1;
                }
            }
            TauMode::PerPath => {
                if stats.c_rigid > 0 {
                    violations += 1;
                }
            }
        }
        Ok(stats)
    };

    let first_stats = audit(&plan.waypoints[0])?;
    path_budget += first_stats.c_soft;
    for pair in plan.waypoints.windows(2) {
        let d = config_distance(&pair[0], &pair[1], &cfg.metric_weights);
        let n_steps = (d / resolution).ceil().max(1.0) as usize;
        let mut edge_worst = CollisionStats::default();
        for k in 1..=n_steps {
            let q = interpolate(&pair[0], &pair[1], k as f64 / n_steps as f64);
            let stats = audit(&q)?;
            edge_worst = edge_worst.max(&stats);
        }
        path_budget += edge_worst.c_soft;
    }
    if cfg.tau_mode == TauMode::PerPath && path_budget > cfg.tau {
        violations += 1;
    }

    let mut endpoints_ok = true;
    if let Some(s) = start {
        endpoints_ok &= plan.waypoints[0] == *s;
    }
    if let Some(goals) = goals {
        let tip = tip_pose(geometry, plan.waypoints.last().expect("non-empty"))?;
        endpoints_ok &= goals.iter().any(|g| {
            let dp = (tip.translation - g.pose.translation).norm();
            let zc: Vector3<f64> = tip.rotation.column(2).into_owned();
            let zg: Vector3<f64> = g.pose.rotation.column(2).into_owned();
            dp <= cfg.goal_position_tolerance
                && zc.dot(&zg).clamp(-1.0, 1.0).acos() <= cfg.goal_axis_tolerance
        });
    }

    Ok(ValidationReport {
        checked_configs: checked,
        violations,
        worst,
        endpoints_ok,
    })
}
