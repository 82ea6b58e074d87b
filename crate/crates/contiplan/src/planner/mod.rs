//! Sampling-based planner for the hybrid arm: RRT* over (joints, curvature,
//! bend plane) with asymmetric collision feasibility, cost rewiring, and
//! shortcut post-processing.

mod collision;
mod config;
mod edge;
mod metric;
mod rrt;
mod shortcut;
mod validate;

pub use collision::{
    collision_count, collision_count_rigid_only, collision_count_tip_only, feasible,
    CollisionModel, CollisionStats,
};
pub use config::{PlannerConfig, TauMode};
pub use edge::{edge_check, edge_feasible, EdgeCheck};
pub use metric::{clamp_config, config_distance, interpolate, steer};
pub use rrt::{plan, plan_end_effector_only, plan_rigid_only, Plan};
pub use shortcut::shortcut;
pub use validate::{validate_plan, ValidationReport};

use crate::kinematics::KinematicsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("invalid planner config: {0}")]
    InvalidConfig(String),
    #[error("start configuration is infeasible: c_rigid={c_rigid}, c_soft={c_soft}")]
    InfeasibleStart { c_rigid: usize, c_soft: usize },
    #[error("no goal candidates supplied")]
    NoGoalCandidates,
    #[error("no plan found after {iterations} iterations")]
    NoPlanFound { iterations: usize },
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}
