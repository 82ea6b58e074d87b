//! End-to-end experiment runner: scene -> goal candidates -> plan -> execute,
//! with the success metrics, baselines, ablations, and tau sweeps, plus
//! deterministic machine-readable outputs.

mod reach;
mod summary;
mod suite;
mod trial;
mod types;

pub use reach::{
    format_report_csv, input_format_ablation, median, reach_errors, sample_reach_goals,
    track_reach_goal, trial_biases, FormatReport, ReachConfig, ReachGoal, ReachOutcome,
};
pub use summary::{summarize, summary_csv, trials_csv, SUMMARY_CSV_HEADER, TRIALS_CSV_HEADER};
pub use suite::{
    ablation_suite, run_suite, tau_profile, tau_sweep, write_outcome, write_sidecar, AblationKind,
    SuiteConfig, SuiteOutcome, TauPoint,
};
pub use trial::{home_config, run_trial, start_actuation, RigidOnlyOracle};
pub use types::{
    Method, MetricsSummary, StageTimings, TrialConfig, TrialController, TrialResult,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid harness configuration: {0}")]
    InvalidConfig(String),
    #[error("summarize called with no results")]
    EmptyResults,
    #[error("goal {index} not reachable after {attempts} scene redraws")]
    GoalSampling { index: usize, attempts: usize },
    #[error("result io: {0}")]
    Io(String),
    #[error(transparent)]
    Kinematics(#[from] crate::kinematics::KinematicsError),
    #[error(transparent)]
    Occupancy(#[from] crate::occupancy::OccupancyError),
    #[error(transparent)]
    Planner(#[from] crate::planner::PlannerError),
    #[error(transparent)]
    Controller(#[from] crate::controller::ControllerError),
}
