//! Learned closed-loop controller: actuation-sweep data collection, input
//! encoding, feedforward network with hand-rolled backprop, training,
//! inference, and closed-loop waypoint execution against the simulated plant.

mod dataset;
mod execute;
mod features;
mod model;
mod net;
mod train;
mod types;

pub use dataset::{
    collect_sweep, collect_sweep_with_cap, nearest_neighbors, Dataset, CSV_COLUMNS,
    DEFAULT_SWEEP_CAP,
};
pub use execute::{
    actuation_to_config, config_to_actuation, execute_waypoints, oracle_actuation,
    soft_to_actuation, ExecutionTrace, OracleController, OracleResult, StepRecord,
    WaypointController,
};
pub use features::{
    build_input, build_input_into, encode_pose, input_dim, relative_pose, POSE_DIM,
};
pub use model::ControllerModel;
pub use net::{desk_architecture, gradient_check, Net};
pub use train::{train, train_with_history, NormStats, TrainHistory, TrainLogEntry};
pub use types::{
    Actuation, GoalPairing, InputFormat, LrSchedule, MixWeights, Optimizer, PoseSample,
    TrainConfig,
};

use crate::kinematics::KinematicsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ControllerError {
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("sweep too large: {requested} samples exceed cap {cap}")]
    SweepTooLarge { requested: usize, cap: usize },
    #[error("dataset too small: {n} samples, need at least {min}")]
    DatasetTooSmall { n: usize, min: usize },
    #[error("training diverged at step {step}: loss {loss}")]
    TrainingDiverged { step: usize, loss: f64 },
    #[error("input format mismatch: model is {model}, request is {request}")]
    FormatMismatch { model: String, request: String },
    #[error("model file error: {0}")]
    ModelFile(String),
    #[error("unsupported model file version {found}, expected {expected}")]
    ModelVersion { found: u32, expected: u32 },
    #[error("dataset file error: {0}")]
    DatasetFile(String),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}
