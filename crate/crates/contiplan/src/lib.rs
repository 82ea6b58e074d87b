//! Shape-aware planning and learned control for a hybrid rigid-soft arm.
//!
//! The crate is organized as five layers:
//! - [`kinematics`]: rigid-chain FK, constant-curvature soft segment, backbone sampling.
//! - [`occupancy`]: voxel grids, point-cloud rasterization, scene generation, goal candidates.
//! - [`planner`]: shape-aware sampling-based planning with asymmetric contact budgets.
//! - [`controller`]: sweep data collection, feedforward-network training, closed-loop execution.
//! - [`harness`]: end-to-end trials, metrics, baselines, ablations, deterministic suites.

pub mod controller;
pub mod kinematics;
pub mod occupancy;
pub mod planner;
pub mod seed;
