//! Forward kinematics of the hybrid arm: rigid serial chain, constant-curvature
//! soft segment, chamber actuation model, and uniform backbone discretization.

mod chain;
mod geometry;
mod ik;
mod pose;
mod soft;

pub use chain::{
    flange_pose, hybrid_backbone, rigid_forward, rigid_only_backbone, rigid_only_tip_pose,
    tip_pose, BackboneSample, SegmentTag,
};
pub use geometry::{ArmGeometry, HybridConfig, JointAxis, RigidConfig, RigidLink};
pub use ik::{ik_actuation, ik_hybrid, ik_rigid_only, kappa_ceiling, IkOptions, IkOutcome};
pub use pose::{rot_x, rot_y, rot_z, Pose};
pub use soft::{actuation_to_soft, soft_transform, wrap_angle, SoftConfig};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KinematicsError {
    #[error("curvature must be non-negative, got {0}")]
    NegativeCurvature(f64),
    #[error("arc length must be positive, got {0}")]
    NonPositiveArcLength(f64),
    #[error("bend angle {bend:.6} rad exceeds limit {max:.6} rad")]
    BendLimitExceeded { bend: f64, max: f64 },
    #[error("curvature {kappa:.6} exceeds limit {max:.6}")]
    CurvatureLimitExceeded { kappa: f64, max: f64 },
    #[error("joint {index} angle {value:.6} outside [{lo:.6}, {hi:.6}]")]
    JointOutOfLimits {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("chamber {index} command {value:.6} outside [0, 1]")]
    ChamberOutOfRange { index: usize, value: f64 },
    #[error("backbone needs at least 2 points, got {0}")]
    TooFewBackbonePoints(usize),
    #[error("invalid arm geometry: {0}")]
    InvalidGeometry(String),
    #[error("geometry file error: {0}")]
    GeometryFile(String),
}
