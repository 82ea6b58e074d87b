//! Arm description: serial-chain links, joint limits, soft-segment parameters.

use super::pose::Pose;
use super::soft::SoftConfig;
use super::KinematicsError;
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JointAxis {
    X,
    Y,
    Z,
}

/// One serial-chain element: a fixed transform followed by a revolute joint.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RigidLink {
    pub offset: Pose,
    pub axis: JointAxis,
}

/// Six joint angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidConfig {
    pub joints: [f64; 6],
}

impl RigidConfig {
    pub fn new(joints: [f64; 6]) -> Self {
        Self { joints }
    }
}

/// Full arm state: rigid joints plus soft-segment curvature state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridConfig {
    pub rigid: RigidConfig,
    pub soft: SoftConfig,
}

/// Complete arm description. Loadable from JSON; `default_arm` ships a
/// desk-scale 6-DoF chain with ~0.96 m full reach.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArmGeometry {
    pub rigid_links: Vec<RigidLink>,
    /// Per-joint [lo, hi] angle bounds in radians.
    pub joint_limits: [[f64; 2]; 6],
    /// Fixed transform from the last joint frame to the flange.
    pub flange_offset: Pose,
    /// Fixed transform from the flange to the soft-segment base.
    pub soft_mount: Pose,
    /// Soft-segment arc length in meters.
    pub soft_length: f64,
    /// Length of the straight distal link used by the rigid-only variant.
    pub rigid_only_substitute_length: f64,
    /// Chamber-difference-to-curvature gain in 1/m.
    pub chamber_gain: f64,
    /// Maximum representable curvature in 1/m.
    pub kappa_max: f64,
    /// Maximum bend angle κ·l in radians.
    pub theta_max: f64,
    /// Rest joint angles (the planner / controller start posture).
    pub home_joints: [f64; 6],
    /// Rest chamber commands.
    pub home_chambers: [f64; 3],
}

impl ArmGeometry {
    pub fn default_arm() -> Self {
        let link = |off: f64, axis: JointAxis| RigidLink {
            offset: Pose::from_translation(Vector3::new(0.0, 0.0, off)),
            axis,
        };
        Self {
            rigid_links: vec![
                link(0.09, JointAxis::Z),
                link(0.06, JointAxis::Y),
                link(0.26, JointAxis::Y),
                link(0.22, JointAxis::Z),
                link(0.05, JointAxis::Y),
                link(0.05, JointAxis::Z),
            ],
            joint_limits: [
                [-0.9, 0.9],
                [0.1, 1.2],
                [0.3, 1.4],
                [0.0, 1.6],
                [0.6, 1.5],
                [0.0, 2.0],
            ],
            flange_offset: Pose::from_translation(Vector3::new(0.0, 0.0, 0.03)),
            soft_mount: Pose::identity(),
            soft_length: 0.2,
            rigid_only_substitute_length: 0.2,
            chamber_gain: 12.0,
            kappa_max: 8.0,
            theta_max: 0.75 * std::f64::consts::PI,
            home_joints: [0.0, 0.7, 0.9, 0.0, 0.6, 0.0],
            home_chambers: [0.5, 0.5, 0.5],
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self, KinematicsError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| KinematicsError::GeometryFile(format!("{}: {e}", path.display())))?;
        let geom: ArmGeometry = serde_json::from_str(&text)
            .map_err(|e| KinematicsError::GeometryFile(format!("{}: {e}", path.display())))?;
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<(), KinematicsError> {
        let bad = |msg: String| Err(KinematicsError::InvalidGeometry(msg));
        if self.rigid_links.len() != 6 {
            return bad(format!("expected 6 rigid links, got {}", self.rigid_links.len()));
        }
        let nonpositive = |v: f64| v.is_nan() || v <= 0.0;
        if nonpositive(self.soft_length) {
            return bad(format!("soft_length must be > 0, got {}", self.soft_length));
        }
        if (self.rigid_only_substitute_length - self.soft_length).abs() > 1e-12 {
            return bad("rigid_only_substitute_length must equal soft_length".into());
        }
        if nonpositive(self.chamber_gain) || nonpositive(self.kappa_max) || nonpositive(self.theta_max) {
            return bad("chamber_gain, kappa_max, theta_max must be > 0".into());
        }
        for (i, lim) in self.joint_limits.iter().enumerate() {
            if lim[0].is_nan() || lim[1].is_nan() || lim[0] >= lim[1] {
                return bad(format!("joint {i} limits [{}, {}] are not ordered", lim[0], lim[1]));
            }
        }
        self.check_rigid(&RigidConfig::new(self.home_joints))
            .map_err(|e| KinematicsError::InvalidGeometry(format!("home outside limits: {e}")))?;
        for c in self.home_chambers {
            if !(0.0..=1.0).contains(&c) {
                return bad(format!("home chamber command {c} outside [0, 1]"));
            }
        }
        for link in &self.rigid_links {
            if !link.offset.is_orthonormal(1e-9) {
                return bad("link offset rotation is not orthonormal".into());
            }
        }
        if !self.flange_offset.is_orthonormal(1e-9) || !self.soft_mount.is_orthonormal(1e-9) {
            return bad("flange_offset / soft_mount rotation is not orthonormal".into());
        }
        Ok(())
    }

    /// Check joint angles against limits.
    pub fn check_rigid(&self, rigid: &RigidConfig) -> Result<(), KinematicsError> {
        for (index, &value) in rigid.joints.iter().enumerate() {
            let [lo, hi] = self.joint_limits[index];
            if !(value >= lo && value <= hi) {
                return Err(KinematicsError::JointOutOfLimits {
                    index,
                    value,
                    lo,
                    hi,
                });
            }
        }
        Ok(())
    }

    /// Check a full configuration against joint and bend limits.
    pub fn check_config(&self, config: &HybridConfig) -> Result<(), KinematicsError> {
        self.check_rigid(&config.rigid)?;
        config.soft.check_limits(self.kappa_max, self.theta_max)
    }

    pub fn home_config(&self) -> Result<HybridConfig, KinematicsError> {
        Ok(HybridConfig {
            rigid: RigidConfig::new(self.home_joints),
            soft: super::soft::actuation_to_soft(self, self.home_chambers)?,
        })
    }
}
