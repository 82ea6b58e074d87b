//! Constant-curvature soft segment and the three-chamber actuation model.

use super::geometry::ArmGeometry;
use super::pose::{rot_y, rot_z, Pose};
use super::KinematicsError;
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// Bend angle below which the transform switches to its series limit.
const SERIES_SWITCH: f64 = 1e-6;

/// Constant-curvature segment state: curvature, bending-plane angle, arc length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftConfig {
    /// Curvature in 1/m, ≥ 0.
    pub kappa: f64,
    /// Bending-plane angle in radians, kept in [−π, π).
    pub phi: f64,
    /// Arc length in meters, > 0, fixed per arm.
    pub arc_length: f64,
}

impl SoftConfig {
    pub fn new(kappa: f64, phi: f64, arc_length: f64) -> Result<Self, KinematicsError> {
        let cfg = Self {
            kappa,
            phi: wrap_angle(phi),
            arc_length,
        };
        cfg.check_domain()?;
        Ok(cfg)
    }

    pub fn straight(arc_length: f64) -> Result<Self, KinematicsError> {
        Self::new(0.0, 0.0, arc_length)
    }

    fn check_domain(&self) -> Result<(), KinematicsError> {
        if self.kappa.is_nan() || self.kappa < 0.0 {
            return Err(KinematicsError::NegativeCurvature(self.kappa));
        }
        if self.arc_length.is_nan() || self.arc_length <= 0.0 {
            return Err(KinematicsError::NonPositiveArcLength(self.arc_length));
        }
        Ok(())
    }

    /// Check the configured limits: κ ≤ kappa_max and κ·l ≤ theta_max.
    pub fn check_limits(&self, kappa_max: f64, theta_max: f64) -> Result<(), KinematicsError> {
        self.check_domain()?;
        if self.kappa > kappa_max {
            return Err(KinematicsError::CurvatureLimitExceeded {
                kappa: self.kappa,
                max: kappa_max,
            });
        }
        let bend = self.kappa * self.arc_length;
        if bend > theta_max {
            return Err(KinematicsError::BendLimitExceeded {
                bend,
                max: theta_max,
            });
        }
        Ok(())
    }
}

/// Wrap an angle into [−π, π).
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

/// Base-to-tip transform of the soft segment.
///
/// Translation follows the circular-arc model; rotation is the orthonormal
/// form `Rz(φ)·Ry(−κl)·Rz(−φ)` whose tangent matches the translation column
/// (bending toward −x at φ = 0). Below a bend angle of 1e-6 rad the
/// translation switches to its series limit to avoid the 1/κ singularity.
pub fn soft_transform(soft: &SoftConfig) -> Result<Pose, KinematicsError> {
    soft.check_domain()?;
    let SoftConfig {
        kappa,
        phi,
        arc_length: l,
    } = *soft;
    let bend = kappa * l;
    let (sin_phi, cos_phi) = phi.sin_cos();
    let translation = if bend < SERIES_SWITCH {
        let sag = kappa * l * l / 2.0;
        Vector3::new(-sag * cos_phi, -sag * sin_phi, l)
    } else {
        let r = 1.0 / kappa;
        Vector3::new(
            -r * cos_phi * (1.0 - bend.cos()),
            -r * sin_phi * (1.0 - bend.cos()),
            r * bend.sin(),
        )
    };
    let rotation = rot_z(phi) * rot_y(-bend) * rot_z(-phi);
    Ok(Pose::new(rotation, translation))
}

/// Map three normalized chamber commands in [0,1] to a constant-curvature
/// state via the standard 120°-chamber model: with e = commands − mean,
/// φ = atan2(√3(e₂−e₃), 2e₁−e₂−e₃) and κ = gain·‖e‖ clamped to [0, kappa_max].
/// Symmetric inflation (κ = 0) returns φ = 0 by convention.
pub fn actuation_to_soft(
    geometry: &ArmGeometry,
    commands: [f64; 3],
) -> Result<SoftConfig, KinematicsError> {
    for (index, &value) in commands.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(KinematicsError::ChamberOutOfRange { index, value });
        }
    }
    let mean = (commands[0] + commands[1] + commands[2]) / 3.0;
    let e = [commands[0] - mean, commands[1] - mean, commands[2] - mean];
    let norm = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
    let kappa = (geometry.chamber_gain * norm).min(geometry.kappa_max);
    if kappa < 1e-12 {
        return SoftConfig::new(0.0, 0.0, geometry.soft_length);
    }
    let phi = wrap_angle((3.0f64.sqrt() * (e[1] - e[2])).atan2(2.0 * e[0] - e[1] - e[2]));
    SoftConfig::new(kappa, phi, geometry.soft_length)
}
