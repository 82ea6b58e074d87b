//! Rigid-body transforms: orthonormal rotation plus translation in meters.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

/// A rigid-body transform. Rotation must stay orthonormal with `det = +1`.
/// Serializes with the rotation as row-major nested arrays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "PoseRepr", into = "PoseRepr")]
pub struct Pose {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

#[derive(Serialize, Deserialize)]
struct PoseRepr {
    rotation: [[f64; 3]; 3],
    translation: [f64; 3],
}

impl From<PoseRepr> for Pose {
    fn from(r: PoseRepr) -> Self {
        Pose {
            rotation: Matrix3::from_fn(|i, j| r.rotation[i][j]),
            translation: Vector3::from_column_slice(&r.translation),
        }
    }
}

impl From<Pose> for PoseRepr {
    fn from(p: Pose) -> Self {
        PoseRepr {
            rotation: [
                [p.rotation[(0, 0)], p.rotation[(0, 1)], p.rotation[(0, 2)]],
                [p.rotation[(1, 0)], p.rotation[(1, 1)], p.rotation[(1, 2)]],
                [p.rotation[(2, 0)], p.rotation[(2, 1)], p.rotation[(2, 2)]],
            ],
            translation: [p.translation.x, p.translation.y, p.translation.z],
        }
    }
}

impl Pose {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation,
        }
    }

    /// `self ∘ other`: apply `other` in the frame reached by `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.translation + self.rotation * other.translation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// `self⁻¹ ∘ other`: `other` expressed in this pose's frame.
    pub fn relative_to(&self, other: &Pose) -> Pose {
        self.inverse().compose(other)
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// Max-norm residual of `RᵀR − I`, zero for a perfect rotation.
    pub fn orthonormality_residual(&self) -> f64 {
        let r = self.rotation.transpose() * self.rotation - Matrix3::identity();
        r.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_orthonormal(&self, tol: f64) -> bool {
        self.orthonormality_residual() < tol && (self.rotation.determinant() - 1.0).abs() < tol
    }
}

/// Rotation about the world z-axis.
pub fn rot_z(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Rotation about the world y-axis.
pub fn rot_y(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Rotation about the world x-axis.
pub fn rot_x(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}
