//! Serial-chain forward kinematics and uniform backbone discretization.

use super::geometry::{ArmGeometry, HybridConfig, JointAxis, RigidConfig};
use super::pose::{rot_x, rot_y, rot_z, Pose};
use super::soft::{soft_transform, SoftConfig};
use super::KinematicsError;
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentTag {
    Rigid,
    Soft,
}

/// Uniformly spaced backbone points, base→tip, with per-point segment tags.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BackboneSample {
    pub points: Vec<Vector3<f64>>,
    pub tags: Vec<SegmentTag>,
    pub tip_pose: Pose,
}

fn joint_rotation(axis: JointAxis, angle: f64) -> Pose {
    let rotation = match axis {
        JointAxis::X => rot_x(angle),
        JointAxis::Y => rot_y(angle),
        JointAxis::Z => rot_z(angle),
    };
    Pose::new(rotation, Vector3::zeros())
}

/// Serial-chain FK: returns one pose per joint frame plus the flange pose.
pub fn rigid_forward(
    geometry: &ArmGeometry,
    rigid: &RigidConfig,
) -> Result<Vec<Pose>, KinematicsError> {
    geometry.check_rigid(rigid)?;
    let mut poses = Vec::with_capacity(geometry.rigid_links.len() + 1);
    let mut current = Pose::identity();
    for (link, &angle) in geometry.rigid_links.iter().zip(&rigid.joints) {
        current = current
            .compose(&link.offset)
            .compose(&joint_rotation(link.axis, angle));
        poses.push(current);
    }
    poses.push(current.compose(&geometry.flange_offset));
    Ok(poses)
}

/// Flange pose only (last frame of `rigid_forward`).
pub fn flange_pose(geometry: &ArmGeometry, rigid: &RigidConfig) -> Result<Pose, KinematicsError> {
    Ok(*rigid_forward(geometry, rigid)?
        .last()
        .expect("chain has at least the flange"))
}

/// Tip pose of the hybrid arm: flange ∘ soft_mount ∘ soft_transform.
pub fn tip_pose(geometry: &ArmGeometry, config: &HybridConfig) -> Result<Pose, KinematicsError> {
    let flange = flange_pose(geometry, &config.rigid)?;
    Ok(flange
        .compose(&geometry.soft_mount)
        .compose(&soft_transform(&config.soft)?))
}

/// Tip pose of the rigid-only variant: the soft segment replaced by a straight
/// link of equal length.
pub fn rigid_only_tip_pose(
    geometry: &ArmGeometry,
    rigid: &RigidConfig,
) -> Result<Pose, KinematicsError> {
    let flange = flange_pose(geometry, rigid)?;
    Ok(flange.compose(&geometry.soft_mount).compose(&Pose::from_translation(
        Vector3::new(0.0, 0.0, geometry.rigid_only_substitute_length),
    )))
}

struct Polyline {
    vertices: Vec<Vector3<f64>>,
    cumulative: Vec<f64>,
}

impl Polyline {
    fn new(vertices: Vec<Vector3<f64>>) -> Self {
        let mut cumulative = Vec::with_capacity(vertices.len());
        let mut total = 0.0;
        cumulative.push(0.0);
        for pair in vertices.windows(2) {
            total += (pair[1] - pair[0]).norm();
            cumulative.push(total);
        }
        Self {
            vertices,
            cumulative,
        }
    }

    fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn point_at(&self, s: f64) -> Vector3<f64> {
        let s = s.clamp(0.0, self.length());
        let idx = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&s).unwrap())
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        if idx + 1 >= self.vertices.len() {
            return self.vertices[idx];
        }
        let seg = self.cumulative[idx + 1] - self.cumulative[idx];
        if seg <= 0.0 {
            return self.vertices[idx];
        }
        let f = (s - self.cumulative[idx]) / seg;
        self.vertices[idx] + (self.vertices[idx + 1] - self.vertices[idx]) * f
    }
}

fn rigid_polyline(geometry: &ArmGeometry, rigid: &RigidConfig) -> Result<(Polyline, Pose), KinematicsError> {
    let frames = rigid_forward(geometry, rigid)?;
    let mut vertices = vec![Vector3::zeros()];
    vertices.extend(frames.iter().map(|p| p.translation));
    let flange = *frames.last().unwrap();
    let soft_base = flange.compose(&geometry.soft_mount);
    if (soft_base.translation - flange.translation).norm() > 1e-12 {
        vertices.push(soft_base.translation);
    }
    Ok((Polyline::new(vertices), soft_base))
}

fn sample_backbone(
    rigid_line: &Polyline,
    distal_len: f64,
    distal_point: impl Fn(f64) -> Vector3<f64>,
    distal_tag: SegmentTag,
    tip_pose: Pose,
    n_total: usize,
) -> Result<BackboneSample, KinematicsError> {
    if n_total < 2 {
        return Err(KinematicsError::TooFewBackbonePoints(n_total));
    }
    let rigid_len = rigid_line.length();
    let total = rigid_len + distal_len;
    let spacing = total / (n_total - 1) as f64;
    let mut points = Vec::with_capacity(n_total);
    let mut tags = Vec::with_capacity(n_total);
    for k in 0..n_total {
        let s = if k + 1 == n_total {
            total
        } else {
            spacing * k as f64
        };
        if s <= rigid_len {
            points.push(rigid_line.point_at(s));
            tags.push(SegmentTag::Rigid);
        } else {
            let fraction = ((s - rigid_len) / distal_len).min(1.0);
            points.push(distal_point(fraction));
            tags.push(distal_tag);
        }
    }
    Ok(BackboneSample {
        points,
        tags,
        tip_pose,
    })
}

/// `n_total` points uniformly spaced by arc length over the whole chain
/// (rigid links, then the soft arc), tagged by segment.
pub fn hybrid_backbone(
    geometry: &ArmGeometry,
    config: &HybridConfig,
    n_total: usize,
) -> Result<BackboneSample, KinematicsError> {
    let (line, soft_base) = rigid_polyline(geometry, &config.rigid)?;
    let full = soft_transform(&config.soft)?;
    let l = config.soft.arc_length;
    let soft = config.soft;
    let distal_point = move |fraction: f64| {
        let partial = SoftConfig {
            kappa: soft.kappa,
            phi: soft.phi,
            arc_length: fraction * l,
        };
        let local = soft_transform(&partial).expect("fraction > 0 keeps arc_length valid");
        soft_base.transform_point(&local.translation)
    };
    sample_backbone(
        &line,
        l,
        distal_point,
        SegmentTag::Soft,
        soft_base.compose(&full),
        n_total,
    )
}

/// Backbone of the rigid-only variant: straight distal link, all points rigid.
pub fn rigid_only_backbone(
    geometry: &ArmGeometry,
    rigid: &RigidConfig,
    n_total: usize,
) -> Result<BackboneSample, KinematicsError> {
    let (line, soft_base) = rigid_polyline(geometry, rigid)?;
    let l = geometry.rigid_only_substitute_length;
    let distal_point =
        move |fraction: f64| soft_base.transform_point(&Vector3::new(0.0, 0.0, fraction * l));
    sample_backbone(
        &line,
        l,
        distal_point,
        SegmentTag::Rigid,
        soft_base.compose(&Pose::from_translation(Vector3::new(0.0, 0.0, l))),
        n_total,
    )
}
