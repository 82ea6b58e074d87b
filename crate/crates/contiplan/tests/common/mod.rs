//! Shared helpers for integration tests.
#![allow(dead_code)]

use contiplan::kinematics::{ArmGeometry, JointAxis, Pose, RigidLink};
use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Default arm with joint limits widened to ±π, for tests that need postures
/// (straight arm, full revolutions) outside the shipped working range.
pub fn wide_geometry() -> ArmGeometry {
    let mut geom = ArmGeometry::default_arm();
    geom.joint_limits = [[-std::f64::consts::PI, std::f64::consts::PI]; 6];
    geom.home_joints = [0.0; 6];
    geom
}

/// Six z-axis joints with all links along z: any joint rotation keeps every
/// frame origin on the z-axis.
pub fn coaxial_geometry() -> ArmGeometry {
    let mut geom = wide_geometry();
    geom.rigid_links = geom
        .rigid_links
        .iter()
        .map(|link| RigidLink {
            offset: link.offset,
            axis: JointAxis::Z,
        })
        .collect();
    geom
}

pub fn random_joints<R: Rng>(geom: &ArmGeometry, r: &mut R) -> [f64; 6] {
    let mut joints = [0.0; 6];
    for (j, lim) in joints.iter_mut().zip(&geom.joint_limits) {
        *j = r.gen_range(lim[0]..=lim[1]);
    }
    joints
}

pub fn max_abs_diff(a: &Pose, b: &Pose) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a.rotation[(i, j)] - b.rotation[(i, j)]).abs());
        }
        m = m.max((a.translation[i] - b.translation[i]).abs());
    }
    m
}

/// Simpson integration of the unit tangent along a circular arc: an oracle for
/// the closed-form segment transform that never touches 1/κ.
pub fn integrate_arc_translation(kappa: f64, phi: f64, arc_length: f64) -> Vector3<f64> {
    let n = 2000;
    let h = arc_length / n as f64;
    let tangent = |s: f64| {
        let b = kappa * s;
        Vector3::new(-phi.cos() * b.sin(), -phi.sin() * b.sin(), b.cos())
    };
    let mut acc = tangent(0.0) + tangent(arc_length);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += tangent(h * k as f64) * w;
    }
    acc * (h / 3.0)
}
