mod common;

use approx::assert_abs_diff_eq;
use common::*;
use contiplan::kinematics::*;
use nalgebra::{Matrix3, Matrix4, Vector3};
use rand::Rng;
use std::f64::consts::{FRAC_PI_2, PI};

fn soft(kappa: f64, phi: f64, l: f64) -> SoftConfig {
    SoftConfig::new(kappa, phi, l).unwrap()
}

#[test]
fn straight_segment_is_pure_z_translation() {
    let p = soft_transform(&soft(0.0, 0.7, 0.2)).unwrap();
    assert_abs_diff_eq!(p.rotation, Matrix3::identity(), epsilon = 1e-15);
    assert_abs_diff_eq!(p.translation, Vector3::new(0.0, 0.0, 0.2), epsilon = 1e-15);
}

#[test]
fn quarter_turn_matches_arc_examples() {
    let p = soft_transform(&soft(5.0, 0.0, PI / 10.0)).unwrap();
    assert_abs_diff_eq!(p.translation, Vector3::new(-0.2, 0.0, 0.2), epsilon = 1e-12);
    let q = soft_transform(&soft(5.0, FRAC_PI_2, PI / 10.0)).unwrap();
    assert_abs_diff_eq!(q.translation, Vector3::new(0.0, -0.2, 0.2), epsilon = 1e-12);
}

#[test]
fn translation_matches_tangent_integration_oracle() {
    let mut r = rng(101);
    for _ in 0..300 {
        let bend = r.gen_range(0.0..=0.75 * PI);
        let l = r.gen_range(0.05..0.6);
        let kappa = bend / l;
        let phi = r.gen_range(-PI..PI);
        let p = soft_transform(&soft(kappa, phi, l)).unwrap();
        let oracle = integrate_arc_translation(kappa, phi, l);
        assert!(
            (p.translation - oracle).norm() < 1e-6,
            "kappa={kappa} phi={phi} l={l}: {} vs oracle {}",
            p.translation,
            oracle
        );
    }
}

#[test]
fn rotation_stays_orthonormal_including_tiny_bends() {
    let mut r = rng(102);
    for bend in [0.0, 1e-8, 1e-4] {
        let p = soft_transform(&soft(bend / 0.2, 0.3, 0.2)).unwrap();
        assert!(p.is_orthonormal(1e-9), "bend {bend}");
    }
    for _ in 0..500 {
        let kappa = r.gen_range(0.0..8.0);
        let phi = r.gen_range(-PI..PI);
        let l = r.gen_range(0.01..0.29);
        let p = soft_transform(&soft(kappa, phi, l)).unwrap();
        assert!(p.orthonormality_residual() < 1e-9);
        assert!((p.rotation.determinant() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn series_switch_is_continuous() {
    for l in [0.2, 1.0, 2.0] {
        let eps = 1e-9 / l;
        let lo = soft_transform(&soft(1e-6 / l - eps, 0.9, l)).unwrap();
        let hi = soft_transform(&soft(1e-6 / l + eps, 0.9, l)).unwrap();
        assert!(max_abs_diff(&lo, &hi) < 1e-6, "l={l}");
    }
}

#[test]
fn rejects_invalid_soft_inputs() {
    assert!(matches!(
        SoftConfig::new(-0.1, 0.0, 0.2),
        Err(KinematicsError::NegativeCurvature(_))
    ));
    assert!(matches!(
        SoftConfig::new(1.0, 0.0, 0.0),
        Err(KinematicsError::NonPositiveArcLength(_))
    ));
    assert!(matches!(
        SoftConfig::new(1.0, 0.0, -0.2),
        Err(KinematicsError::NonPositiveArcLength(_))
    ));
    let over = SoftConfig::new(8.0, 0.0, 0.3).unwrap();
    assert!(matches!(
        over.check_limits(8.0, 0.75 * PI),
        Err(KinematicsError::BendLimitExceeded { .. })
    ));
}

#[test]
fn home_flange_is_product_of_link_transforms() {
    let geom = ArmGeometry::default_arm();
    let mut joints = [0.0; 6];
    for (j, lim) in joints.iter_mut().zip(&geom.joint_limits) {
        *j = lim[0].max(0.0).min(lim[1]);
    }
    // zero rotation wherever limits allow; elsewhere the limit itself
    let flange = flange_pose(&geom, &RigidConfig::new(joints)).unwrap();
    let mut expect = Pose::identity();
    for (link, angle) in geom.rigid_links.iter().zip(joints) {
        expect = expect.compose(&link.offset);
        let axis_rot = match link.axis {
            JointAxis::X => rot_x(angle),
            JointAxis::Y => rot_y(angle),
            JointAxis::Z => rot_z(angle),
        };
        expect = expect.compose(&Pose::new(axis_rot, Vector3::zeros()));
    }
    expect = expect.compose(&geom.flange_offset);
    assert_abs_diff_eq!(flange.translation, expect.translation, epsilon = 1e-15);
}

#[test]
fn coaxial_joint_spin_keeps_flange_translation() {
    let geom = coaxial_geometry();
    let home = flange_pose(&geom, &RigidConfig::new([0.0; 6])).unwrap();
    let spun = flange_pose(&geom, &RigidConfig::new([PI, 0.0, 0.0, 0.0, 0.0, 0.0])).unwrap();
    assert_abs_diff_eq!(spun.translation, home.translation, epsilon = 1e-12);
    assert_abs_diff_eq!(spun.rotation, rot_z(PI), epsilon = 1e-12);
}

fn matrix4_of(p: &Pose) -> Matrix4<f64> {
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&p.rotation);
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&p.translation);
    m
}

#[test]
fn random_fk_matches_reverse_inverse_composition_oracle() {
    let geom = wide_geometry();
    let mut r = rng(103);
    for _ in 0..200 {
        let joints = random_joints(&geom, &mut r);
        let flange = flange_pose(&geom, &RigidConfig::new(joints)).unwrap();

        let mut elements: Vec<Matrix4<f64>> = Vec::new();
        for (link, angle) in geom.rigid_links.iter().zip(joints) {
            elements.push(matrix4_of(&link.offset));
            let rot = match link.axis {
                JointAxis::X => rot_x(angle),
                JointAxis::Y => rot_y(angle),
                JointAxis::Z => rot_z(angle),
            };
            elements.push(matrix4_of(&Pose::new(rot, Vector3::zeros())));
        }
        elements.push(matrix4_of(&geom.flange_offset));

        // oracle: fold the inverses in reverse order, then invert the result
        let mut inv_chain: Matrix4<f64> = Matrix4::identity();
        for e in elements.iter().rev() {
            inv_chain *= e.try_inverse().unwrap();
        }
        let oracle = inv_chain.try_inverse().unwrap();
        let got = matrix4_of(&flange);
        for i in 0..4 {
            for j in 0..4 {
                assert!((oracle[(i, j)] - got[(i, j)]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn joint_limit_violation_is_rejected() {
    let geom = ArmGeometry::default_arm();
    let mut joints = geom.home_joints;
    joints[1] = geom.joint_limits[1][1] + 0.01;
    assert!(matches!(
        rigid_forward(&geom, &RigidConfig::new(joints)),
        Err(KinematicsError::JointOutOfLimits { index: 1, .. })
    ));
    joints[1] = f64::NAN;
    assert!(rigid_forward(&geom, &RigidConfig::new(joints)).is_err());
}

#[test]
fn straight_arm_backbone_is_colinear_and_evenly_spaced() {
    let geom = coaxial_geometry();
    let config = HybridConfig {
        rigid: RigidConfig::new([0.0; 6]),
        soft: soft(0.0, 0.0, geom.soft_length),
    };
    let bb = hybrid_backbone(&geom, &config, 50).unwrap();
    assert_eq!(bb.points.len(), 50);
    let total: f64 = 0.09 + 0.06 + 0.26 + 0.22 + 0.05 + 0.05 + 0.03 + 0.2;
    let spacing = total / 49.0;
    for (k, p) in bb.points.iter().enumerate() {
        assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.z, spacing * k as f64, epsilon = 1e-9);
    }
}

#[test]
fn two_point_backbone_is_base_and_tip() {
    let geom = ArmGeometry::default_arm();
    let config = geom.home_config().unwrap();
    let bb = hybrid_backbone(&geom, &config, 2).unwrap();
    assert_eq!(bb.points.len(), 2);
    assert_abs_diff_eq!(bb.points[0], Vector3::zeros(), epsilon = 1e-15);
    assert_abs_diff_eq!(bb.points[1], bb.tip_pose.translation, epsilon = 1e-12);
    assert!(hybrid_backbone(&geom, &config, 1).is_err());
}

/// Fit a plane by eigen-decomposition, then a circle by the algebraic
/// least-squares method; both independent of the segment formulas.
fn circle_fit_residual(points: &[Vector3<f64>]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let centroid = points.iter().sum::<Vector3<f64>>() / n;
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p - centroid;
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    let mut min_i = 0;
    for i in 1..3 {
        if eig.eigenvalues[i] < eig.eigenvalues[min_i] {
            min_i = i;
        }
    }
    let normal = eig.eigenvectors.column(min_i).into_owned();
    let planarity = points
        .iter()
        .map(|p| (p - centroid).dot(&normal).abs())
        .fold(0.0f64, f64::max);

    let e1 = {
        let trial = if normal.x.abs() < 0.9 {
            Vector3::x()
        } else {
            Vector3::y()
        };
        (trial - normal * trial.dot(&normal)).normalize()
    };
    let e2 = normal.cross(&e1);
    let uv: Vec<(f64, f64)> = points
        .iter()
        .map(|p| ((p - centroid).dot(&e1), (p - centroid).dot(&e2)))
        .collect();
    // Kasa fit: minimize ||u^2 + v^2 + D u + E v + F||
    let mut ata = Matrix3::zeros();
    let mut atb = Vector3::zeros();
    for &(u, v) in &uv {
        let row = Vector3::new(u, v, 1.0);
        ata += row * row.transpose();
        atb += row * -(u * u + v * v);
    }
    let sol = ata.try_inverse().unwrap() * atb;
    let (cu, cv) = (-sol.x / 2.0, -sol.y / 2.0);
    let radius = (cu * cu + cv * cv - sol.z).sqrt();
    let radial = uv
        .iter()
        .map(|&(u, v)| (((u - cu).powi(2) + (v - cv).powi(2)).sqrt() - radius).abs())
        .fold(0.0f64, f64::max);
    (planarity, radius, radial)
}

#[test]
fn bent_soft_points_lie_on_a_circle_of_radius_one_over_kappa() {
    let geom = ArmGeometry::default_arm();
    let kappa = FRAC_PI_2 / geom.soft_length;
    let config = HybridConfig {
        rigid: RigidConfig::new(geom.home_joints),
        soft: soft(kappa, 1.1, geom.soft_length),
    };
    let bb = hybrid_backbone(&geom, &config, 200).unwrap();
    let soft_points: Vec<Vector3<f64>> = bb
        .points
        .iter()
        .zip(&bb.tags)
        .filter(|(_, t)| **t == SegmentTag::Soft)
        .map(|(p, _)| *p)
        .collect();
    assert!(soft_points.len() > 20);
    let (planarity, radius, radial) = circle_fit_residual(&soft_points);
    assert!(planarity < 1e-9, "planarity {planarity}");
    assert!((radius - 1.0 / kappa).abs() < 1e-9, "radius {radius}");
    assert!(radial < 1e-9, "radial residual {radial}");
}

#[test]
fn soft_chord_sum_converges_to_arc_length() {
    let mut r = rng(104);
    for _ in 0..20 {
        let l = 0.2;
        let kappa = r.gen_range(0.0..0.75 * PI / l);
        let phi = r.gen_range(-PI..PI);
        let mut prev = Vector3::zeros();
        let mut sum = 0.0;
        for k in 1..1000 {
            let partial = soft(kappa, phi, l * k as f64 / 999.0);
            let p = soft_transform(&partial).unwrap().translation;
            sum += (p - prev).norm();
            prev = p;
        }
        assert!((sum - l).abs() / l < 1e-3, "kappa {kappa}: chord sum {sum}");
    }
}

#[test]
fn backbone_tip_equals_flange_soft_composition_exactly() {
    let geom = ArmGeometry::default_arm();
    let mut r = rng(105);
    for _ in 0..50 {
        let joints = random_joints(&geom, &mut r);
        let config = HybridConfig {
            rigid: RigidConfig::new(joints),
            soft: soft(r.gen_range(0.0..8.0), r.gen_range(-PI..PI), geom.soft_length),
        };
        let bb = hybrid_backbone(&geom, &config, 50).unwrap();
        let direct = tip_pose(&geom, &config).unwrap();
        assert_eq!(bb.tip_pose, direct);
    }
}

#[test]
fn backbone_tags_are_rigid_prefix_then_soft_suffix() {
    let geom = ArmGeometry::default_arm();
    let config = geom.home_config().unwrap();
    for n in [2usize, 3, 10, 50, 113] {
        let bb = hybrid_backbone(&geom, &config, n).unwrap();
        let first_soft = bb.tags.iter().position(|t| *t == SegmentTag::Soft);
        if let Some(i) = first_soft {
            assert!(bb.tags[i..].iter().all(|t| *t == SegmentTag::Soft));
        }
        assert_eq!(bb.tags[0], SegmentTag::Rigid);
        // spacing bound: consecutive gaps never exceed 1.5x nominal
        let total = 0.76 + 0.2;
        let nominal = total / (n - 1) as f64;
        for pair in bb.points.windows(2) {
            assert!((pair[1] - pair[0]).norm() <= 1.5 * nominal + 1e-12);
        }
    }
}

#[test]
fn rigid_only_variant_is_straight_and_all_rigid() {
    let geom = ArmGeometry::default_arm();
    let rigid = RigidConfig::new(geom.home_joints);
    let bb = rigid_only_backbone(&geom, &rigid, 50).unwrap();
    assert!(bb.tags.iter().all(|t| *t == SegmentTag::Rigid));
    let tip = rigid_only_tip_pose(&geom, &rigid).unwrap();
    assert_eq!(bb.tip_pose, tip);
    let flange = flange_pose(&geom, &rigid).unwrap();
    let expect = flange.transform_point(&Vector3::new(0.0, 0.0, geom.soft_length));
    assert_abs_diff_eq!(tip.translation, expect, epsilon = 1e-12);
    // hybrid and rigid-only share the rigid backbone prefix
    let hybrid = hybrid_backbone(&geom, &geom.home_config().unwrap(), 50).unwrap();
    for (a, b) in bb.points.iter().zip(&hybrid.points).take(10) {
        assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
    }
}

#[test]
fn symmetric_inflation_gives_zero_curvature() {
    let geom = ArmGeometry::default_arm();
    for a in [0.0, 0.37, 1.0] {
        let s = actuation_to_soft(&geom, [a, a, a]).unwrap();
        assert_eq!(s.kappa, 0.0);
        assert_eq!(s.phi, 0.0);
        assert_eq!(s.arc_length, geom.soft_length);
    }
}

#[test]
fn single_chamber_matches_closed_form() {
    let mut geom = ArmGeometry::default_arm();
    geom.chamber_gain = 3.0; // keep the closed form below the curvature clamp
    let s = actuation_to_soft(&geom, [1.0, 0.0, 0.0]).unwrap();
    assert_abs_diff_eq!(s.phi, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(s.kappa, 3.0 * (2.0f64 / 3.0).sqrt(), epsilon = 1e-12);
    let s2 = actuation_to_soft(&geom, [0.0, 1.0, 0.0]).unwrap();
    assert_abs_diff_eq!(s2.phi, 2.0 * PI / 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(s2.kappa, s.kappa, epsilon = 1e-12);
}

#[test]
fn chamber_clamp_and_range_checks() {
    let geom = ArmGeometry::default_arm();
    let s = actuation_to_soft(&geom, [1.0, 0.0, 0.0]).unwrap();
    assert_eq!(s.kappa, geom.kappa_max);
    assert!(matches!(
        actuation_to_soft(&geom, [1.2, 0.0, 0.0]),
        Err(KinematicsError::ChamberOutOfRange { index: 0, .. })
    ));
    assert!(actuation_to_soft(&geom, [0.0, -0.1, 0.0]).is_err());
}

#[test]
fn cyclic_chamber_shift_rotates_bending_plane() {
    let geom = ArmGeometry::default_arm();
    let mut r = rng(106);
    for _ in 0..200 {
        let a = [r.gen::<f64>(), r.gen::<f64>(), r.gen::<f64>()];
        let s0 = actuation_to_soft(&geom, a).unwrap();
        if s0.kappa < 1e-6 {
            continue;
        }
        let shifted = actuation_to_soft(&geom, [a[2], a[0], a[1]]).unwrap();
        assert_abs_diff_eq!(shifted.kappa, s0.kappa, epsilon = 1e-12);
        let delta = wrap_angle(shifted.phi - s0.phi - 2.0 * PI / 3.0);
        assert_abs_diff_eq!(delta, 0.0, epsilon = 1e-9);
    }
}

#[test]
fn geometry_json_round_trip_and_validation() {
    let geom = ArmGeometry::default_arm();
    geom.validate().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("arm.json");
    std::fs::write(&path, serde_json::to_string_pretty(&geom).unwrap()).unwrap();
    let loaded = ArmGeometry::from_json_file(&path).unwrap();
    assert_eq!(loaded.joint_limits, geom.joint_limits);
    assert_eq!(loaded.soft_length, geom.soft_length);
    let home_a = tip_pose(&geom, &geom.home_config().unwrap()).unwrap();
    let home_b = tip_pose(&loaded, &loaded.home_config().unwrap()).unwrap();
    assert_eq!(home_a, home_b);

    let mut bad = geom.clone();
    bad.rigid_only_substitute_length = 0.5;
    assert!(bad.validate().is_err());
    let mut bad2 = geom.clone();
    bad2.rigid_links.pop();
    assert!(bad2.validate().is_err());
}

#[test]
fn pose_serde_is_row_major() {
    let p = Pose::new(rot_z(0.5), Vector3::new(1.0, 2.0, 3.0));
    let json = serde_json::to_string(&p).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_abs_diff_eq!(
        v["rotation"][0][1].as_f64().unwrap(),
        -(0.5f64).sin(),
        epsilon = 1e-15
    );
    assert_abs_diff_eq!(v["translation"][2].as_f64().unwrap(), 3.0, epsilon = 1e-15);
    let back: Pose = serde_json::from_str(&json).unwrap();
    assert_eq!(back, p);
}
