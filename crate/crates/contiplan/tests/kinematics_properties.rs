mod common;

use common::max_abs_diff;
use contiplan::kinematics::*;
use nalgebra::Vector3;
use proptest::prelude::*;
use std::f64::consts::PI;

fn soft_strategy() -> impl Strategy<Value = SoftConfig> {
    (0.0..8.0f64, -PI..PI, 0.01..0.3f64)
        .prop_map(|(kappa, phi, l)| SoftConfig::new(kappa, phi, l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn soft_rotation_always_orthonormal(s in soft_strategy()) {
        let p = soft_transform(&s).unwrap();
        prop_assert!(p.orthonormality_residual() < 1e-9);
        prop_assert!((p.rotation.determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn wrap_angle_lands_in_half_open_range(a in -50.0..50.0f64) {
        let w = wrap_angle(a);
        prop_assert!((-PI..PI).contains(&w));
        let gap = (w - a).rem_euclid(2.0 * PI);
        prop_assert!(gap < 1e-9 || (2.0 * PI - gap) < 1e-9);
    }

    #[test]
    fn pose_inverse_composes_to_identity(
        yaw in -PI..PI, pitch in -1.5..1.5f64,
        x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64,
    ) {
        let p = Pose::new(rot_z(yaw) * rot_y(pitch), Vector3::new(x, y, z));
        let round = p.compose(&p.inverse());
        prop_assert!(max_abs_diff(&round, &Pose::identity()) < 1e-12);
    }

    #[test]
    fn relative_pose_recomposes_goal(
        ya in -PI..PI, pa in -1.5..1.5f64, yb in -PI..PI, pb in -1.5..1.5f64,
        xa in -1.0..1.0f64, xb in -1.0..1.0f64,
    ) {
        let a = Pose::new(rot_z(ya) * rot_y(pa), Vector3::new(xa, 0.2, 0.5));
        let b = Pose::new(rot_z(yb) * rot_y(pb), Vector3::new(xb, -0.1, 0.3));
        let rel = a.relative_to(&b);
        prop_assert!(max_abs_diff(&a.compose(&rel), &b) < 1e-12);
    }

    #[test]
    fn backbone_spacing_and_tags_hold_for_random_configs(
        j1 in -0.9..0.9f64, j2 in 0.1..1.2f64, j3 in 0.3..1.4f64,
        j4 in 0.0..1.6f64, j5 in 0.6..1.5f64, j6 in 0.0..2.0f64,
        s in soft_strategy(), n in 2usize..120,
    ) {
        let geom = ArmGeometry::default_arm();
        let soft = SoftConfig::new(s.kappa, s.phi, geom.soft_length).unwrap();
        let config = HybridConfig { rigid: RigidConfig::new([j1, j2, j3, j4, j5, j6]), soft };
        let bb = hybrid_backbone(&geom, &config, n).unwrap();
        prop_assert_eq!(bb.points.len(), n);
        prop_assert_eq!(bb.tags.len(), n);
        let total = 0.76 + geom.soft_length;
        let nominal = total / (n - 1) as f64;
        for pair in bb.points.windows(2) {
            prop_assert!((pair[1] - pair[0]).norm() <= 1.5 * nominal + 1e-12);
        }
        let first_soft = bb.tags.iter().position(|t| *t == SegmentTag::Soft);
        if let Some(i) = first_soft {
            prop_assert!(bb.tags[i..].iter().all(|t| *t == SegmentTag::Soft));
        }
        let direct = tip_pose(&geom, &config).unwrap();
        prop_assert_eq!(bb.tip_pose, direct);
    }

    #[test]
    fn chamber_map_is_valid_soft_config(a1 in 0.0..1.0f64, a2 in 0.0..1.0f64, a3 in 0.0..1.0f64) {
        let geom = ArmGeometry::default_arm();
        let s = actuation_to_soft(&geom, [a1, a2, a3]).unwrap();
        prop_assert!(s.kappa >= 0.0 && s.kappa <= geom.kappa_max);
        prop_assert!((-PI..PI).contains(&s.phi));
        s.check_limits(geom.kappa_max, geom.theta_max).unwrap();
    }
}
