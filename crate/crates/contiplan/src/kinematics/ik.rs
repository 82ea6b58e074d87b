//! Damped-least-squares inverse kinematics over the hybrid arm, used for goal
//! biasing, exact goal connection, and the oracle controller. Deterministic:
//! fixed iteration budget, no randomness.

use super::geometry::{ArmGeometry, HybridConfig, RigidConfig};
use super::pose::Pose;
use super::soft::{actuation_to_soft, wrap_angle, SoftConfig};
use super::{tip_pose, KinematicsError};
use nalgebra::{DMatrix, DVector, Matrix6, Vector3, Vector6};

#[derive(Debug, Clone, Copy)]
pub struct IkOptions {
    pub max_iterations: usize,
    /// Tip position tolerance in meters.
    pub position_tolerance: f64,
    /// Tip approach-axis tolerance in radians; only enforced if axis_weight > 0.
    pub axis_tolerance: f64,
    /// DLS damping factor.
    pub damping: f64,
    /// Weight of the axis-alignment error rows (meters per radian); 0 solves
    /// position only.
    pub axis_weight: f64,
    /// Central-difference step for the numeric Jacobian.
    pub fd_step: f64,
    /// Per-iteration cap on the parameter update norm.
    pub max_step: f64,
}

impl Default for IkOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            position_tolerance: 1e-4,
            axis_tolerance: 1e-3,
            damping: 0.05,
            axis_weight: 0.05,
            fd_step: 1e-6,
            max_step: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IkOutcome<T> {
    pub solution: T,
    pub position_error: f64,
    pub axis_error: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Position residual plus weighted axis-alignment residual (cross product of
/// the tip z-axes; magnitude sin of the misalignment angle).
fn pose_residual(current: &Pose, target: &Pose, axis_weight: f64) -> Vector6<f64> {
    let dp = target.translation - current.translation;
    let mut e = Vector6::zeros();
    e.fixed_rows_mut::<3>(0).copy_from(&dp);
    if axis_weight > 0.0 {
        let zc: Vector3<f64> = current.rotation.column(2).into_owned();
        let zt: Vector3<f64> = target.rotation.column(2).into_owned();
        e.fixed_rows_mut::<3>(3).copy_from(&(axis_weight * zc.cross(&zt)));
    }
    e
}

fn axis_angle(current: &Pose, target: &Pose) -> f64 {
    let zc: Vector3<f64> = current.rotation.column(2).into_owned();
    let zt: Vector3<f64> = target.rotation.column(2).into_owned();
    zc.dot(&zt).clamp(-1.0, 1.0).acos()
}

/// Generic DLS loop over a box-constrained parameter vector.
fn dls_solve<F>(
    fk: F,
    mut x: Vec<f64>,
    lo: &[f64],
    hi: &[f64],
    target: &Pose,
    opts: &IkOptions,
) -> Result<(Vec<f64>, f64, f64, usize, bool), KinematicsError>
where
    F: Fn(&[f64]) -> Result<Pose, KinematicsError>,
{
    let n = x.len();
    debug_assert_eq!(lo.len(), n);
    debug_assert_eq!(hi.len(), n);
    for i in 0..n {
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
    let mut pose = fk(&x)?;
    let mut iterations = 0;
    for iter in 0..opts.max_iterations {
        let pos_err = (target.translation - pose.translation).norm();
        let ax_err = axis_angle(&pose, target);
        if pos_err <= opts.position_tolerance
            && (opts.axis_weight == 0.0 || ax_err <= opts.axis_tolerance)
        {
            return Ok((x, pos_err, ax_err, iter, true));
        }
        iterations = iter + 1;

        let e = pose_residual(&pose, target, opts.axis_weight);
        let mut jac = DMatrix::<f64>::zeros(6, n);
        for i in 0..n {
            let xp = (x[i] + opts.fd_step).min(hi[i]);
            let xm = (x[i] - opts.fd_step).max(lo[i]);
            let span = xp - xm;
            if span <= 0.0 {
                continue;
            }
            let mut probe = x.clone();
            probe[i] = xp;
            let ep = pose_residual(&fk(&probe)?, target, opts.axis_weight);
            probe[i] = xm;
            let em = pose_residual(&fk(&probe)?, target, opts.axis_weight);
            // residual shrinks as the tip moves toward the target, so the
            // task-space Jacobian column is the negated residual derivative
            let col = -(ep - em) / span;
            jac.column_mut(i).copy_from(&col);
        }

        let jjt: Matrix6<f64> = Matrix6::from_iterator((&jac * jac.transpose()).iter().copied());
        let damped = jjt + Matrix6::identity() * (opts.damping * opts.damping);
        let rhs: Vector6<f64> = Vector6::from_iterator(e.iter().copied());
        let y = damped
            .lu()
            .solve(&rhs)
            .ok_or_else(|| KinematicsError::InvalidGeometry("singular DLS system".into()))?;
        let mut delta: DVector<f64> = jac.transpose() * DVector::from_iterator(6, y.iter().copied());
        let norm = delta.norm();
        if norm > opts.max_step {
            delta *= opts.max_step / norm;
        }
        for i in 0..n {
            x[i] = (x[i] + delta[i]).clamp(lo[i], hi[i]);
        }
        pose = fk(&x)?;
    }
    let pos_err = (target.translation - pose.translation).norm();
    let ax_err = axis_angle(&pose, target);
    let converged = pos_err <= opts.position_tolerance
        && (opts.axis_weight == 0.0 || ax_err <= opts.axis_tolerance);
    Ok((x, pos_err, ax_err, iterations, converged))
}

/// Effective curvature ceiling: the representable maximum and the bend limit.
pub fn kappa_ceiling(geometry: &ArmGeometry) -> f64 {
    geometry.kappa_max.min(geometry.theta_max / geometry.soft_length)
}

/// IK in hybrid-configuration space (6 joints, curvature, bend plane).
pub fn ik_hybrid(
    geometry: &ArmGeometry,
    seed: &HybridConfig,
    target: &Pose,
    opts: &IkOptions,
) -> Result<IkOutcome<HybridConfig>, KinematicsError> {
    let arc = geometry.soft_length;
    let x0 = vec![
        seed.rigid.joints[0],
        seed.rigid.joints[1],
        seed.rigid.joints[2],
        seed.rigid.joints[3],
        seed.rigid.joints[4],
        seed.rigid.joints[5],
        seed.soft.kappa,
        seed.soft.phi,
    ];
    let mut lo = Vec::with_capacity(8);
    let mut hi = Vec::with_capacity(8);
    for lim in geometry.joint_limits {
        lo.push(lim[0]);
        hi.push(lim[1]);
    }
    lo.push(0.0);
    hi.push(kappa_ceiling(geometry));
    // phi runs on an extended window so the solver never hits a wrap wall
    lo.push(-2.0 * std::f64::consts::PI);
    hi.push(2.0 * std::f64::consts::PI);

    let fk = |x: &[f64]| {
        let config = hybrid_from_vec(x, arc);
        tip_pose(geometry, &config)
    };
    let (x, position_error, axis_error, iterations, converged) =
        dls_solve(fk, x0, &lo, &hi, target, opts)?;
    Ok(IkOutcome {
        solution: hybrid_from_vec(&x, arc),
        position_error,
        axis_error,
        iterations,
        converged,
    })
}

fn hybrid_from_vec(x: &[f64], arc_length: f64) -> HybridConfig {
    HybridConfig {
        rigid: RigidConfig::new([x[0], x[1], x[2], x[3], x[4], x[5]]),
        soft: SoftConfig {
            kappa: x[6].max(0.0),
            phi: wrap_angle(x[7]),
            arc_length,
        },
    }
}

/// IK in actuation space (6 joints, 3 chamber commands).
pub fn ik_actuation(
    geometry: &ArmGeometry,
    seed: &[f64; 9],
    target: &Pose,
    opts: &IkOptions,
) -> Result<IkOutcome<[f64; 9]>, KinematicsError> {
    let mut lo = Vec::with_capacity(9);
    let mut hi = Vec::with_capacity(9);
    for lim in geometry.joint_limits {
        lo.push(lim[0]);
        hi.push(lim[1]);
    }
    lo.extend_from_slice(&[0.0; 3]);
    hi.extend_from_slice(&[1.0; 3]);

    let fk = |x: &[f64]| {
        let rigid = RigidConfig::new([x[0], x[1], x[2], x[3], x[4], x[5]]);
        let soft = actuation_to_soft(geometry, [x[6], x[7], x[8]])?;
        tip_pose(geometry, &HybridConfig { rigid, soft })
    };
    let (x, position_error, axis_error, iterations, converged) =
        dls_solve(fk, seed.to_vec(), &lo, &hi, target, opts)?;
    let mut solution = [0.0; 9];
    solution.copy_from_slice(&x);
    Ok(IkOutcome {
        solution,
        position_error,
        axis_error,
        iterations,
        converged,
    })
}

/// IK of the rigid-only variant: 6 joints, straight distal link.
pub fn ik_rigid_only(
    geometry: &ArmGeometry,
    seed: &RigidConfig,
    target: &Pose,
    opts: &IkOptions,
) -> Result<IkOutcome<RigidConfig>, KinematicsError> {
    let mut lo = Vec::with_capacity(6);
    let mut hi = Vec::with_capacity(6);
    for lim in geometry.joint_limits {
        lo.push(lim[0]);
        hi.push(lim[1]);
    }
    let fk = |x: &[f64]| {
        let rigid = RigidConfig::new([x[0], x[1], x[2], x[3], x[4], x[5]]);
        super::rigid_only_tip_pose(geometry, &rigid)
    };
    let (x, position_error, axis_error, iterations, converged) =
        dls_solve(fk, seed.joints.to_vec(), &lo, &hi, target, opts)?;
    Ok(IkOutcome {
        solution: RigidConfig::new([x[0], x[1], x[2], x[3], x[4], x[5]]),
        position_error,
        axis_error,
        iterations,
        converged,
    })
}
