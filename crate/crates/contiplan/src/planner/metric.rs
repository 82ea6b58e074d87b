use crate::kinematics::{kappa_ceiling, wrap_angle, ArmGeometry, HybridConfig};

/// Weighted Euclidean distance over (6 joint deltas, Δκ, wrapped Δφ).
/// The bend-plane term is scaled by the mean curvature so it vanishes when
/// both configs are straight, where φ is unobservable.
pub fn config_distance(a: &HybridConfig, b: &HybridConfig, weights: &[f64; 8]) -> f64 {
    let mut sq = 0.0;
    for (i, w) in weights.iter().enumerate().take(6) {
        let d = w * (a.rigid.joints[i] - b.rigid.joints[i]);
        sq += d * d;
    }
    let dk = weights[6] * (a.soft.kappa - b.soft.kappa);
    sq += dk * dk;
    let kappa_mean = 0.5 * (a.soft.kappa + b.soft.kappa);
    let dp = weights[7] * kappa_mean * wrap_angle(a.soft.phi - b.soft.phi);
    sq += dp * dp;
    sq.sqrt()
}

/// Linear interpolation in configuration space; φ follows the shorter arc.
pub fn interpolate(a: &HybridConfig, b: &HybridConfig, t: f64) -> HybridConfig {
    let mut joints = [0.0; 6];
    for (i, j) in joints.iter_mut().enumerate() {
        *j = a.rigid.joints[i] + t * (b.rigid.joints[i] - a.rigid.joints[i]);
    }
    let kappa = a.soft.kappa + t * (b.soft.kappa - a.soft.kappa);
    let phi = wrap_angle(a.soft.phi + t * wrap_angle(b.soft.phi - a.soft.phi));
    HybridConfig {
        rigid: crate::kinematics::RigidConfig::new(joints),
        soft: crate::kinematics::SoftConfig {
            kappa,
            phi,
            arc_length: a.soft.arc_length,
        },
    }
}

/// Move from `from` toward `toward`, at most `step_size` away under the
/// metric; the result is clamped to joint and curvature limits.
pub fn steer(
    from: &HybridConfig,
    toward: &HybridConfig,
    step_size: f64,
    weights: &[f64; 8],
    geometry: &ArmGeometry,
) -> HybridConfig {
    let d = config_distance(from, toward, weights);
    let raw = if d <= step_size {
        *toward
    } else {
        interpolate(from, toward, step_size / d)
    };
    clamp_config(&raw, geometry)
}

/// Clamp joints to their limits and curvature to the representable ceiling.
pub fn clamp_config(config: &HybridConfig, geometry: &ArmGeometry) -> HybridConfig {
    let mut out = *config;
    for i in 0..6 {
        let [lo, hi] = geometry.joint_limits[i];
        out.rigid.joints[i] = out.rigid.joints[i].clamp(lo, hi);
    }
    out.soft.kappa = out.soft.kappa.clamp(0.0, kappa_ceiling(geometry));
    out.soft.phi = wrap_angle(out.soft.phi);
    out.soft.arc_length = geometry.soft_length;
    out
}
