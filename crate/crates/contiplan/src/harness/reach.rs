use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::controller::{
    actuation_to_config, train, Actuation, GoalPairing, InputFormat, PoseSample, TrainConfig,
    WaypointController,
};
use crate::kinematics::{ik_actuation, tip_pose, ArmGeometry, IkOptions, Pose};
use crate::occupancy::{generate_scene, Archetype, SceneParams};
use crate::seed::mix_seed;

/// Reaching benchmark configuration: goals drawn from Open scenes, filtered to
/// the reachable manifold, tracked closed-loop through actuation-space
/// waypoints under an optional constant actuation offset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ReachConfig {
    pub n_goals: usize,
    /// Std of the per-trial constant actuation offset, as a fraction of each
    /// channel's span. 0 disables the disturbance.
    pub bias_sigma: f64,
    /// Waypoint spacing in normalized actuation distance.
    pub waypoint_spacing: f64,
    pub max_steps_per_waypoint: usize,
    /// Waypoint advance tolerance, meters.
    pub tolerance: f64,
    /// Goal filter: required IK position residual, meters.
    pub goal_ik_tolerance: f64,
    /// Scene redraws allowed per goal before giving up.
    pub resample_attempts: usize,
    pub seed: u64,
}

impl Default for ReachConfig {
    fn default() -> Self {
        Self {
            n_goals: 150,
            bias_sigma: 0.01,
            waypoint_spacing: 0.05,
            max_steps_per_waypoint: 8,
            tolerance: 0.008,
            goal_ik_tolerance: 1e-3,
            resample_attempts: 40,
            seed: 0,
        }
    }
}

impl ReachConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidConfig(m));
        if self.n_goals == 0 || self.max_steps_per_waypoint == 0 || self.resample_attempts == 0 {
            return bad("n_goals, max_steps_per_waypoint, resample_attempts must be >= 1".into());
        }
        for (name, v) in [
            ("waypoint_spacing", self.waypoint_spacing),
            ("tolerance", self.tolerance),
            ("goal_ik_tolerance", self.goal_ik_tolerance),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !self.bias_sigma.is_finite() || self.bias_sigma < 0.0 {
            return bad(format!("bias_sigma must be >= 0, got {}", self.bias_sigma));
        }
        Ok(())
    }
}

/// A reachable target: an exact on-manifold tip pose and the actuation that
/// produces it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachGoal {
    pub position: [f64; 3],
    pub pose: Pose,
    pub actuation: [f64; 9],
    /// Scene seed the goal position came from.
    pub scene_seed: u64,
}

fn position_only_ik_options() -> IkOptions {
    IkOptions {
        max_iterations: 200,
        position_tolerance: 1e-4,
        axis_weight: 0.0,
        ..IkOptions::default()
    }
}

fn home_actuation(geometry: &ArmGeometry) -> [f64; 9] {
    let mut u = [0.0; 9];
    u[..6].copy_from_slice(&geometry.home_joints);
    u[6..].copy_from_slice(&geometry.home_chambers);
    u
}

fn channel_spans(geometry: &ArmGeometry) -> [f64; 9] {
    let mut spans = [1.0; 9];
    for (i, lim) in geometry.joint_limits.iter().enumerate() {
        spans[i] = lim[1] - lim[0];
    }
    spans
}

fn clamp_actuation(geometry: &ArmGeometry, u: &mut [f64; 9]) {
    for (i, lim) in geometry.joint_limits.iter().enumerate() {
        u[i] = u[i].clamp(lim[0], lim[1]);
    }
    for c in u[6..].iter_mut() {
        *c = c.clamp(0.0, 1.0);
    }
}

fn actuation_pose(geometry: &ArmGeometry, u: &[f64; 9]) -> Result<Pose, HarnessError> {
    let act = Actuation {
        joints: [u[0], u[1], u[2], u[3], u[4], u[5]],
        chambers: [u[6], u[7], u[8]],
    };
    let config = actuation_to_config(geometry, &act)?;
    Ok(tip_pose(geometry, &config)?)
}

/// Draw `n_goals` held-out goals: each comes from a fresh Open scene and is
/// kept only if position-only IK from home lands within `goal_ik_tolerance`,
/// so the stored pose is exactly realizable. Goals never depend on the
/// controller under test.
pub fn sample_reach_goals(
    geometry: &ArmGeometry,
    params: &SceneParams,
    cfg: &ReachConfig,
) -> Result<Vec<ReachGoal>, HarnessError> {
    cfg.validate()?;
    let opts = position_only_ik_options();
    let home_u = home_actuation(geometry);
    let mut goals = Vec::with_capacity(cfg.n_goals);
    for i in 0..cfg.n_goals {
        let mut found = None;
        for attempt in 0..cfg.resample_attempts {
            let scene_seed = mix_seed(cfg.seed, &[10_000 + i as u64, attempt as u64]);
            let spec = generate_scene(Archetype::Open, scene_seed, params)?;
            let target = Pose::from_translation(spec.goal());
            let ik = ik_actuation(geometry, &home_u, &target, &opts)?;
            if ik.position_error <= cfg.goal_ik_tolerance {
                let pose = actuation_pose(geometry, &ik.solution)?;
                found = Some(ReachGoal {
                    position: [pose.translation.x, pose.translation.y, pose.translation.z],
                    pose,
                    actuation: ik.solution,
                    scene_seed,
                });
                break;
            }
        }
        match found {
            Some(g) => goals.push(g),
            None => {
                return Err(HarnessError::GoalSampling {
                    index: i,
                    attempts: cfg.resample_attempts,
                })
            }
        }
    }
    Ok(goals)
}

/// The per-trial constant actuation offsets, one per goal: componentwise
/// normal times sigma times the channel span. Depends only on the benchmark
/// seed, so every controller faces identical disturbances.
pub fn trial_biases(
    geometry: &ArmGeometry,
    cfg: &ReachConfig,
) -> Vec<[f64; 9]> {
    let spans = channel_spans(geometry);
    (0..cfg.n_goals)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, &[500_000 + i as u64]));
            let mut du = [0.0; 9];
            for (d, s) in du.iter_mut().zip(spans.iter()) {
                let z: f64 = StandardNormal.sample(&mut rng);
                *d = z * cfg.bias_sigma * s;
            }
            du
        })
        .collect()
}

/// One closed-loop reach: linear actuation-space waypoints from home to the
/// goal actuation, each tracked with pose feedback for at most
/// `max_steps_per_waypoint` commands. Commands execute with the constant
/// offset added, so feedback is the only way to compensate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReachOutcome {
    pub final_error: f64,
    pub n_waypoints: usize,
    pub steps_used: usize,
}

pub fn track_reach_goal<C: WaypointController>(
    geometry: &ArmGeometry,
    controller: &C,
    goal: &ReachGoal,
    bias: &[f64; 9],
    cfg: &ReachConfig,
) -> Result<ReachOutcome, HarnessError> {
    let spans = channel_spans(geometry);
    let u0 = home_actuation(geometry);
    let ug = goal.actuation;

    let path_len = (0..9)
        .map(|d| ((ug[d] - u0[d]) / spans[d]).abs())
        .fold(0.0, f64::max);
    let n_wp = ((path_len / cfg.waypoint_spacing).ceil() as usize).max(2);

    let mut last_cmd = Actuation {
        joints: [u0[0], u0[1], u0[2], u0[3], u0[4], u0[5]],
        chambers: [u0[6], u0[7], u0[8]],
    };
    let mut executed = u0;
    for (e, b) in executed.iter_mut().zip(bias.iter()) {
        *e += b;
    }
    clamp_actuation(geometry, &mut executed);
    let mut tip = actuation_pose(geometry, &executed)?;
    let mut steps_used = 0;

    for i in 1..=n_wp {
        let t = i as f64 / n_wp as f64;
        let mut u_t = [0.0; 9];
        for d in 0..9 {
            u_t[d] = u0[d] + t * (ug[d] - u0[d]);
        }
        let target = actuation_pose(geometry, &u_t)?;
        for _ in 0..cfg.max_steps_per_waypoint {
            let cmd = controller.command(geometry, &tip, &target, &last_cmd);
            let cmd = cmd.clamped(geometry);
            let mut u_exec = cmd.as_array();
            for (e, b) in u_exec.iter_mut().zip(bias.iter()) {
                *e += b;
            }
            clamp_actuation(geometry, &mut u_exec);
            tip = actuation_pose(geometry, &u_exec)?;
            last_cmd = cmd;
            steps_used += 1;
            if (tip.translation - target.translation).norm() < cfg.tolerance {
                break;
            }
        }
    }

    let goal_pos = Vector3::from_column_slice(&goal.position);
    Ok(ReachOutcome {
        final_error: (tip.translation - goal_pos).norm(),
        n_waypoints: n_wp,
        steps_used,
    })
}

/// Run the whole benchmark for one controller; returns per-goal final errors
/// in goal order.
pub fn reach_errors<C: WaypointController>(
    geometry: &ArmGeometry,
    controller: &C,
    goals: &[ReachGoal],
    biases: &[[f64; 9]],
    cfg: &ReachConfig,
) -> Result<Vec<f64>, HarnessError> {
    if goals.len() != biases.len() {
        return Err(HarnessError::InvalidConfig(format!(
            "{} goals but {} biases",
            goals.len(),
            biases.len()
        )));
    }
    goals
        .iter()
        .zip(biases.iter())
        .map(|(g, b)| track_reach_goal(geometry, controller, g, b, cfg).map(|o| o.final_error))
        .collect()
}

/// Median of a non-empty sample: midpoint average for even lengths.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty sample");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite errors"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Per-input-format outcome of the controller ablation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormatReport {
    pub format: InputFormat,
    pub median_error: f64,
    pub mean_error: f64,
    pub errors: Vec<f64>,
}

/// Train one controller per input format on the same sweep and score each on
/// the same goals and disturbances. Common random numbers across formats make
/// the comparison paired.
pub fn input_format_ablation(
    geometry: &ArmGeometry,
    samples: &[PoseSample],
    pairing: &GoalPairing,
    train_cfg: &TrainConfig,
    scene_params: &SceneParams,
    cfg: &ReachConfig,
) -> Result<Vec<FormatReport>, HarnessError> {
    cfg.validate()?;
    let goals = sample_reach_goals(geometry, scene_params, cfg)?;
    let biases = trial_biases(geometry, cfg);
    let mut reports = Vec::with_capacity(InputFormat::ALL.len());
    for format in InputFormat::ALL {
        let model = train(geometry, samples, format, pairing, train_cfg)?;
        let errors = reach_errors(geometry, &model, &goals, &biases, cfg)?;
        let mean_error = errors.iter().sum::<f64>() / errors.len() as f64;
        reports.push(FormatReport {
            format,
            median_error: median(&errors),
            mean_error,
            errors,
        });
    }
    Ok(reports)
}

/// CSV table of an input-format ablation, one row per format.
pub fn format_report_csv(reports: &[FormatReport]) -> String {
    let mut s = String::from("format,n_goals,median_error,mean_error\n");
    for r in reports {
        s.push_str(&format!(
            "{},{},{:.6},{:.6}\n",
            r.format,
            r.errors.len(),
            r.median_error,
            r.mean_error,
        ));
    }
    s
}
