use super::PlannerError;
use serde::{Deserialize, Serialize};

/// How the soft-contact threshold is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TauMode {
    /// Every checked configuration must satisfy c_soft ≤ τ.
    #[default]
    PerConfig,
    /// The soft-contact counts accumulated along the path (sum over edges of
    /// the worst per-configuration count) must stay ≤ τ. Runs without
    /// rewiring so the accumulated budget per node stays exact.
    PerPath,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    /// Allowed soft-segment contact count.
    pub tau: usize,
    /// Backbone samples per collision check.
    pub n_backbone: usize,
    /// Max extension length per steering step, in metric units.
    pub step_size: f64,
    /// Probability of sampling an IK seed toward a goal candidate.
    pub goal_bias: f64,
    /// Neighbor radius for parent choice and rewiring.
    pub rewire_radius: f64,
    pub max_iterations: usize,
    /// Interpolation spacing for edge collision checks.
    pub edge_check_resolution: f64,
    /// Tip position tolerance for goal connection, meters.
    pub goal_position_tolerance: f64,
    /// Tip approach-axis tolerance for goal connection, radians.
    pub goal_axis_tolerance: f64,
    /// Metric weights: 6 joints, curvature, bend plane.
    pub metric_weights: [f64; 8],
    pub tau_mode: TauMode,
    /// After connecting within tolerance, try to append an exact IK solution
    /// at the goal candidate pose (kept only if the edge to it is feasible).
    pub exact_goal_connection: bool,
    /// Shortcut attempts applied by `plan` callers that post-process.
    pub shortcut_attempts: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            tau: 0,
            n_backbone: 50,
            step_size: 0.15,
            goal_bias: 0.1,
            rewire_radius: 0.3,
            max_iterations: 20_000,
            edge_check_resolution: 0.0375,
            goal_position_tolerance: 0.015,
            goal_axis_tolerance: 0.35,
            // joints in radians; curvature and bend plane scaled by the soft
            // arc length so both terms are bend angles in radians
            metric_weights: [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.2, 0.2],
            tau_mode: TauMode::PerConfig,
            exact_goal_connection: true,
            shortcut_attempts: 200,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), PlannerError> {
        let bad = |m: String| Err(PlannerError::InvalidConfig(m));
        if self.n_backbone < 2 {
            return bad(format!("n_backbone must be >= 2, got {}", self.n_backbone));
        }
        if self.tau > self.n_backbone {
            return bad(format!(
                "tau {} outside 0..={}",
                self.tau, self.n_backbone
            ));
        }
        if !(0.0..=1.0).contains(&self.goal_bias) {
            return bad(format!("goal_bias {} outside [0, 1]", self.goal_bias));
        }
        for (name, v) in [
            ("step_size", self.step_size),
            ("rewire_radius", self.rewire_radius),
            ("edge_check_resolution", self.edge_check_resolution),
            ("goal_position_tolerance", self.goal_position_tolerance),
            ("goal_axis_tolerance", self.goal_axis_tolerance),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return bad(format!("{name} must be a positive finite number, got {v}"));
            }
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be > 0".into());
        }
        for (i, w) in self.metric_weights.iter().enumerate() {
            if !w.is_finite() || *w < 0.0 {
                return bad(format!("metric weight {i} must be >= 0, got {w}"));
            }
        }
        if self.metric_weights[..6].iter().all(|w| *w == 0.0) {
            return bad("at least one joint metric weight must be positive".into());
        }
        Ok(())
    }
}
