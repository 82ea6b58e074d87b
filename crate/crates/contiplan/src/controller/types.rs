use super::ControllerError;
use crate::kinematics::{ArmGeometry, Pose};
use serde::{Deserialize, Serialize};

/// Full 9-DoF command: joint targets plus normalized chamber commands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Actuation {
    pub rigid_targets: [f64; 6],
    pub soft_commands: [f64; 3],
}

impl Actuation {
    pub fn from_array(u: &[f64; 9]) -> Self {
        Self {
            rigid_targets: [u[0], u[1], u[2], u[3], u[4], u[5]],
            soft_commands: [u[6], u[7], u[8]],
        }
    }

    pub fn as_array(&self) -> [f64; 9] {
        let r = &self.rigid_targets;
        let s = &self.soft_commands;
        [r[0], r[1], r[2], r[3], r[4], r[5], s[0], s[1], s[2]]
    }

    pub fn validate(&self, geometry: &ArmGeometry) -> Result<(), ControllerError> {
        geometry.check_rigid(&crate::kinematics::RigidConfig::new(self.rigid_targets))?;
        for (index, &value) in self.soft_commands.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(crate::kinematics::KinematicsError::ChamberOutOfRange {
                    index,
                    value,
                }
                .into());
            }
        }
        Ok(())
    }

    /// Clamp joints to limits and chambers to [0, 1].
    pub fn clamped(&self, geometry: &ArmGeometry) -> Self {
        let mut out = *self;
        for i in 0..6 {
            let [lo, hi] = geometry.joint_limits[i];
            out.rigid_targets[i] = out.rigid_targets[i].clamp(lo, hi);
        }
        for c in out.soft_commands.iter_mut() {
            *c = c.clamp(0.0, 1.0);
        }
        out
    }
}

/// One record of the synthetic sweep: a commanded actuation and the tip pose
/// it settles at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseSample {
    pub pose: Pose,
    pub actuation: Actuation,
}

/// What the network sees alongside (implicitly) predicting the goal's
/// actuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    /// Current tip pose + relative pose to the goal (18 values).
    CurrentPlusRelative,
    /// Goal tip pose alone (9 values).
    GoalOnly,
    /// Current tip pose + goal tip pose (18 values).
    CurrentPlusGoal,
    /// Relative pose to the goal alone (9 values).
    RelativeOnly,
}

impl InputFormat {
    pub const ALL: [InputFormat; 4] = [
        InputFormat::CurrentPlusRelative,
        InputFormat::GoalOnly,
        InputFormat::CurrentPlusGoal,
        InputFormat::RelativeOnly,
    ];
}

impl std::fmt::Display for InputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            InputFormat::CurrentPlusRelative => "current-plus-relative",
            InputFormat::GoalOnly => "goal-only",
            InputFormat::CurrentPlusGoal => "current-plus-goal",
            InputFormat::RelativeOnly => "relative-only",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for InputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "current-plus-relative" => Ok(InputFormat::CurrentPlusRelative),
            "goal-only" => Ok(InputFormat::GoalOnly),
            "current-plus-goal" => Ok(InputFormat::CurrentPlusGoal),
            "relative-only" => Ok(InputFormat::RelativeOnly),
            other => Err(format!("unknown input format '{other}'")),
        }
    }
}

/// Probabilities of the non-uniform pair draws; the remainder is uniform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixWeights {
    /// Probability that the goal is the current sample itself (hold pairs).
    pub p_self: f64,
    /// Probability that the goal is one of the current sample's k nearest
    /// neighbors in actuation space (fine-correction pairs).
    pub p_local: f64,
}

impl MixWeights {
    pub fn validate(&self) -> Result<(), ControllerError> {
        if self.p_self < 0.0 || self.p_local < 0.0 || self.p_self + self.p_local > 1.0 {
            return Err(ControllerError::InvalidConfig(format!(
                "pair mix (p_self={}, p_local={}) must be non-negative and sum to <= 1",
                self.p_self, self.p_local
            )));
        }
        Ok(())
    }
}

/// How (current, goal) training pairs are drawn from the sweep dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "strategy")]
pub enum GoalPairing {
    /// Uniform random (current, goal) index pairs.
    Random,
    /// Fixed mixture of self, local-neighbor, and uniform pairs.
    Mixed { weights: MixWeights, k_neighbors: usize },
    /// Mixture that shifts at `switch_frac` of training, emphasizing
    /// hold/fine-correction pairs late (polish phase).
    Scheduled {
        early: MixWeights,
        late: MixWeights,
        switch_frac: f64,
        k_neighbors: usize,
    },
}

impl GoalPairing {
    pub fn validate(&self) -> Result<(), ControllerError> {
        match self {
            GoalPairing::Random => Ok(()),
            GoalPairing::Mixed { weights, k_neighbors } => {
                weights.validate()?;
                if *k_neighbors == 0 {
                    return Err(ControllerError::InvalidConfig(
                        "k_neighbors must be >= 1".into(),
                    ));
                }
                Ok(())
            }
            GoalPairing::Scheduled {
                early,
                late,
                switch_frac,
                k_neighbors,
            } => {
                early.validate()?;
                late.validate()?;
                if !(0.0..=1.0).contains(switch_frac) {
                    return Err(ControllerError::InvalidConfig(format!(
                        "switch_frac {switch_frac} outside [0, 1]"
                    )));
                }
                if *k_neighbors == 0 {
                    return Err(ControllerError::InvalidConfig(
                        "k_neighbors must be >= 1".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn needs_neighbors(&self) -> Option<usize> {
        match self {
            GoalPairing::Random => None,
            GoalPairing::Mixed { k_neighbors, .. } => Some(*k_neighbors),
            GoalPairing::Scheduled { k_neighbors, .. } => Some(*k_neighbors),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Optimizer {
    /// Plain minibatch gradient descent.
    Sgd,
    /// Adam with the usual moment estimates.
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl Default for Optimizer {
    fn default() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum LrSchedule {
    #[default]
    Constant,
    /// Cosine decay from `learning_rate` to `floor` over the full run.
    Cosine { floor: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub hidden_size: usize,
    pub n_layers: usize,
    pub optimizer: Optimizer,
    pub lr_schedule: LrSchedule,
    /// Held-out pair count used for the recorded validation loss.
    pub n_val_pairs: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        // desk preset: a miniature of the reference network
        Self {
            batch_size: 256,
            learning_rate: 1e-4,
            epochs: 600,
            seed: 0,
            hidden_size: 256,
            n_layers: 6,
            optimizer: Optimizer::default(),
            lr_schedule: LrSchedule::default(),
            n_val_pairs: 2000,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ControllerError> {
        let bad = |m: String| Err(ControllerError::InvalidConfig(m));
        if self.batch_size == 0 || self.epochs == 0 || self.hidden_size == 0 {
            return bad("batch_size, epochs, hidden_size must be positive".into());
        }
        if self.n_layers < 2 {
            return bad(format!("n_layers must be >= 2, got {}", self.n_layers));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return bad(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if let LrSchedule::Cosine { floor } = self.lr_schedule {
            if floor.is_nan() || floor < 0.0 || floor > self.learning_rate {
                return bad(format!(
                    "cosine floor {floor} must lie in [0, learning_rate]"
                ));
            }
        }
        Ok(())
    }
}
