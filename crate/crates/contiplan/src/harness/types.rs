use crate::controller::ControllerModel;
use crate::kinematics::IkOptions;
use crate::occupancy::{Archetype, SceneParams};
use crate::planner::PlannerConfig;
use serde::{Deserialize, Serialize};

use super::HarnessError;

/// Pipeline variant under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Full-backbone planning, commanded controller.
    Ours,
    /// Soft segment swapped for an equal-length straight rigid link.
    RigidOnly,
    /// Tip-only collision checks during planning.
    NoShape,
    /// Full-backbone planning, iterative IK controller instead of the
    /// learned one.
    OracleController,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Ours,
        Method::RigidOnly,
        Method::NoShape,
        Method::OracleController,
    ];
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Ours => "ours",
            Method::RigidOnly => "rigid-only",
            Method::NoShape => "no-shape",
            Method::OracleController => "oracle-controller",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ours" => Ok(Method::Ours),
            "rigid-only" | "rigidonly" => Ok(Method::RigidOnly),
            "no-shape" | "noshape" => Ok(Method::NoShape),
            "oracle-controller" | "oracle" => Ok(Method::OracleController),
            other => Err(HarnessError::InvalidConfig(format!(
                "unknown method '{other}', expected ours | rigid-only | no-shape | oracle-controller"
            ))),
        }
    }
}

/// Which controller tracks the planned waypoints.
#[derive(Debug, Clone, Copy)]
pub enum TrialController<'a> {
    Learned(&'a ControllerModel),
    Oracle(IkOptions),
}

/// Wall-clock stage durations in seconds. Kept out of the canonical result
/// rows so reruns stay byte-identical; suites write them to a sidecar.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub scene_s: f64,
    pub plan_s: f64,
    pub execute_s: f64,
    pub total_s: f64,
}

/// One end-to-end trial: scene, goal detection, planning, execution, metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub archetype: Archetype,
    pub scene_seed: u64,
    /// Seed of the planner RNG for this trial.
    pub trial_seed: u64,
    pub method: Method,
    pub tau: usize,
    pub plan_found: bool,
    /// Tip within 2 cm of the goal with a clear straight ray to it.
    pub success_2cm: bool,
    /// Tip inside the goal voxel dilated by one voxel.
    pub success_touch: bool,
    /// Final tip distance to the goal position, meters.
    pub trans_err: f64,
    /// Start tip distance to the goal position, meters.
    pub init_delta: f64,
    /// Densified plan configurations violating the full feasibility rule of
    /// the method's physical collision model.
    pub rigid_contact_violations: usize,
    /// Sum of per-waypoint soft contacts of the accepted plan.
    pub plan_soft_contacts: usize,
    pub plan_cost: f64,
    pub n_waypoints: usize,
    /// Closed-loop tracking reached every waypoint within tolerance.
    pub execution_reached: bool,
    #[serde(skip)]
    pub timings: StageTimings,
}

/// Per-group aggregate of trial results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub archetype: Archetype,
    pub method: Method,
    pub tau: usize,
    pub n_trials: usize,
    pub n_plan_found: usize,
    pub sr_2cm_pct: f64,
    pub sr_touch_pct: f64,
    /// Mean and population standard deviation of trans_err over all trials.
    pub trans_err_mean: f64,
    pub trans_err_std: f64,
    pub init_delta_mean: f64,
    /// Trials whose plan had at least one feasibility violation on recheck.
    pub violation_trials: usize,
    /// Total soft contacts summed over the accepted plans of the group.
    pub soft_contacts_total: usize,
}

/// Everything a single trial needs besides the scene and the controller.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TrialConfig {
    pub scene: SceneParams,
    pub planner: PlannerConfig,
    /// Occupancy grid resolution, meters.
    pub voxel_size: f64,
    /// Goal-candidate standoff distance, meters.
    pub standoff: f64,
    /// Closed-loop waypoint tolerance, meters.
    pub waypoint_tolerance: f64,
    pub max_steps_per_waypoint: usize,
    /// Apply shortcutting to found plans before execution.
    pub shortcut: bool,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            scene: SceneParams::default(),
            planner: PlannerConfig::default(),
            voxel_size: 0.02,
            standoff: 0.0,
            waypoint_tolerance: 0.008,
            max_steps_per_waypoint: 8,
            shortcut: true,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        self.planner.validate()?;
        if !self.voxel_size.is_finite() || self.voxel_size <= 0.0 {
            return Err(HarnessError::InvalidConfig(format!(
                "voxel_size must be positive, got {}",
                self.voxel_size
            )));
        }
        if self.standoff < 0.0 || !self.standoff.is_finite() {
            return Err(HarnessError::InvalidConfig(format!(
                "standoff must be >= 0, got {}",
                self.standoff
            )));
        }
        if !self.waypoint_tolerance.is_finite() || self.waypoint_tolerance <= 0.0 {
            return Err(HarnessError::InvalidConfig(format!(
                "waypoint_tolerance must be positive, got {}",
                self.waypoint_tolerance
            )));
        }
        if self.max_steps_per_waypoint == 0 {
            return Err(HarnessError::InvalidConfig(
                "max_steps_per_waypoint must be >= 1".into(),
            ));
        }
        Ok(())
    }
}
