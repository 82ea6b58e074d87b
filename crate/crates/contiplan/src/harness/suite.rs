use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::summary::{summarize, summary_csv, trials_csv};
use super::trial::run_trial;
use super::types::{Method, MetricsSummary, TrialConfig, TrialController, TrialResult};
use super::HarnessError;
use crate::kinematics::ArmGeometry;
use crate::occupancy::{generate_scene, Archetype};
use crate::seed::mix_seed;

/// Cross-product experiment definition: every archetype x tau x method x
/// trial index becomes one seeded trial. Scenes depend only on the suite seed
/// and the trial index, so every method and tau sees identical scenes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub trial: TrialConfig,
    pub archetypes: Vec<Archetype>,
    pub methods: Vec<Method>,
    pub taus: Vec<usize>,
    /// Trials per (archetype, tau, method) cell.
    pub trials_per_case: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trial: TrialConfig::default(),
            archetypes: Archetype::ALL.to_vec(),
            methods: vec![Method::Ours],
            taus: vec![5],
            trials_per_case: 11,
            seed: 0,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        self.trial.validate()?;
        if self.archetypes.is_empty() || self.methods.is_empty() || self.taus.is_empty() {
            return Err(HarnessError::InvalidConfig(
                "archetypes, methods, taus must be non-empty".into(),
            ));
        }
        if self.trials_per_case == 0 {
            return Err(HarnessError::InvalidConfig(
                "trials_per_case must be >= 1".into(),
            ));
        }
        for &tau in &self.taus {
            let mut t = self.trial.clone();
            t.planner.tau = tau;
            t.validate()?;
        }
        Ok(())
    }
}

/// Results plus their aggregation, in canonical order.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub results: Vec<TrialResult>,
    pub summaries: Vec<MetricsSummary>,
}

/// Run the full cross product. Deterministic: scene seeds derive from
/// (suite seed, trial index), planner seeds from the full cell coordinates.
pub fn run_suite(
    geometry: &ArmGeometry,
    controller: &TrialController<'_>,
    cfg: &SuiteConfig,
) -> Result<SuiteOutcome, HarnessError> {
    cfg.validate()?;
    let mut results = Vec::new();
    for (ai, &archetype) in cfg.archetypes.iter().enumerate() {
        for (ti, &tau) in cfg.taus.iter().enumerate() {
            let mut trial_cfg = cfg.trial.clone();
            trial_cfg.planner.tau = tau;
            for (mi, &method) in cfg.methods.iter().enumerate() {
                for k in 0..cfg.trials_per_case {
                    let scene_seed = mix_seed(cfg.seed, &[k as u64]);
                    let scene = generate_scene(archetype, scene_seed, &cfg.trial.scene)?;
                    let trial_seed =
                        mix_seed(cfg.seed, &[ai as u64, ti as u64, mi as u64, k as u64]);
                    results.push(run_trial(
                        &scene,
                        method,
                        controller,
                        geometry,
                        &trial_cfg,
                        trial_seed,
                    )?);
                }
            }
        }
    }
    let summaries = summarize(&results)?;
    Ok(SuiteOutcome { results, summaries })
}

/// Which scene-level ablation to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AblationKind {
    /// Tip-only planning vs full-backbone planning.
    NoShape,
    /// Straight substitute link vs the bending segment.
    RigidOnly,
}

/// Paired comparison of a baseline against the full method on the same
/// scenes: dispatches run_suite with methods {Ours, baseline}.
pub fn ablation_suite(
    kind: AblationKind,
    geometry: &ArmGeometry,
    controller: &TrialController<'_>,
    cfg: &SuiteConfig,
) -> Result<SuiteOutcome, HarnessError> {
    let mut cfg = cfg.clone();
    cfg.methods = match kind {
        AblationKind::NoShape => vec![Method::Ours, Method::NoShape],
        AblationKind::RigidOnly => vec![Method::Ours, Method::RigidOnly],
    };
    run_suite(geometry, controller, &cfg)
}

/// Sweep the soft-contact threshold: one run_suite per tau value, pooled into
/// a single outcome so the per-tau groups sit side by side.
pub fn tau_sweep(
    geometry: &ArmGeometry,
    controller: &TrialController<'_>,
    cfg: &SuiteConfig,
) -> Result<SuiteOutcome, HarnessError> {
    run_suite(geometry, controller, cfg)
}

/// Per-tau pooled counts used by the sweep-direction checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauPoint {
    pub tau: usize,
    pub n_trials: usize,
    pub plans_found: usize,
    pub soft_contacts_total: usize,
}

/// Pool an outcome's trials by tau, ascending.
pub fn tau_profile(results: &[TrialResult]) -> Vec<TauPoint> {
    let mut taus: Vec<usize> = results.iter().map(|r| r.tau).collect();
    taus.sort_unstable();
    taus.dedup();
    taus.iter()
        .map(|&tau| {
            let rows = results.iter().filter(|r| r.tau == tau);
            let mut point = TauPoint {
                tau,
                n_trials: 0,
                plans_found: 0,
                soft_contacts_total: 0,
            };
            for r in rows {
                point.n_trials += 1;
                point.plans_found += r.plan_found as usize;
                point.soft_contacts_total += r.plan_soft_contacts;
            }
            point
        })
        .collect()
}

/// Canonical result files: JSON-lines trials, summary CSV, long-format CSV.
/// Byte-identical across reruns with the same config and seeds. Wall-clock
/// data goes to a separate sidecar via `write_sidecar`.
pub fn write_outcome(dir: &Path, outcome: &SuiteOutcome) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::Io(format!("{}: {e}", dir.display())))?;
    let jsonl_path = dir.join("trials.jsonl");
    let mut jsonl = String::new();
    for r in &outcome.results {
        let line = serde_json::to_string(r)
            .map_err(|e| HarnessError::Io(format!("serializing trial: {e}")))?;
        jsonl.push_str(&line);
        jsonl.push('\n');
    }
    write_text(&jsonl_path, &jsonl)?;
    write_text(&dir.join("summary.csv"), &summary_csv(&outcome.summaries))?;
    write_text(&dir.join("trials.csv"), &trials_csv(&outcome.results))?;
    Ok(())
}

/// Non-canonical run metadata: wall-clock stage durations per trial and the
/// unix timestamp of the write. Excluded from reproducibility comparisons.
pub fn write_sidecar(dir: &Path, outcome: &SuiteOutcome) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::Io(format!("{}: {e}", dir.display())))?;
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let timings: Vec<serde_json::Value> = outcome
        .results
        .iter()
        .enumerate()
        .map(|(i, r)| {
            serde_json::json!({
                "trial": i,
                "scene_s": r.timings.scene_s,
                "plan_s": r.timings.plan_s,
                "execute_s": r.timings.execute_s,
                "total_s": r.timings.total_s,
            })
        })
        .collect();
    let sidecar = serde_json::json!({
        "unix_time": stamp,
        "timings": timings,
    });
    let text = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| HarnessError::Io(format!("serializing sidecar: {e}")))?;
    write_text(&dir.join("sidecar.json"), &text)
}

fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    let mut f = fs::File::create(path)
        .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    f.write_all(text.as_bytes())
        .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}
