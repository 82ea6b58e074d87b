use std::collections::BTreeMap;

use super::types::{Method, MetricsSummary, TrialResult};
use super::HarnessError;

/// Population mean and standard deviation.
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Aggregate trials into per-(archetype, method, tau) rows, sorted by group
/// key. Every input trial lands in exactly one group.
pub fn summarize(results: &[TrialResult]) -> Result<Vec<MetricsSummary>, HarnessError> {
    if results.is_empty() {
        return Err(HarnessError::EmptyResults);
    }
    let mut groups: BTreeMap<(String, Method, usize), Vec<&TrialResult>> = BTreeMap::new();
    for r in results {
        groups
            .entry((r.archetype.to_string(), r.method, r.tau))
            .or_default()
            .push(r);
    }
    let mut out = Vec::with_capacity(groups.len());
    let mut counted = 0usize;
    for ((_, method, tau), rows) in groups {
        counted += rows.len();
        let n = rows.len();
        let errs: Vec<f64> = rows.iter().map(|r| r.trans_err).collect();
        let (trans_err_mean, trans_err_std) = mean_std(&errs);
        let deltas: Vec<f64> = rows.iter().map(|r| r.init_delta).collect();
        let (init_delta_mean, _) = mean_std(&deltas);
        out.push(MetricsSummary {
            archetype: rows[0].archetype,
            method,
            tau,
            n_trials: n,
            n_plan_found: rows.iter().filter(|r| r.plan_found).count(),
            sr_2cm_pct: 100.0 * rows.iter().filter(|r| r.success_2cm).count() as f64 / n as f64,
            sr_touch_pct: 100.0 * rows.iter().filter(|r| r.success_touch).count() as f64
                / n as f64,
            trans_err_mean,
            trans_err_std,
            init_delta_mean,
            violation_trials: rows
                .iter()
                .filter(|r| r.rigid_contact_violations > 0)
                .count(),
            soft_contacts_total: rows.iter().map(|r| r.plan_soft_contacts).sum(),
        });
    }
    debug_assert_eq!(counted, results.len());
    Ok(out)
}

pub const SUMMARY_CSV_HEADER: &str = "archetype,method,tau,n_trials,n_plan_found,sr_2cm_pct,\
sr_touch_pct,trans_err_mean,trans_err_std,init_delta_mean,violation_trials,soft_contacts_total";

/// Render summaries as a CSV table, one row per group.
pub fn summary_csv(summaries: &[MetricsSummary]) -> String {
    let mut s = String::from(SUMMARY_CSV_HEADER);
    s.push('\n');
    for m in summaries {
        s.push_str(&format!(
            "{},{},{},{},{},{:.4},{:.4},{:.6},{:.6},{:.6},{},{}\n",
            m.archetype,
            m.method,
            m.tau,
            m.n_trials,
            m.n_plan_found,
            m.sr_2cm_pct,
            m.sr_touch_pct,
            m.trans_err_mean,
            m.trans_err_std,
            m.init_delta_mean,
            m.violation_trials,
            m.soft_contacts_total,
        ));
    }
    s
}

/// Long-format CSV of raw trials for external plotting.
pub const TRIALS_CSV_HEADER: &str = "archetype,scene_seed,trial_seed,method,tau,plan_found,\
success_2cm,success_touch,trans_err,init_delta,rigid_contact_violations,plan_soft_contacts,\
plan_cost,n_waypoints,execution_reached";

pub fn trials_csv(results: &[TrialResult]) -> String {
    let mut s = String::from(TRIALS_CSV_HEADER);
    s.push('\n');
    for r in results {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{:.6},{:.6},{},{},{:.6},{},{}\n",
            r.archetype,
            r.scene_seed,
            r.trial_seed,
            r.method,
            r.tau,
            r.plan_found,
            r.success_2cm,
            r.success_touch,
            r.trans_err,
            r.init_delta,
            r.rigid_contact_violations,
            r.plan_soft_contacts,
            r.plan_cost,
            r.n_waypoints,
            r.execution_reached,
        ));
    }
    s
}
