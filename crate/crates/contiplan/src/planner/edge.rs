use super::collision::{CollisionModel, CollisionStats};
use super::config::PlannerConfig;
use super::metric::{config_distance, interpolate};
use crate::kinematics::{ArmGeometry, HybridConfig, KinematicsError};
use crate::occupancy::OccupancyGrid;

/// Result of walking an edge at the configured collision resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeCheck {
    pub feasible: bool,
    /// Worst per-configuration stats seen along the edge.
    pub worst: CollisionStats,
    pub checked_configs: usize,
}

/// Interpolate `a → b` at `edge_check_resolution` and collision-check every
/// intermediate configuration (excluding `a`, which the caller has already
/// admitted; including `b`). `soft_cap = Some(tau)` enforces the
/// per-configuration soft budget; `None` only forbids rigid contact, leaving
/// budget accounting to the caller (per-path mode).
pub fn edge_check(
    grid: &OccupancyGrid,
    geometry: &ArmGeometry,
    a: &HybridConfig,
    b: &HybridConfig,
    cfg: &PlannerConfig,
    model: CollisionModel,
    soft_cap: Option<usize>,
) -> Result<EdgeCheck, KinematicsError> {
    let d = config_distance(a, b, &cfg.metric_weights);
    let n_steps = (d / cfg.edge_check_resolution).ceil().max(1.0) as usize;
    let mut worst = CollisionStats::default();
    let mut checked = 0;
    for k in 1..=n_steps {
        let q = interpolate(a, b, k as f64 / n_steps as f64);
        let stats = model.count(grid, geometry, &q, cfg.n_backbone)?;
        checked += 1;
        worst = worst.max(&stats);
        let ok = stats.c_rigid == 0 && soft_cap.is_none_or(|tau| stats.c_soft <= tau);
        if !ok {
            return Ok(EdgeCheck {
                feasible: false,
                worst,
                checked_configs: checked,
            });
        }
    }
    Ok(EdgeCheck {
        feasible: true,
        worst,
        checked_configs: checked,
    })
}

/// Spec-facing wrapper: full-backbone model, per-configuration tau.
pub fn edge_feasible(
    grid: &OccupancyGrid,
    geometry: &ArmGeometry,
    a: &HybridConfig,
    b: &HybridConfig,
    cfg: &PlannerConfig,
) -> Result<(bool, CollisionStats), KinematicsError> {
    let check = edge_check(
        grid,
        geometry,
        a,
        b,
        cfg,
        CollisionModel::FullBackbone,
        Some(cfg.tau),
    )?;
    Ok((check.feasible, check.worst))
}
