use super::collision::CollisionStats;
use super::config::TauMode;
use super::edge::edge_check;
use super::rrt::{path_cost, Plan};
use super::PlannerError;
use crate::kinematics::ArmGeometry;
use crate::occupancy::OccupancyGrid;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Randomized shortcutting: repeatedly try to bridge two non-adjacent
/// waypoints directly, keeping the bridge only when it is feasible and
/// strictly cheaper. Endpoints never change; cost never increases.
pub fn shortcut(
    plan: &Plan,
    grid: &OccupancyGrid,
    geometry: &ArmGeometry,
    seed: u64,
    n_attempts: usize,
) -> Result<Plan, PlannerError> {
    let cfg = &plan.config;
    let soft_cap = match cfg.tau_mode {
        TauMode::PerConfig => Some(cfg.tau),
        TauMode::PerPath => None,
    };
    let mut waypoints = plan.waypoints.clone();

    // per-path mode tracks the worst soft-contact count of every edge so the
    // whole-path budget can be re-evaluated after a splice
    let mut edge_soft: Vec<usize> = Vec::new();
    let root_soft = plan.stats.first().map_or(0, |s| s.c_soft);
    if cfg.tau_mode == TauMode::PerPath {
        for w in waypoints.windows(2) {
            let e = edge_check(grid, geometry, &w[0], &w[1], cfg, plan.model, soft_cap)?;
            edge_soft.push(e.worst.c_soft);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_attempts {
        let n = waypoints.len();
        if n < 3 {
            break;
        }
        let i = rng.gen_range(0..n - 2);
        let j = rng.gen_range(i + 2..n);

        let old_cost: f64 = waypoints[i..=j]
            .windows(2)
            .map(|w| super::metric::config_distance(&w[0], &w[1], &cfg.metric_weights))
            .sum();
        let new_cost =
            super::metric::config_distance(&waypoints[i], &waypoints[j], &cfg.metric_weights);
        if new_cost > old_cost {
            continue; // equal cost still accepted: it drops redundant waypoints
        }
        let e = edge_check(
            grid,
            geometry,
            &waypoints[i],
            &waypoints[j],
            cfg,
            plan.model,
            soft_cap,
        )?;
        if !e.feasible {
            continue;
        }
        if cfg.tau_mode == TauMode::PerPath {
            let spliced_total = root_soft
                + edge_soft[..i].iter().sum::<usize>()
                + e.worst.c_soft
                + edge_soft[j..].iter().sum::<usize>();
            if spliced_total > cfg.tau {
                continue;
            }
            edge_soft.splice(i..j, [e.worst.c_soft]);
        }
        waypoints.splice(i + 1..j, std::iter::empty());
    }

    let mut stats: Vec<CollisionStats> = Vec::with_capacity(waypoints.len());
    for w in &waypoints {
        stats.push(plan.model.count(grid, geometry, w, cfg.n_backbone)?);
    }
    let cost = path_cost(&waypoints, &cfg.metric_weights);
    Ok(Plan {
        waypoints,
        stats,
        cost,
        iterations_used: plan.iterations_used,
        seed: plan.seed,
        model: plan.model,
        config: cfg.clone(),
    })
}
