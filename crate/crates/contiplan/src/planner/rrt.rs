use super::collision::{feasible, CollisionModel, CollisionStats};
use super::config::{PlannerConfig, TauMode};
use super::edge::edge_check;
use super::metric::{clamp_config, config_distance, steer};
use super::PlannerError;
use crate::kinematics::{
    ik_hybrid, ik_rigid_only, kappa_ceiling, tip_pose, ArmGeometry, HybridConfig, IkOptions, Pose,
    RigidConfig, SoftConfig,
};
use crate::occupancy::{GoalCandidate, OccupancyGrid};
use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A collision-checked waypoint path from the start configuration to a goal
/// candidate, plus the bookkeeping needed for replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub waypoints: Vec<HybridConfig>,
    /// Collision stats per waypoint, same length as `waypoints`.
    pub stats: Vec<CollisionStats>,
    /// Config-space path length under the planner metric.
    pub cost: f64,
    pub iterations_used: usize,
    pub seed: u64,
    pub model: CollisionModel,
    /// Echo of the planner configuration that produced this plan.
    pub config: PlannerConfig,
}

impl Plan {
    /// Tip poses of all waypoints, in order.
    pub fn tip_poses(&self, geometry: &ArmGeometry) -> Result<Vec<Pose>, PlannerError> {
        self.waypoints
            .iter()
            .map(|w| tip_pose(geometry, w).map_err(PlannerError::from))
            .collect()
    }
}

struct Node {
    config: HybridConfig,
    tip: Pose,
    parent: Option<usize>,
    cost: f64,
    /// Per-path mode: soft contacts accumulated from the root.
    soft_budget: usize,
}

struct Tree {
    nodes: Vec<Node>,
    children: Vec<Vec<usize>>,
}

impl Tree {
    fn push(&mut self, node: Node) -> usize {
        let idx = self.nodes.len();
        if let Some(p) = node.parent {
            self.children[p].push(idx);
        }
        self.nodes.push(node);
        self.children.push(Vec::new());
        idx
    }

    fn nearest(&self, q: &HybridConfig, weights: &[f64; 8]) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, n) in self.nodes.iter().enumerate() {
            let d = config_distance(&n.config, q, weights);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    fn rewire_to(&mut self, child: usize, new_parent: usize, new_cost: f64) {
        let old_parent = self.nodes[child].parent.expect("root is never rewired");
        self.children[old_parent].retain(|&c| c != child);
        self.children[new_parent].push(child);
        self.nodes[child].parent = Some(new_parent);
        let delta = new_cost - self.nodes[child].cost;
        let mut stack = vec![child];
        while let Some(i) = stack.pop() {
            self.nodes[i].cost += delta;
            stack.extend_from_slice(&self.children[i]);
        }
    }
}

fn goal_match(
    tip: &Pose,
    goals: &[GoalCandidate],
    pos_tol: f64,
    axis_tol: f64,
) -> Option<usize> {
    goals.iter().position(|g| {
        let dp = (tip.translation - g.pose.translation).norm();
        if dp > pos_tol {
            return false;
        }
        let zc: Vector3<f64> = tip.rotation.column(2).into_owned();
        let zg: Vector3<f64> = g.pose.rotation.column(2).into_owned();
        zc.dot(&zg).clamp(-1.0, 1.0).acos() <= axis_tol
    })
}

fn uniform_sample(rng: &mut ChaCha8Rng, geometry: &ArmGeometry) -> HybridConfig {
    let mut joints = [0.0; 6];
    for (i, j) in joints.iter_mut().enumerate() {
        let [lo, hi] = geometry.joint_limits[i];
        *j = rng.gen_range(lo..hi);
    }
    let kappa = rng.gen_range(0.0..kappa_ceiling(geometry));
    let phi = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    HybridConfig {
        rigid: RigidConfig::new(joints),
        soft: SoftConfig {
            kappa,
            phi,
            arc_length: geometry.soft_length,
        },
    }
}

/// Shape-informed plan: full-backbone collision checks.
pub fn plan(
    start: &HybridConfig,
    goals: &[GoalCandidate],
    grid: &OccupancyGrid,
    geometry: &ArmGeometry,
    cfg: &PlannerConfig,
    seed: u64,
) -> Result<Plan, PlannerError> {
    plan_with_model(start, goals, grid, geometry, cfg, seed, CollisionModel::FullBackbone)
}

/// End-effector-only ablation: only the tip point is collision-checked.
pub fn plan_end_effector_only(
    start: &HybridConfig,
    goals: &[GoalCandidate],
    grid: &OccupancyGrid,
    geometry: &ArmGeometry,
    cfg: &PlannerConfig,
    seed: u64,
) -> Result<Plan, PlannerError> {
    plan_with_model(start, goals, grid, geometry, cfg, seed, CollisionModel::TipOnly)
}

/// Rigid-only baseline: plans over the 6 joints with the soft segment swapped
/// for a straight link of equal length. All contacts count as rigid, so tau
/// buys no slack, and every waypoint keeps a straight soft configuration.
pub fn plan_rigid_only(
    start: &HybridConfig,
    goals: &[GoalCandidate],
    grid: &OccupancyGrid,
    geometry: &ArmGeometry,
    cfg: &PlannerConfig,
    seed: u64,
) -> Result<Plan, PlannerError> {
    let start = zero_soft(start, geometry);
    plan_with_model(&start, goals, grid, geometry, cfg, seed, CollisionModel::RigidSubstitute)
}

/// Straightened copy of a configuration: the joints kept, the bend removed.
fn zero_soft(config: &HybridConfig, geometry: &ArmGeometry) -> HybridConfig {
    HybridConfig {
        rigid: config.rigid,
        soft: SoftConfig {
            kappa: 0.0,
            phi: 0.0,
            arc_length: geometry.soft_length,
        },
    }
}

fn plan_with_model(
    start: &HybridConfig,
    goals: &[GoalCandidate],
    grid: &OccupancyGrid,
    geometry: &ArmGeometry,
    cfg: &PlannerConfig,
    seed: u64,
    model: CollisionModel,
) -> Result<Plan, PlannerError> {
    cfg.validate()?;
    geometry.check_config(start)?;
    if goals.is_empty() {
        return Err(PlannerError::NoGoalCandidates);
    }
    let root_stats = model.count(grid, geometry, start, cfg.n_backbone)?;
    if !feasible(&root_stats, cfg.tau) {
        return Err(PlannerError::InfeasibleStart {
            c_rigid: root_stats.c_rigid,
            c_soft: root_stats.c_soft,
        });
    }
    let soft_cap = match cfg.tau_mode {
        TauMode::PerConfig => Some(cfg.tau),
        TauMode::PerPath => None,
    };
    let rewiring = cfg.tau_mode == TauMode::PerConfig;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = Tree {
        nodes: Vec::new(),
        children: Vec::new(),
    };
    tree.push(Node {
        config: *start,
        tip: tip_pose(geometry, start)?,
        parent: None,
        cost: 0.0,
        soft_budget: root_stats.c_soft,
    });

    // the start might already satisfy the goal test
    if goal_match(
        &tree.nodes[0].tip,
        goals,
        cfg.goal_position_tolerance,
        cfg.goal_axis_tolerance,
    )
    .is_some()
    {
        return extract(&tree, 0, 0, seed, model, cfg, grid, geometry, goals);
    }

    let bias_opts = IkOptions {
        max_iterations: 60,
        position_tolerance: 1e-3,
        axis_tolerance: cfg.goal_axis_tolerance,
        ..IkOptions::default()
    };

    for iteration in 1..=cfg.max_iterations {
        // sample, biased toward a goal candidate with probability goal_bias
        let sample = if rng.gen::<f64>() < cfg.goal_bias {
            let g = &goals[rng.gen_range(0..goals.len())];
            let seed_idx = nearest_tip(&tree, &g.pose.translation);
            let solved = if model == CollisionModel::RigidSubstitute {
                let ik =
                    ik_rigid_only(geometry, &tree.nodes[seed_idx].config.rigid, &g.pose, &bias_opts)?;
                HybridConfig {
                    rigid: ik.solution,
                    soft: tree.nodes[seed_idx].config.soft,
                }
            } else {
                ik_hybrid(geometry, &tree.nodes[seed_idx].config, &g.pose, &bias_opts)?.solution
            };
            clamp_config(&solved, geometry)
        } else {
            let mut s = uniform_sample(&mut rng, geometry);
            if model == CollisionModel::RigidSubstitute {
                s = zero_soft(&s, geometry);
            }
            s
        };

        let nearest = tree.nearest(&sample, &cfg.metric_weights);
        let new_config = steer(
            &tree.nodes[nearest].config,
            &sample,
            cfg.step_size,
            &cfg.metric_weights,
            geometry,
        );
        if config_distance(&tree.nodes[nearest].config, &new_config, &cfg.metric_weights) < 1e-12 {
            continue;
        }

        let near_edge = edge_check(
            grid,
            geometry,
            &tree.nodes[nearest].config,
            &new_config,
            cfg,
            model,
            soft_cap,
        )?;
        if !near_edge.feasible {
            continue;
        }
        if cfg.tau_mode == TauMode::PerPath
            && tree.nodes[nearest].soft_budget + near_edge.worst.c_soft > cfg.tau
        {
            continue;
        }

        // choose parent: cheapest feasible connection among neighbors
        let mut parent = nearest;
        let mut parent_cost = tree.nodes[nearest].cost
            + config_distance(&tree.nodes[nearest].config, &new_config, &cfg.metric_weights);
        if rewiring {
            let mut neighbors: Vec<(f64, usize)> = tree
                .nodes
                .iter()
                .enumerate()
                .filter(|(i, n)| {
                    *i != nearest
                        && config_distance(&n.config, &new_config, &cfg.metric_weights)
                            <= cfg.rewire_radius
                })
                .map(|(i, n)| {
                    (
                        n.cost + config_distance(&n.config, &new_config, &cfg.metric_weights),
                        i,
                    )
                })
                .collect();
            neighbors.sort_by(|a, b| a.partial_cmp(b).expect("finite costs"));
            for (cand_cost, i) in neighbors {
                if cand_cost >= parent_cost {
                    break;
                }
                let e = edge_check(
                    grid,
                    geometry,
                    &tree.nodes[i].config,
                    &new_config,
                    cfg,
                    model,
                    soft_cap,
                )?;
                if e.feasible {
                    parent = i;
                    parent_cost = cand_cost;
                    break;
                }
            }
        }

        let soft_budget = if cfg.tau_mode == TauMode::PerPath {
            tree.nodes[parent].soft_budget + near_edge.worst.c_soft
        } else {
            0
        };
        let new_idx = tree.push(Node {
            config: new_config,
            tip: tip_pose(geometry, &new_config)?,
            parent: Some(parent),
            cost: parent_cost,
            soft_budget,
        });

        // rewire neighbors through the new node when that lowers their cost
        if rewiring {
            for j in 0..new_idx {
                if tree.nodes[j].parent.is_none() {
                    continue;
                }
                let d = config_distance(
                    &tree.nodes[j].config,
                    &tree.nodes[new_idx].config,
                    &cfg.metric_weights,
                );
                if d > cfg.rewire_radius {
                    continue;
                }
                let through = tree.nodes[new_idx].cost + d;
                if through + 1e-12 >= tree.nodes[j].cost {
                    continue;
                }
                let e = edge_check(
                    grid,
                    geometry,
                    &tree.nodes[new_idx].config,
                    &tree.nodes[j].config,
                    cfg,
                    model,
                    soft_cap,
                )?;
                if e.feasible {
                    tree.rewire_to(j, new_idx, through);
                }
            }
        }

        if goal_match(
            &tree.nodes[new_idx].tip,
            goals,
            cfg.goal_position_tolerance,
            cfg.goal_axis_tolerance,
        )
        .is_some()
        {
            return extract(&tree, new_idx, iteration, seed, model, cfg, grid, geometry, goals);
        }
    }
    Err(PlannerError::NoPlanFound {
        iterations: cfg.max_iterations,
    })
}

fn nearest_tip(tree: &Tree, target: &Vector3<f64>) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, n) in tree.nodes.iter().enumerate() {
        let d = (n.tip.translation - target).norm();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

#[allow(clippy::too_many_arguments)]
fn extract(
    tree: &Tree,
    goal_node: usize,
    iterations_used: usize,
    seed: u64,
    model: CollisionModel,
    cfg: &PlannerConfig,
    grid: &OccupancyGrid,
    geometry: &ArmGeometry,
    goals: &[GoalCandidate],
) -> Result<Plan, PlannerError> {
    let mut chain = Vec::new();
    let mut cursor = Some(goal_node);
    while let Some(i) = cursor {
        chain.push(i);
        cursor = tree.nodes[i].parent;
    }
    chain.reverse();
    let mut waypoints: Vec<HybridConfig> = chain.iter().map(|&i| tree.nodes[i].config).collect();

    // try to land the final waypoint exactly on the matched candidate pose
    if cfg.exact_goal_connection {
        let tip = &tree.nodes[goal_node].tip;
        if let Some(gi) = goal_match(tip, goals, cfg.goal_position_tolerance, cfg.goal_axis_tolerance)
        {
            let refine_opts = IkOptions {
                max_iterations: 120,
                position_tolerance: 1e-4,
                axis_tolerance: cfg.goal_axis_tolerance,
                ..IkOptions::default()
            };
            let last = *waypoints.last().expect("non-empty path");
            let refine = |cfg: &HybridConfig| -> Result<(HybridConfig, bool), PlannerError> {
                if model == CollisionModel::RigidSubstitute {
                    let ik = ik_rigid_only(geometry, &cfg.rigid, &goals[gi].pose, &refine_opts)?;
                    Ok((
                        HybridConfig {
                            rigid: ik.solution,
                            soft: cfg.soft,
                        },
                        ik.converged,
                    ))
                } else {
                    let ik = ik_hybrid(geometry, cfg, &goals[gi].pose, &refine_opts)?;
                    Ok((ik.solution, ik.converged))
                }
            };
            if let Ok((solution, ik_converged)) = refine(&last) {
                let refined = clamp_config(&solution, geometry);
                let still_match = tip_pose(geometry, &refined).map(|p| {
                    goal_match(&p, goals, cfg.goal_position_tolerance, cfg.goal_axis_tolerance)
                        .is_some()
                });
                if ik_converged
                    && still_match.unwrap_or(false)
                    && config_distance(&last, &refined, &cfg.metric_weights) > 1e-12
                {
                    let soft_cap = match cfg.tau_mode {
                        TauMode::PerConfig => Some(cfg.tau),
                        TauMode::PerPath => None,
                    };
                    let e = edge_check(grid, geometry, &last, &refined, cfg, model, soft_cap)?;
                    let budget_ok = cfg.tau_mode == TauMode::PerConfig
                        || tree.nodes[goal_node].soft_budget + e.worst.c_soft <= cfg.tau;
                    if e.feasible && budget_ok {
                        waypoints.push(refined);
                    }
                }
            }
        }
    }

    let mut stats = Vec::with_capacity(waypoints.len());
    for w in &waypoints {
        stats.push(model.count(grid, geometry, w, cfg.n_backbone)?);
    }
    let cost = path_cost(&waypoints, &cfg.metric_weights);
    Ok(Plan {
        waypoints,
        stats,
        cost,
        iterations_used,
        seed,
        model,
        config: cfg.clone(),
    })
}

pub(crate) fn path_cost(waypoints: &[HybridConfig], weights: &[f64; 8]) -> f64 {
    waypoints
        .windows(2)
        .map(|w| config_distance(&w[0], &w[1], weights))
        .sum()
}
