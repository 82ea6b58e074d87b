use ndarray::Array2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::kinematics::{ArmGeometry, Pose};
use crate::seed::mix_seed;

use super::dataset::nearest_neighbors;
use super::features::{build_input_into, input_dim};
use super::model::ControllerModel;
use super::net::{desk_architecture, sgd_step, AdamHyper, AdamState, Net};
use super::types::{GoalPairing, InputFormat, LrSchedule, MixWeights, Optimizer, PoseSample, TrainConfig};
use super::ControllerError;

/// Pairs drawn to estimate input/output normalization statistics.
const STATS_PAIRS: usize = 20_000;

/// Per-dimension mean/scale for inputs and outputs, estimated from a pair
/// draw before training. Scales carry a 1e-9 floor so constant dimensions
/// stay invertible.
#[derive(Debug, Clone, PartialEq)]
pub struct NormStats {
    pub mu_x: Vec<f64>,
    pub sd_x: Vec<f64>,
    pub mu_y: [f64; 9],
    pub sd_y: [f64; 9],
}

impl NormStats {
    pub fn normalize_output(&self, u: &[f64; 9]) -> [f64; 9] {
        std::array::from_fn(|d| (u[d] - self.mu_y[d]) / self.sd_y[d])
    }

    pub fn denormalize_output(&self, y: &[f64; 9]) -> [f64; 9] {
        std::array::from_fn(|d| y[d] * self.sd_y[d] + self.mu_y[d])
    }
}

/// One validation checkpoint during training.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainLogEntry {
    pub step: usize,
    pub learning_rate: f64,
    /// Mean per-pair summed squared error in normalized output space.
    pub val_mse_normalized: f64,
    /// Same in raw actuation units after denormalization.
    pub val_mse_raw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainHistory {
    pub entries: Vec<TrainLogEntry>,
    /// Mean squared distance of validation labels from the training label
    /// mean; the variance baseline val_mse_raw is judged against.
    pub label_variance: f64,
    pub steps_total: usize,
}

struct PairSampler<'a> {
    n: usize,
    neighbors: Option<&'a [Vec<usize>]>,
}

impl PairSampler<'_> {
    /// One (current, goal) index pair: mostly uniform, with `p_local` mass
    /// on near-neighbor goals and `p_self` mass on hold pairs.
    fn draw(&self, weights: &MixWeights, rng: &mut ChaCha8Rng) -> (usize, usize) {
        let ci = rng.gen_range(0..self.n);
        let mut gi = rng.gen_range(0..self.n);
        let u: f64 = rng.gen();
        if u < weights.p_local {
            if let Some(lists) = self.neighbors {
                let list = &lists[ci];
                if !list.is_empty() {
                    gi = list[rng.gen_range(0..list.len())];
                }
            }
        } else if u >= 1.0 - weights.p_self {
            gi = ci;
        }
        (ci, gi)
    }
}

fn weights_at(pairing: &GoalPairing, frac: f64) -> MixWeights {
    match pairing {
        GoalPairing::Random => MixWeights {
            p_self: 0.0,
            p_local: 0.0,
        },
        GoalPairing::Mixed { weights, .. } => *weights,
        GoalPairing::Scheduled {
            early,
            late,
            switch_frac,
            ..
        } => {
            if frac >= *switch_frac {
                *late
            } else {
                *early
            }
        }
    }
}

fn learning_rate_at(cfg: &TrainConfig, frac: f64) -> f64 {
    match cfg.lr_schedule {
        LrSchedule::Constant => cfg.learning_rate,
        LrSchedule::Cosine { floor } => {
            floor + 0.5 * (cfg.learning_rate - floor) * (1.0 + (std::f64::consts::PI * frac).cos())
        }
    }
}

/// Pose/label views plus normalization, for filling normalized batches.
struct BatchSource<'a> {
    format: InputFormat,
    poses: &'a [Pose],
    labels: &'a [[f64; 9]],
    stats: &'a NormStats,
}

impl BatchSource<'_> {
    fn fill(
        &self,
        pairs: &[(usize, usize)],
        x: &mut Array2<f32>,
        y: &mut Array2<f32>,
        xbuf: &mut [f64],
    ) {
        for (row, &(ci, gi)) in pairs.iter().enumerate() {
            build_input_into(self.format, &self.poses[ci], &self.poses[gi], xbuf);
            for (col, &v) in xbuf.iter().enumerate() {
                x[[row, col]] = ((v - self.stats.mu_x[col]) / self.stats.sd_x[col]) as f32;
            }
            let yn = self.stats.normalize_output(&self.labels[gi]);
            for (col, &v) in yn.iter().enumerate() {
                y[[row, col]] = v as f32;
            }
        }
    }
}

/// Mean per-row summed squared error.
fn batch_mse(pred: &Array2<f32>, target: &Array2<f32>) -> f64 {
    let mut total = 0.0f64;
    for (p, t) in pred.iter().zip(target.iter()) {
        let d = f64::from(p - t);
        total += d * d;
    }
    total / pred.nrows() as f64
}

pub fn train(
    geometry: &ArmGeometry,
    samples: &[PoseSample],
    format: InputFormat,
    pairing: &GoalPairing,
    cfg: &TrainConfig,
) -> Result<ControllerModel, ControllerError> {
    train_with_history(geometry, samples, format, pairing, cfg).map(|(model, _)| model)
}

/// Minibatch training on streamed (current, goal) pairs: the label is always
/// the goal sample's actuation. Deterministic for a fixed seed.
pub fn train_with_history(
    geometry: &ArmGeometry,
    samples: &[PoseSample],
    format: InputFormat,
    pairing: &GoalPairing,
    cfg: &TrainConfig,
) -> Result<(ControllerModel, TrainHistory), ControllerError> {
    cfg.validate()?;
    pairing.validate()?;
    let n = samples.len();
    if n < cfg.batch_size {
        return Err(ControllerError::DatasetTooSmall {
            n,
            min: cfg.batch_size,
        });
    }
    let neighbor_lists = pairing
        .needs_neighbors()
        .map(|k| nearest_neighbors(samples, geometry, k));
    let sampler = PairSampler {
        n,
        neighbors: neighbor_lists.as_deref(),
    };
    let poses: Vec<Pose> = samples.iter().map(|s| s.pose).collect();
    let labels: Vec<[f64; 9]> = samples.iter().map(|s| s.actuation.as_array()).collect();
    let in_dim = input_dim(format);
    let early = weights_at(pairing, 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // normalization statistics from a pre-training pair draw
    let mut xbuf = vec![0.0f64; in_dim];
    let mut mu_x = vec![0.0f64; in_dim];
    let mut m2_x = vec![0.0f64; in_dim];
    let mut mu_y = [0.0f64; 9];
    let mut m2_y = [0.0f64; 9];
    for count in 1..=STATS_PAIRS {
        let (ci, gi) = sampler.draw(&early, &mut rng);
        build_input_into(format, &poses[ci], &poses[gi], &mut xbuf);
        let inv = 1.0 / count as f64;
        for (d, &v) in xbuf.iter().enumerate() {
            let delta = v - mu_x[d];
            mu_x[d] += delta * inv;
            m2_x[d] += delta * (v - mu_x[d]);
        }
        for (d, &v) in labels[gi].iter().enumerate() {
            let delta = v - mu_y[d];
            mu_y[d] += delta * inv;
            m2_y[d] += delta * (v - mu_y[d]);
        }
    }
    let sd_x: Vec<f64> = m2_x
        .iter()
        .map(|&m2| (m2 / STATS_PAIRS as f64).sqrt() + 1e-9)
        .collect();
    let sd_y: [f64; 9] = std::array::from_fn(|d| (m2_y[d] / STATS_PAIRS as f64).sqrt() + 1e-9);
    let stats = NormStats {
        mu_x,
        sd_x,
        mu_y,
        sd_y,
    };

    let source = BatchSource {
        format,
        poses: &poses,
        labels: &labels,
        stats: &stats,
    };

    // fixed validation pairs on an independent stream, early-phase mixture
    let mut val_rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, &[999]));
    let val_pairs: Vec<(usize, usize)> = (0..cfg.n_val_pairs.max(1))
        .map(|_| sampler.draw(&early, &mut val_rng))
        .collect();
    let mut x_val = Array2::zeros((val_pairs.len(), in_dim));
    let mut y_val = Array2::zeros((val_pairs.len(), 9));
    source.fill(&val_pairs, &mut x_val, &mut y_val, &mut xbuf);
    let label_variance = val_pairs
        .iter()
        .map(|&(_, gi)| {
            labels[gi]
                .iter()
                .zip(stats.mu_y.iter())
                .map(|(&v, &m)| (v - m) * (v - m))
                .sum::<f64>()
        })
        .sum::<f64>()
        / val_pairs.len() as f64;

    let (sizes, residual) = desk_architecture(in_dim, cfg.hidden_size, cfg.n_layers, 9);
    let mut net: Net<f32> = Net::new(sizes, residual, mix_seed(cfg.seed, &[1]));
    let mut adam = AdamState::new(&net);

    let steps_per_epoch = n.div_ceil(cfg.batch_size);
    let steps_total = cfg.epochs * steps_per_epoch;
    let log_every = (steps_total / 8).max(1);

    let mut x = Array2::zeros((cfg.batch_size, in_dim));
    let mut y = Array2::zeros((cfg.batch_size, 9));
    let mut pairs = vec![(0usize, 0usize); cfg.batch_size];
    let mut history = TrainHistory {
        entries: Vec::new(),
        label_variance,
        steps_total,
    };
    let mut final_val_mse = f64::INFINITY;

    for t in 1..=steps_total {
        let frac = t as f64 / steps_total as f64;
        let lr = learning_rate_at(cfg, frac);
        let weights = weights_at(pairing, frac);
        for p in pairs.iter_mut() {
            *p = sampler.draw(&weights, &mut rng);
        }
        source.fill(&pairs, &mut x, &mut y, &mut xbuf);
        let (out, acts) = net.forward(&x);
        let (loss, dy) = Net::loss_and_grad(&out, &y);
        if !loss.is_finite() {
            return Err(ControllerError::TrainingDiverged {
                step: t,
                loss: f64::from(loss),
            });
        }
        let (grad_w, grad_b) = net.backward(&acts, &dy);
        match cfg.optimizer {
            Optimizer::Sgd => sgd_step(&mut net, &grad_w, &grad_b, lr as f32),
            Optimizer::Adam { beta1, beta2, eps } => {
                let hyper = AdamHyper {
                    beta1: beta1 as f32,
                    beta2: beta2 as f32,
                    eps: eps as f32,
                };
                adam.step(&mut net, &grad_w, &grad_b, lr as f32, &hyper);
            }
        }
        if t % log_every == 0 || t == steps_total {
            let (pred, _) = net.forward(&x_val);
            let val_norm = batch_mse(&pred, &y_val);
            let mut val_raw = 0.0f64;
            for (row, &(_, gi)) in val_pairs.iter().enumerate() {
                let yhat: [f64; 9] = std::array::from_fn(|d| f64::from(pred[[row, d]]));
                let denorm = stats.denormalize_output(&yhat);
                val_raw += denorm
                    .iter()
                    .zip(labels[gi].iter())
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum::<f64>();
            }
            val_raw /= val_pairs.len() as f64;
            history.entries.push(TrainLogEntry {
                step: t,
                learning_rate: lr,
                val_mse_normalized: val_norm,
                val_mse_raw: val_raw,
            });
            final_val_mse = val_raw;
        }
    }

    let (clamp_lo, clamp_hi) = ControllerModel::clamp_bounds(geometry);
    let model = ControllerModel {
        format,
        net,
        stats,
        clamp_lo,
        clamp_hi,
        final_val_mse,
    };
    Ok((model, history))
}
