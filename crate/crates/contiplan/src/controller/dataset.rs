use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::kinematics::{actuation_to_soft, tip_pose, ArmGeometry, HybridConfig, RigidConfig};

use super::types::{Actuation, PoseSample};
use super::ControllerError;

/// Refuse sweeps larger than this many samples.
pub const DEFAULT_SWEEP_CAP: usize = 200_000;

/// CSV column order used by `Dataset::save_csv` / `load_csv`.
pub const CSV_COLUMNS: &str = "j1,j2,j3,j4,j5,j6,c1,c2,c3,tx,ty,tz,r00,r01,r02,r10,r11,r12,r20,r21,r22";

fn dimension_values(geometry: &ArmGeometry, dim: usize, count: usize) -> Vec<f64> {
    let [lo, hi] = if dim < 6 {
        geometry.joint_limits[dim]
    } else {
        [0.0, 1.0]
    };
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Deterministic grid sweep over the 9 actuation dimensions: each dimension
/// takes `steps` evenly spaced values across its limits (a single step sits
/// at the lower limit), iterated row-major with the last dimension fastest.
/// Every sample's pose is the forward-kinematics tip pose of its actuation.
/// The grid consumes no randomness; `seed` keeps the collector signature
/// uniform with the seeded parts of the pipeline and is otherwise unused.
pub fn collect_sweep(
    geometry: &ArmGeometry,
    steps_per_dimension: [usize; 9],
    seed: u64,
) -> Result<Vec<PoseSample>, ControllerError> {
    collect_sweep_with_cap(geometry, steps_per_dimension, seed, DEFAULT_SWEEP_CAP)
}

pub fn collect_sweep_with_cap(
    geometry: &ArmGeometry,
    steps_per_dimension: [usize; 9],
    _seed: u64,
    cap: usize,
) -> Result<Vec<PoseSample>, ControllerError> {
    let mut total: usize = 1;
    let mut overflow = false;
    for (dim, &count) in steps_per_dimension.iter().enumerate() {
        if count == 0 {
            return Err(ControllerError::InvalidConfig(format!(
                "sweep step count for dimension {dim} must be >= 1"
            )));
        }
        match total.checked_mul(count) {
            Some(t) => total = t,
            None => {
                overflow = true;
                break;
            }
        }
    }
    if overflow || total > cap {
        return Err(ControllerError::SweepTooLarge {
            requested: if overflow { usize::MAX } else { total },
            cap,
        });
    }

    let values: Vec<Vec<f64>> = (0..9)
        .map(|d| dimension_values(geometry, d, steps_per_dimension[d]))
        .collect();
    let mut strides = [1usize; 9];
    for d in (0..8).rev() {
        strides[d] = strides[d + 1] * steps_per_dimension[d + 1];
    }

    let mut samples = Vec::with_capacity(total);
    for flat in 0..total {
        let mut u = [0.0f64; 9];
        for d in 0..9 {
            u[d] = values[d][(flat / strides[d]) % steps_per_dimension[d]];
        }
        let actuation = Actuation::from_array(&u);
        let config = HybridConfig {
            rigid: RigidConfig::new(actuation.rigid_targets),
            soft: actuation_to_soft(geometry, actuation.soft_commands)?,
        };
        let pose = tip_pose(geometry, &config)?;
        samples.push(PoseSample { pose, actuation });
    }
    Ok(samples)
}

/// For each sample, the indices of its `k` nearest other samples by
/// Euclidean distance in span-normalized actuation space, nearest first;
/// ties broken by index.
pub fn nearest_neighbors(
    samples: &[PoseSample],
    geometry: &ArmGeometry,
    k: usize,
) -> Vec<Vec<usize>> {
    let n = samples.len();
    let k = k.min(n.saturating_sub(1));
    let mut span = [1.0f64; 9];
    for (d, s) in span.iter_mut().enumerate().take(6) {
        let [lo, hi] = geometry.joint_limits[d];
        *s = (hi - lo).max(1e-12);
    }
    let coords: Vec<[f64; 9]> = samples
        .iter()
        .map(|s| {
            let u = s.actuation.as_array();
            std::array::from_fn(|d| u[d] / span[d])
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut dists: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let d2: f64 = (0..9)
                    .map(|d| {
                        let diff = coords[i][d] - coords[j][d];
                        diff * diff
                    })
                    .sum();
                (d2, j)
            })
            .collect();
        if k < dists.len() {
            dists.select_nth_unstable_by(k, |a, b| a.partial_cmp(b).expect("finite distances"));
            dists.truncate(k);
        }
        dists.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
        out.push(dists.into_iter().map(|(_, j)| j).collect());
    }
    out
}

/// A collection of pose samples with file round-trips and the neighbor
/// queries training needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<PoseSample>,
}

impl Dataset {
    pub fn new(samples: Vec<PoseSample>) -> Self {
        Self { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// See [`nearest_neighbors`].
    pub fn nearest_neighbors(&self, geometry: &ArmGeometry, k: usize) -> Vec<Vec<usize>> {
        nearest_neighbors(&self.samples, geometry, k)
    }

    /// Max FK mismatch between stored poses and re-derived ones; loaded
    /// datasets can be audited against a geometry this way.
    pub fn max_fk_residual(&self, geometry: &ArmGeometry) -> Result<f64, ControllerError> {
        let mut worst = 0.0f64;
        for s in &self.samples {
            let config = HybridConfig {
                rigid: RigidConfig::new(s.actuation.rigid_targets),
                soft: actuation_to_soft(geometry, s.actuation.soft_commands)?,
            };
            let pose = tip_pose(geometry, &config)?;
            let dt = (pose.translation - s.pose.translation).norm();
            let dr = (pose.rotation - s.pose.rotation).abs().max();
            worst = worst.max(dt).max(dr);
        }
        Ok(worst)
    }

    pub fn save_csv(&self, path: &Path) -> Result<(), ControllerError> {
        let file_err = |e: csv::Error| ControllerError::DatasetFile(e.to_string());
        let mut w = csv::Writer::from_path(path).map_err(file_err)?;
        w.write_record(CSV_COLUMNS.split(',')).map_err(file_err)?;
        for s in &self.samples {
            let u = s.actuation.as_array();
            let t = s.pose.translation;
            let r = s.pose.rotation;
            let mut fields: Vec<String> = u.iter().map(|v| v.to_string()).collect();
            fields.extend([t.x, t.y, t.z].iter().map(|v| v.to_string()));
            for row in 0..3 {
                for col in 0..3 {
                    fields.push(r[(row, col)].to_string());
                }
            }
            w.write_record(&fields).map_err(file_err)?;
        }
        w.flush()
            .map_err(|e| ControllerError::DatasetFile(e.to_string()))
    }

    pub fn load_csv(path: &Path) -> Result<Self, ControllerError> {
        let file_err = |e: csv::Error| ControllerError::DatasetFile(e.to_string());
        let mut reader = csv::Reader::from_path(path).map_err(file_err)?;
        let header = reader.headers().map_err(file_err)?;
        let expected: Vec<&str> = CSV_COLUMNS.split(',').collect();
        if header.iter().collect::<Vec<_>>() != expected {
            return Err(ControllerError::DatasetFile(format!(
                "unexpected CSV header: {}",
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut samples = Vec::new();
        for (lineno, record) in reader.records().enumerate() {
            let record = record.map_err(file_err)?;
            let vals: Vec<f64> = record
                .iter()
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| ControllerError::DatasetFile(format!("row {}: {e}", lineno + 1)))?;
            if vals.len() != 21 {
                return Err(ControllerError::DatasetFile(format!(
                    "row {}: expected 21 fields, got {}",
                    lineno + 1,
                    vals.len()
                )));
            }
            let mut u = [0.0f64; 9];
            u.copy_from_slice(&vals[0..9]);
            let translation = nalgebra::Vector3::new(vals[9], vals[10], vals[11]);
            let rotation = nalgebra::Matrix3::from_fn(|i, j| vals[12 + 3 * i + j]);
            samples.push(PoseSample {
                pose: crate::kinematics::Pose::new(rotation, translation),
                actuation: Actuation::from_array(&u),
            });
        }
        Ok(Self { samples })
    }

    pub fn save_jsonl(&self, path: &Path) -> Result<(), ControllerError> {
        let file = File::create(path).map_err(|e| ControllerError::DatasetFile(e.to_string()))?;
        let mut w = BufWriter::new(file);
        for s in &self.samples {
            let line = serde_json::to_string(s)
                .map_err(|e| ControllerError::DatasetFile(e.to_string()))?;
            writeln!(w, "{line}").map_err(|e| ControllerError::DatasetFile(e.to_string()))?;
        }
        Ok(())
    }

    pub fn load_jsonl(path: &Path) -> Result<Self, ControllerError> {
        let file = File::open(path).map_err(|e| ControllerError::DatasetFile(e.to_string()))?;
        let mut samples = Vec::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| ControllerError::DatasetFile(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let s: PoseSample = serde_json::from_str(&line).map_err(|e| {
                ControllerError::DatasetFile(format!("line {}: {e}", lineno + 1))
            })?;
            samples.push(s);
        }
        Ok(Self { samples })
    }
}
