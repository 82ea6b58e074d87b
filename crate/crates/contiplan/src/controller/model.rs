use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::{Array1, Array2};

use crate::kinematics::{ArmGeometry, Pose};

use super::features::{build_input, input_dim};
use super::net::Net;
use super::train::NormStats;
use super::types::{Actuation, InputFormat};
use super::ControllerError;

const MAGIC: &[u8; 4] = b"CPNC";
const VERSION: u32 = 1;

/// A trained controller: f32 network, input/output normalization, the input
/// format it was trained for, and the actuation clamp bounds.
#[derive(Debug, Clone)]
pub struct ControllerModel {
    pub format: InputFormat,
    pub net: Net<f32>,
    pub stats: NormStats,
    pub clamp_lo: [f64; 9],
    pub clamp_hi: [f64; 9],
    /// Raw-space validation MSE recorded at the end of training.
    pub final_val_mse: f64,
}

fn format_tag(format: InputFormat) -> u8 {
    match format {
        InputFormat::CurrentPlusRelative => 0,
        InputFormat::GoalOnly => 1,
        InputFormat::CurrentPlusGoal => 2,
        InputFormat::RelativeOnly => 3,
    }
}

fn format_from_tag(tag: u8) -> Result<InputFormat, ControllerError> {
    match tag {
        0 => Ok(InputFormat::CurrentPlusRelative),
        1 => Ok(InputFormat::GoalOnly),
        2 => Ok(InputFormat::CurrentPlusGoal),
        3 => Ok(InputFormat::RelativeOnly),
        other => Err(ControllerError::ModelFile(format!(
            "unknown input format tag {other}"
        ))),
    }
}

impl ControllerModel {
    /// Actuation clamp bounds implied by a geometry: joint limits plus the
    /// unit chamber range.
    pub fn clamp_bounds(geometry: &ArmGeometry) -> ([f64; 9], [f64; 9]) {
        let mut lo = [0.0; 9];
        let mut hi = [1.0; 9];
        for d in 0..6 {
            lo[d] = geometry.joint_limits[d][0];
            hi[d] = geometry.joint_limits[d][1];
        }
        (lo, hi)
    }

    /// Forward pass on one feature vector: normalize, run the net in f32,
    /// denormalize, clamp.
    pub fn infer_features(&self, features: &[f64]) -> Actuation {
        debug_assert_eq!(features.len(), self.stats.mu_x.len());
        let x = Array2::from_shape_fn((1, features.len()), |(_, j)| {
            ((features[j] - self.stats.mu_x[j]) / self.stats.sd_x[j]) as f32
        });
        let (y, _) = self.net.forward(&x);
        let mut u = [0.0f64; 9];
        for d in 0..9 {
            let raw = f64::from(y[[0, d]]) * self.stats.sd_y[d] + self.stats.mu_y[d];
            u[d] = raw.clamp(self.clamp_lo[d], self.clamp_hi[d]);
        }
        Actuation::from_array(&u)
    }

    /// Map (current, goal) tip poses to a clamped actuation command.
    pub fn infer(&self, current: &Pose, goal: &Pose) -> Actuation {
        self.infer_features(&build_input(self.format, current, goal))
    }

    /// Error unless the model was trained for `format`; benchmarks use this
    /// to catch mixed-up model files.
    pub fn require_format(&self, format: InputFormat) -> Result<(), ControllerError> {
        if self.format != format {
            return Err(ControllerError::FormatMismatch {
                model: self.format.to_string(),
                request: format.to_string(),
            });
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), ControllerError> {
        let bad = |m: String| Err(ControllerError::ModelFile(m));
        let sizes = &self.net.sizes;
        if sizes.len() < 2 || sizes.len() != self.net.weights.len() + 1 {
            return bad("layer sizes do not chain".into());
        }
        if sizes[0] != input_dim(self.format) {
            return bad(format!(
                "input width {} does not match format {}",
                sizes[0], self.format
            ));
        }
        if *sizes.last().expect("nonempty") != 9 {
            return bad(format!("output width {} != 9", sizes.last().expect("nonempty")));
        }
        for (i, w) in self.net.weights.iter().enumerate() {
            if w.dim() != (sizes[i], sizes[i + 1]) || self.net.biases[i].len() != sizes[i + 1] {
                return bad(format!("layer {i} tensor shape mismatch"));
            }
        }
        if self.net.residual.len() != self.net.weights.len() {
            return bad("one residual flag per layer required".into());
        }
        if self.stats.mu_x.len() != sizes[0] || self.stats.sd_x.len() != sizes[0] {
            return bad("normalization width mismatch".into());
        }
        let bad_scale = |s: f64| s.is_nan() || s <= 0.0;
        if self.stats.sd_x.iter().any(|&s| bad_scale(s)) || self.stats.sd_y.iter().any(|&s| bad_scale(s)) {
            return bad("normalization scales must be positive".into());
        }
        for d in 0..9 {
            if self.clamp_lo[d].is_nan() || self.clamp_hi[d].is_nan() || self.clamp_lo[d] > self.clamp_hi[d] {
                return bad(format!("clamp bounds inverted on dimension {d}"));
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), ControllerError> {
        self.validate()?;
        let err = |e: std::io::Error| ControllerError::ModelFile(e.to_string());
        let file = File::create(path).map_err(err)?;
        let mut w = BufWriter::new(file);
        w.write_all(MAGIC).map_err(err)?;
        w.write_u32::<LittleEndian>(VERSION).map_err(err)?;
        w.write_u8(format_tag(self.format)).map_err(err)?;
        w.write_u32::<LittleEndian>(self.net.sizes.len() as u32)
            .map_err(err)?;
        for &s in &self.net.sizes {
            w.write_u32::<LittleEndian>(s as u32).map_err(err)?;
        }
        for &r in &self.net.residual {
            w.write_u8(u8::from(r)).map_err(err)?;
        }
        for d in 0..9 {
            w.write_f64::<LittleEndian>(self.clamp_lo[d]).map_err(err)?;
        }
        for d in 0..9 {
            w.write_f64::<LittleEndian>(self.clamp_hi[d]).map_err(err)?;
        }
        for &v in self.stats.mu_x.iter().chain(self.stats.sd_x.iter()) {
            w.write_f64::<LittleEndian>(v).map_err(err)?;
        }
        for &v in self.stats.mu_y.iter().chain(self.stats.sd_y.iter()) {
            w.write_f64::<LittleEndian>(v).map_err(err)?;
        }
        w.write_f64::<LittleEndian>(self.final_val_mse).map_err(err)?;
        for i in 0..self.net.weights.len() {
            for &v in self.net.weights[i].iter() {
                w.write_f32::<LittleEndian>(v).map_err(err)?;
            }
            for &v in self.net.biases[i].iter() {
                w.write_f32::<LittleEndian>(v).map_err(err)?;
            }
        }
        w.flush().map_err(err)
    }

    pub fn load(path: &Path) -> Result<Self, ControllerError> {
        let err = |e: std::io::Error| ControllerError::ModelFile(e.to_string());
        let file = File::open(path).map_err(err)?;
        let mut r = BufReader::new(file);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(err)?;
        if &magic != MAGIC {
            return Err(ControllerError::ModelFile("bad magic bytes".into()));
        }
        let version = r.read_u32::<LittleEndian>().map_err(err)?;
        if version != VERSION {
            return Err(ControllerError::ModelVersion {
                found: version,
                expected: VERSION,
            });
        }
        let format = format_from_tag(r.read_u8().map_err(err)?)?;
        let n_sizes = r.read_u32::<LittleEndian>().map_err(err)? as usize;
        if !(2..=64).contains(&n_sizes) {
            return Err(ControllerError::ModelFile(format!(
                "implausible layer count {n_sizes}"
            )));
        }
        let mut sizes = Vec::with_capacity(n_sizes);
        for _ in 0..n_sizes {
            sizes.push(r.read_u32::<LittleEndian>().map_err(err)? as usize);
        }
        let mut residual = Vec::with_capacity(n_sizes - 1);
        for _ in 0..n_sizes - 1 {
            residual.push(r.read_u8().map_err(err)? != 0);
        }
        let mut clamp_lo = [0.0f64; 9];
        let mut clamp_hi = [0.0f64; 9];
        for v in clamp_lo.iter_mut() {
            *v = r.read_f64::<LittleEndian>().map_err(err)?;
        }
        for v in clamp_hi.iter_mut() {
            *v = r.read_f64::<LittleEndian>().map_err(err)?;
        }
        let read_vec = |r: &mut BufReader<File>, n: usize| -> Result<Vec<f64>, ControllerError> {
            let mut v = Vec::with_capacity(n);
            for _ in 0..n {
                v.push(r.read_f64::<LittleEndian>().map_err(err)?);
            }
            Ok(v)
        };
        let mu_x = read_vec(&mut r, sizes[0])?;
        let sd_x = read_vec(&mut r, sizes[0])?;
        let mut mu_y = [0.0f64; 9];
        let mut sd_y = [0.0f64; 9];
        for v in mu_y.iter_mut() {
            *v = r.read_f64::<LittleEndian>().map_err(err)?;
        }
        for v in sd_y.iter_mut() {
            *v = r.read_f64::<LittleEndian>().map_err(err)?;
        }
        let final_val_mse = r.read_f64::<LittleEndian>().map_err(err)?;
        let mut weights = Vec::with_capacity(n_sizes - 1);
        let mut biases = Vec::with_capacity(n_sizes - 1);
        for i in 0..n_sizes - 1 {
            let (n_in, n_out) = (sizes[i], sizes[i + 1]);
            let mut w = Array2::zeros((n_in, n_out));
            for row in 0..n_in {
                for col in 0..n_out {
                    w[[row, col]] = r.read_f32::<LittleEndian>().map_err(err)?;
                }
            }
            let mut b = Array1::zeros(n_out);
            for col in 0..n_out {
                b[col] = r.read_f32::<LittleEndian>().map_err(err)?;
            }
            weights.push(w);
            biases.push(b);
        }
        let mut trailing = [0u8; 1];
        match r.read(&mut trailing) {
            Ok(0) => {}
            Ok(_) => {
                return Err(ControllerError::ModelFile(
                    "trailing bytes after model payload".into(),
                ))
            }
            Err(e) => return Err(err(e)),
        }
        let model = Self {
            format,
            net: Net {
                sizes,
                weights,
                biases,
                residual,
            },
            stats: NormStats {
                mu_x,
                sd_x,
                mu_y,
                sd_y,
            },
            clamp_lo,
            clamp_hi,
            final_val_mse,
        };
        model.validate()?;
        Ok(model)
    }
}
