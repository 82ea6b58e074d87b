//! Point-cloud ingestion (ASCII PLY, CSV) and voxelization.

use super::grid::{Aabb, OccupancyGrid};
use super::OccupancyError;
use nalgebra::Vector3;
use std::io::BufRead;
use std::path::Path;

#[derive(Debug, Clone, Default)]
pub struct PointCloud {
    pub points: Vec<Vector3<f64>>,
    /// Optional per-point confidence in [0,1], same length as `points`.
    pub confidence: Option<Vec<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vector3<f64>>) -> Result<Self, OccupancyError> {
        let cloud = Self {
            points,
            confidence: None,
        };
        cloud.validate()?;
        Ok(cloud)
    }

    pub fn validate(&self) -> Result<(), OccupancyError> {
        for (index, p) in self.points.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(OccupancyError::NonFinitePoint { index });
            }
        }
        if let Some(conf) = &self.confidence {
            if conf.len() != self.points.len() {
                return Err(OccupancyError::CloudParse(format!(
                    "confidence length {} does not match point count {}",
                    conf.len(),
                    self.points.len()
                )));
            }
            for (index, &c) in conf.iter().enumerate() {
                if !(0.0..=1.0).contains(&c) {
                    return Err(OccupancyError::BadConfidence { index, value: c });
                }
            }
        }
        Ok(())
    }

    /// ASCII PLY with an `x y z [confidence]` vertex element.
    pub fn from_ply_file(path: &Path) -> Result<Self, OccupancyError> {
        let file = std::fs::File::open(path)
            .map_err(|e| OccupancyError::Io(format!("{}: {e}", path.display())))?;
        let mut lines = std::io::BufReader::new(file).lines();
        let parse = |msg: String| OccupancyError::CloudParse(msg);

        let magic = lines
            .next()
            .transpose()
            .map_err(|e| parse(e.to_string()))?
            .ok_or_else(|| parse("empty PLY file".into()))?;
        if magic.trim() != "ply" {
            return Err(parse("missing 'ply' magic line".into()));
        }
        let mut vertex_count: Option<usize> = None;
        let mut properties: Vec<String> = Vec::new();
        let mut in_vertex_element = false;
        loop {
            let line = lines
                .next()
                .transpose()
                .map_err(|e| parse(e.to_string()))?
                .ok_or_else(|| parse("unterminated PLY header".into()))?;
            let line = line.trim().to_string();
            if line == "end_header" {
                break;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                ["format", "ascii", _] | ["comment", ..] => {}
                ["format", other, _] => {
                    return Err(parse(format!("unsupported PLY format '{other}'")));
                }
                ["element", "vertex", n] => {
                    vertex_count = Some(n.parse().map_err(|_| parse("bad vertex count".into()))?);
                    in_vertex_element = true;
                }
                ["element", ..] => in_vertex_element = false,
                ["property", _, name] if in_vertex_element => properties.push(name.to_string()),
                _ => {}
            }
        }
        let n = vertex_count.ok_or_else(|| parse("no vertex element in header".into()))?;
        let idx_of = |name: &str| properties.iter().position(|p| p == name);
        let (ix, iy, iz) = match (idx_of("x"), idx_of("y"), idx_of("z")) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(parse("vertex element lacks x/y/z properties".into())),
        };
        let ic = idx_of("confidence");

        let mut points = Vec::with_capacity(n);
        let mut confidence = ic.map(|_| Vec::with_capacity(n));
        for k in 0..n {
            let line = lines
                .next()
                .transpose()
                .map_err(|e| parse(e.to_string()))?
                .ok_or_else(|| parse(format!("expected {n} vertices, got {k}")))?;
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| parse(format!("vertex {k}: {e}")))?;
            if vals.len() < properties.len() {
                return Err(parse(format!(
                    "vertex {k}: expected {} values, got {}",
                    properties.len(),
                    vals.len()
                )));
            }
            points.push(Vector3::new(vals[ix], vals[iy], vals[iz]));
            if let (Some(conf), Some(i)) = (&mut confidence, ic) {
                conf.push(vals[i]);
            }
        }
        let cloud = Self { points, confidence };
        cloud.validate()?;
        Ok(cloud)
    }

    /// CSV with `x,y,z[,confidence]` per record; a non-numeric first line is
    /// treated as a header and skipped.
    pub fn from_csv_file(path: &Path) -> Result<Self, OccupancyError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_path(path)
            .map_err(|e| OccupancyError::Io(format!("{}: {e}", path.display())))?;
        let mut points = Vec::new();
        let mut confidence: Option<Vec<f64>> = None;
        for (k, record) in reader.records().enumerate() {
            let record = record.map_err(|e| OccupancyError::CloudParse(e.to_string()))?;
            let vals: Result<Vec<f64>, _> = record.iter().map(|t| t.trim().parse::<f64>()).collect();
            let vals = match vals {
                Ok(v) => v,
                Err(e) if k == 0 => {
                    let _ = e;
                    continue; // header row
                }
                Err(e) => {
                    return Err(OccupancyError::CloudParse(format!("record {k}: {e}")));
                }
            };
            if vals.len() < 3 {
                return Err(OccupancyError::CloudParse(format!(
                    "record {k}: expected at least 3 fields"
                )));
            }
            points.push(Vector3::new(vals[0], vals[1], vals[2]));
            if vals.len() >= 4 {
                confidence.get_or_insert_with(Vec::new).push(vals[3]);
            } else if confidence.is_some() {
                return Err(OccupancyError::CloudParse(format!(
                    "record {k}: missing confidence field"
                )));
            }
        }
        let cloud = Self { points, confidence };
        cloud.validate()?;
        Ok(cloud)
    }
}

/// Mark a voxel occupied iff at least `min_points_per_voxel` cloud points fall
/// inside it; points outside `bounds` are ignored.
pub fn voxelize(
    cloud: &PointCloud,
    voxel_size: f64,
    bounds: &Aabb,
    min_points_per_voxel: usize,
) -> Result<OccupancyGrid, OccupancyError> {
    cloud.validate()?;
    if cloud.points.is_empty() {
        return Err(OccupancyError::EmptyCloud);
    }
    let mut grid = OccupancyGrid::empty(bounds, voxel_size)?;
    let dims = grid.dims();
    let mut counts = vec![0u32; dims[0] * dims[1] * dims[2]];
    for p in &cloud.points {
        if !bounds.contains(p) {
            continue; // grid dims round up; filter on the exact half-open box
        }
        if let Some(idx) = grid.voxel_index(p) {
            counts[(idx[2] * dims[1] + idx[1]) * dims[0] + idx[0]] += 1;
        }
    }
    let threshold = min_points_per_voxel.max(1) as u32;
    for z in 0..dims[2] {
        for y in 0..dims[1] {
            for x in 0..dims[0] {
                if counts[(z * dims[1] + y) * dims[0] + x] >= threshold {
                    grid.set_occupied([x, y, z], true);
                }
            }
        }
    }
    Ok(grid)
}
