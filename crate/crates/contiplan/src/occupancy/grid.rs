//! Dense binary voxel grid with half-open voxel intervals.

use super::OccupancyError;
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// Axis-aligned box in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn new(min: [f64; 3], max: [f64; 3]) -> Result<Self, OccupancyError> {
        let b = Self { min, max };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), OccupancyError> {
        for a in 0..3 {
            let extent = self.max[a] - self.min[a];
            if extent.is_nan() || extent <= 0.0 {
                return Err(OccupancyError::DegenerateBounds {
                    axis: a,
                    min: self.min[a],
                    max: self.max[a],
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] < self.max[a])
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.max[axis] - self.min[axis]
    }

    pub fn center(&self) -> Vector3<f64> {
        Vector3::new(
            (self.min[0] + self.max[0]) / 2.0,
            (self.min[1] + self.max[1]) / 2.0,
            (self.min[2] + self.max[2]) / 2.0,
        )
    }

    pub fn intersects(&self, other: &Aabb) -> bool {
        (0..3).all(|a| self.min[a] < other.max[a] && other.min[a] < self.max[a])
    }
}

/// Immutable occupancy grid. A voxel `(i,j,k)` spans the half-open box
/// `[origin + i·h, origin + (i+1)·h)` per axis; everything outside the grid
/// is free by definition.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    origin: Vector3<f64>,
    voxel_size: f64,
    dims: [usize; 3],
    cells: Vec<bool>,
}

impl OccupancyGrid {
    /// Grid covering `bounds` at resolution `voxel_size`, all voxels free.
    /// Dimensions round up so the grid covers the whole box.
    pub fn empty(bounds: &Aabb, voxel_size: f64) -> Result<Self, OccupancyError> {
        if !voxel_size.is_finite() || voxel_size <= 0.0 {
            return Err(OccupancyError::BadVoxelSize(voxel_size));
        }
        bounds.validate()?;
        let mut dims = [0usize; 3];
        for (a, dim) in dims.iter_mut().enumerate() {
            *dim = (bounds.extent(a) / voxel_size).ceil().max(1.0) as usize;
        }
        let cells = vec![false; dims[0] * dims[1] * dims[2]];
        Ok(Self {
            origin: Vector3::new(bounds.min[0], bounds.min[1], bounds.min[2]),
            voxel_size,
            dims,
            cells,
        })
    }

    pub(crate) fn from_parts(
        origin: Vector3<f64>,
        voxel_size: f64,
        dims: [usize; 3],
        cells: Vec<bool>,
    ) -> Result<Self, OccupancyError> {
        if !voxel_size.is_finite() || voxel_size <= 0.0 {
            return Err(OccupancyError::BadVoxelSize(voxel_size));
        }
        if dims.contains(&0) || cells.len() != dims[0] * dims[1] * dims[2] {
            return Err(OccupancyError::BadGridShape {
                dims,
                cells: cells.len(),
            });
        }
        Ok(Self {
            origin,
            voxel_size,
            dims,
            cells,
        })
    }

    pub(crate) fn set_occupied(&mut self, idx: [usize; 3], value: bool) {
        let flat = self.flat(idx);
        self.cells[flat] = value;
    }

    pub fn origin(&self) -> Vector3<f64> {
        self.origin
    }

    pub fn voxel_size(&self) -> f64 {
        self.voxel_size
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub(crate) fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    fn flat(&self, idx: [usize; 3]) -> usize {
        (idx[2] * self.dims[1] + idx[1]) * self.dims[0] + idx[0]
    }

    /// Voxel index of a point under the half-open convention, if inside.
    pub fn voxel_index(&self, p: &Vector3<f64>) -> Option<[usize; 3]> {
        let mut idx = [0usize; 3];
        for a in 0..3 {
            let f = ((p[a] - self.origin[a]) / self.voxel_size).floor();
            if f < 0.0 || f >= self.dims[a] as f64 {
                return None;
            }
            idx[a] = f as usize;
        }
        Some(idx)
    }

    pub fn voxel_center(&self, idx: [usize; 3]) -> Vector3<f64> {
        Vector3::new(
            self.origin[0] + (idx[0] as f64 + 0.5) * self.voxel_size,
            self.origin[1] + (idx[1] as f64 + 0.5) * self.voxel_size,
            self.origin[2] + (idx[2] as f64 + 0.5) * self.voxel_size,
        )
    }

    pub fn is_occupied_index(&self, idx: [usize; 3]) -> bool {
        idx[0] < self.dims[0]
            && idx[1] < self.dims[1]
            && idx[2] < self.dims[2]
            && self.cells[self.flat(idx)]
    }

    /// The occupancy indicator: 1 iff the point lies in an occupied voxel;
    /// out-of-bounds points are free. Total function.
    pub fn occ(&self, p: &Vector3<f64>) -> bool {
        match self.voxel_index(p) {
            Some(idx) => self.cells[self.flat(idx)],
            None => false,
        }
    }

    /// Whether the segment `a→b` passes through an occupied voxel, by a fine
    /// march at quarter-voxel resolution (endpoints included). Corner clips
    /// thinner than a quarter voxel may be missed; obstacle validation always
    /// works with solid primitives at least one voxel thick.
    pub fn segment_hits_occupied(&self, a: &Vector3<f64>, b: &Vector3<f64>) -> bool {
        let dir = b - a;
        let len = dir.norm();
        let steps = ((len / (self.voxel_size / 4.0)).ceil() as usize).max(1);
        for k in 0..=steps {
            let p = a + dir * (k as f64 / steps as f64);
            if self.occ(&p) {
                return true;
            }
        }
        false
    }

    /// Indices of voxels whose centers lie within `radius` of `idx`'s center
    /// (Chebyshev metric, in voxels) — used for dilated goal-region tests.
    pub fn dilated_contains(&self, idx: [usize; 3], p: &Vector3<f64>, dilation: usize) -> bool {
        match self.voxel_index(p) {
            None => false,
            Some(q) => (0..3).all(|a| {
                let lo = idx[a].saturating_sub(dilation);
                let hi = idx[a] + dilation;
                q[a] >= lo && q[a] <= hi
            }),
        }
    }
}
