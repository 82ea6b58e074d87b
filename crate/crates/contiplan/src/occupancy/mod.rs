//! Voxel occupancy grids from point clouds or procedural scenes, plus goal
//! candidate generation.

mod cloud;
mod export;
mod goals;
mod grid;
mod scene;

pub use cloud::{voxelize, PointCloud};
pub use export::{export_grid, import_grid};
pub use goals::{goal_candidates, GoalCandidate};
pub use grid::{Aabb, OccupancyGrid};
pub use scene::{
    generate_scene, rasterize_scene, validate_scene, Archetype, Primitive, SceneParams, SceneSpec,
    Shape,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OccupancyError {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("bounds degenerate on axis {axis}: [{min}, {max}]")]
    DegenerateBounds { axis: usize, min: f64, max: f64 },
    #[error("voxel size must be positive, got {0}")]
    BadVoxelSize(f64),
    #[error("grid dims {dims:?} do not match cell count {cells}")]
    BadGridShape { dims: [usize; 3], cells: usize },
    #[error("point {index} has non-finite coordinates")]
    NonFinitePoint { index: usize },
    #[error("point {index} confidence {value} outside [0, 1]")]
    BadConfidence { index: usize, value: f64 },
    #[error("primitive {index} lies outside the workspace bounds")]
    PrimitiveOutsideWorkspace { index: usize },
    #[error("scene validation failed: {0}")]
    SceneValidation(String),
    #[error("cloud parse error: {0}")]
    CloudParse(String),
    #[error("grid format error: {0}")]
    GridFormat(String),
    #[error("io error: {0}")]
    Io(String),
}
