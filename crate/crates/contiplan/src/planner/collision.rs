use crate::kinematics::{
    hybrid_backbone, rigid_only_backbone, ArmGeometry, HybridConfig, KinematicsError, SegmentTag,
};
use crate::occupancy::OccupancyGrid;
use serde::{Deserialize, Serialize};

/// Occupied-voxel hit counts split by backbone segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CollisionStats {
    pub c_rigid: usize,
    pub c_soft: usize,
}

impl CollisionStats {
    pub fn total(&self) -> usize {
        self.c_rigid + self.c_soft
    }

    /// Per-field maximum, the worst case over a set of checks.
    pub fn max(&self, other: &Self) -> Self {
        Self {
            c_rigid: self.c_rigid.max(other.c_rigid),
            c_soft: self.c_soft.max(other.c_soft),
        }
    }
}

/// Count backbone points inside occupied voxels, split rigid/soft.
pub fn collision_count(
    grid: &OccupancyGrid,
    geometry: &ArmGeometry,
    config: &HybridConfig,
    n_backbone: usize,
) -> Result<CollisionStats, KinematicsError> {
    let backbone = hybrid_backbone(geometry, config, n_backbone)?;
    let mut stats = CollisionStats::default();
    for (point, tag) in backbone.points.iter().zip(&backbone.tags) {
        if grid.occ(point) {
            match tag {
                SegmentTag::Rigid => stats.c_rigid += 1,
                SegmentTag::Soft => stats.c_soft += 1,
            }
        }
    }
    Ok(stats)
}

/// Tip-only check used by the end-effector-only ablation: the backbone shape
/// is ignored and only the final point is tested.
pub fn collision_count_tip_only(
    grid: &OccupancyGrid,
    geometry: &ArmGeometry,
    config: &HybridConfig,
    n_backbone: usize,
) -> Result<CollisionStats, KinematicsError> {
    let backbone = hybrid_backbone(geometry, config, n_backbone)?;
    let mut stats = CollisionStats::default();
    let last = backbone.points.len() - 1;
    if grid.occ(&backbone.points[last]) {
        match backbone.tags[last] {
            SegmentTag::Rigid => stats.c_rigid += 1,
            SegmentTag::Soft => stats.c_soft += 1,
        }
    }
    Ok(stats)
}

/// Asymmetric feasibility: no rigid contact at all, soft contact up to tau.
pub fn feasible(stats: &CollisionStats, tau: usize) -> bool {
    stats.c_rigid == 0 && stats.c_soft <= tau
}

/// Rigid-only variant: the soft segment is swapped for a straight link of
/// equal length, so every backbone point counts as rigid and the soft
/// configuration is ignored.
pub fn collision_count_rigid_only(
    grid: &OccupancyGrid,
    geometry: &ArmGeometry,
    config: &HybridConfig,
    n_backbone: usize,
) -> Result<CollisionStats, KinematicsError> {
    let backbone = rigid_only_backbone(geometry, &config.rigid, n_backbone)?;
    let mut stats = CollisionStats::default();
    for point in &backbone.points {
        if grid.occ(point) {
            stats.c_rigid += 1;
        }
    }
    Ok(stats)
}

/// Which part of the arm a collision check looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollisionModel {
    /// Full backbone sampling (the shape-informed planner).
    FullBackbone,
    /// Tip point only (the end-effector-only ablation).
    TipOnly,
    /// Straight distal link of equal length, all points rigid (the rigid-only
    /// baseline arm).
    RigidSubstitute,
}

impl CollisionModel {
    pub fn count(
        &self,
        grid: &OccupancyGrid,
        geometry: &ArmGeometry,
        config: &HybridConfig,
        n_backbone: usize,
    ) -> Result<CollisionStats, KinematicsError> {
        match self {
            CollisionModel::FullBackbone => collision_count(grid, geometry, config, n_backbone),
            CollisionModel::TipOnly => collision_count_tip_only(grid, geometry, config, n_backbone),
            CollisionModel::RigidSubstitute => {
                collision_count_rigid_only(grid, geometry, config, n_backbone)
            }
        }
    }
}
