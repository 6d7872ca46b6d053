//! Dense labeled world models built from LiDAR sequences.

mod adjacency;
mod aggregate;
mod build;
mod dynamic;
pub mod voxel;

use sha2::{Digest, Sha256};

use crate::cloud::{ClassId, PointCloud, UNLABELED};
use crate::error::{Error, Result};
use crate::pose::Pose;

pub use adjacency::select_adjacent;
pub use aggregate::{aggregate_static, aggregate_filtered};
pub use build::{BuildStats, DynamicPolicy, WorldBuilder, DEFAULT_AGGREGATION_COUNT, DEFAULT_DYNAMIC_WINDOW, SEMANTIC_KITTI_DYNAMIC_CLASSES};
pub use dynamic::{accumulate_dynamic, place_object, BoxTrack, OrientedBox, TrackObservation};
pub use voxel::{modal_label, voxel_stats, VoxelIndex, VoxelKey, VoxelStats, VOXEL_SIZE};

/// One scan of a sequence in its own sensor coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFrame {
    pub cloud: PointCloud,
    pub pose: Pose,
    pub time_index: u32,
}

impl LabeledFrame {
    /// Wraps a scan; every point's source tag is set to `time_index`.
    pub fn new(mut cloud: PointCloud, pose: Pose, time_index: u32) -> Self {
        cloud.set_source(time_index);
        LabeledFrame {
            cloud,
            pose,
            time_index,
        }
    }
}

/// Aggregated labeled points in reference-frame sensor coordinates plus
/// their voxel label index.
///
/// Points are kept ordered by source frame (and by insertion order within a
/// source), so a lower point index always means an earlier
/// `(source, original index)` pair. The z-buffer tie-break relies on this.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldModel {
    cloud: PointCloud,
    voxels: VoxelIndex,
}

impl WorldModel {
    /// Builds the voxel index over `cloud`. Points are stably reordered by
    /// source tag.
    pub fn from_cloud(mut cloud: PointCloud) -> Result<Self> {
        cloud.sort_by_source();
        let voxels = VoxelIndex::build(&cloud)?;
        Ok(WorldModel { cloud, voxels })
    }

    pub(crate) fn from_parts_unchecked(cloud: PointCloud, voxels: VoxelIndex) -> Self {
        WorldModel { cloud, voxels }
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn voxels(&self) -> &VoxelIndex {
        &self.voxels
    }

    pub fn len(&self) -> usize {
        self.cloud.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cloud.is_empty()
    }

    pub fn stats(&self) -> VoxelStats {
        voxel_stats(&self.cloud, &self.voxels)
    }

    /// Rigidly moves every point; labels, sources and order are kept.
    pub fn augment_pose(&self, pose: &Pose) -> Result<WorldModel> {
        if pose.is_identity() {
            return Ok(self.clone());
        }
        WorldModel::from_cloud(self.cloud.transformed(pose))
    }

    /// SHA-256 over positions, intensities, labels and sources.
    pub fn content_hash(&self) -> [u8; 32] {
        let c = &self.cloud;
        let mut h = Sha256::new();
        h.update((c.len() as u64).to_le_bytes());
        for col in [c.xs(), c.ys(), c.zs()] {
            for v in col {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        for v in c.intensities() {
            h.update(v.to_bits().to_le_bytes());
        }
        for v in c.labels() {
            h.update(v.to_le_bytes());
        }
        for v in c.sources() {
            h.update(v.to_le_bytes());
        }
        let mut out = [0u8; 32];
        out.copy_from_slice(&h.finalize());
        out
    }
}

/// Labels after a voting pass.
#[derive(Debug, Clone)]
pub struct VoteResult {
    pub world: WorldModel,
    /// One label per point of the `unlabeled` input.
    pub propagated: Vec<ClassId>,
}

/// Majority vote per voxel, then overwrite.
///
/// Every world point in a voxel with at least one labeled member takes the
/// voxel's modal label (consistency), and every point of `unlabeled` that
/// falls into such a voxel receives it too (propagation). Points in voxels
/// without labeled members stay [`UNLABELED`].
pub fn vote_and_propagate(world: &WorldModel, unlabeled: &PointCloud) -> Result<VoteResult> {
    if world.is_empty() {
        return Err(Error::invalid("cannot vote on an empty world model"));
    }
    let index = &world.voxels;
    let mut labels = world.cloud.labels().to_vec();
    for v in 0..index.len() {
        let rep = index.representatives()[v];
        if rep == UNLABELED {
            continue;
        }
        for &m in index.members(v) {
            labels[m as usize] = rep;
        }
    }
    let propagated = (0..unlabeled.len())
        .map(|i| {
            index
                .label_at(unlabeled.xs()[i], unlabeled.ys()[i], unlabeled.zs()[i])
                .unwrap_or(UNLABELED)
        })
        .collect();
    let mut cloud = world.cloud.clone();
    cloud.set_labels(labels)?;
    // representatives are unchanged by construction, so the index carries over
    Ok(VoteResult {
        world: WorldModel {
            cloud,
            voxels: index.clone(),
        },
        propagated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;

    fn cloud(points: &[([f64; 3], ClassId)]) -> PointCloud {
        let mut c = PointCloud::new();
        for (p, l) in points {
            c.push(Vector3::new(p[0], p[1], p[2]), 0.0, *l, 0);
        }
        c
    }

    const CAR: ClassId = 10;
    const ROAD: ClassId = 40;

    #[test]
    fn majority_overwrites_members() {
        let w = WorldModel::from_cloud(cloud(&[
            ([0.01, 0.01, 0.01], CAR),
            ([0.02, 0.02, 0.02], CAR),
            ([0.03, 0.03, 0.03], ROAD),
        ]))
        .unwrap();
        let out = vote_and_propagate(&w, &PointCloud::new()).unwrap();
        assert_eq!(out.world.cloud().labels(), &[CAR, CAR, CAR]);
    }

    #[test]
    fn unlabeled_voxel_gets_nothing() {
        let w = WorldModel::from_cloud(cloud(&[([0.01, 0.01, 0.01], 0), ([5.0, 5.0, 5.0], CAR)])).unwrap();
        let u = cloud(&[([0.02, 0.02, 0.02], 0), ([9.0, 9.0, 9.0], 0), ([5.05, 5.01, 5.02], 0)]);
        let out = vote_and_propagate(&w, &u).unwrap();
        assert_eq!(out.propagated, vec![UNLABELED, UNLABELED, CAR]);
        assert_eq!(out.world.cloud().labels(), &[UNLABELED, CAR]);
    }

    #[test]
    fn ties_go_to_smaller_class() {
        let w = WorldModel::from_cloud(cloud(&[([0.01, 0.01, 0.01], ROAD), ([0.02, 0.02, 0.02], CAR)])).unwrap();
        let out = vote_and_propagate(&w, &PointCloud::new()).unwrap();
        assert_eq!(out.world.cloud().labels(), &[CAR, CAR]);
    }

    #[test]
    fn unlabeled_world_members_are_filled() {
        let w = WorldModel::from_cloud(cloud(&[([0.01, 0.01, 0.01], 0), ([0.02, 0.02, 0.02], ROAD)])).unwrap();
        let out = vote_and_propagate(&w, &PointCloud::new()).unwrap();
        assert_eq!(out.world.cloud().labels(), &[ROAD, ROAD]);
    }

    #[test]
    fn empty_world_is_rejected() {
        let w = WorldModel::from_cloud(PointCloud::new()).unwrap();
        assert!(vote_and_propagate(&w, &PointCloud::new()).is_err());
    }

    #[test]
    fn identity_augment_keeps_points_bitwise() {
        let w = WorldModel::from_cloud(cloud(&[([1.5, -2.25, 0.125], CAR), ([3.0, 4.0, 5.0], ROAD)])).unwrap();
        let same = w.augment_pose(&Pose::identity()).unwrap();
        assert_eq!(same.content_hash(), w.content_hash());
    }
}
