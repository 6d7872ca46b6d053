//! 10 cm voxel grid over a world model with per-voxel majority labels.

use std::collections::HashMap;

use crate::cloud::{ClassId, PointCloud, UNLABELED};
use crate::error::{Error, Result};

/// Edge length of a label voxel in meters.
pub const VOXEL_SIZE: f64 = 0.1;

/// Integer voxel coordinates `floor(p / VOXEL_SIZE)` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VoxelKey(pub i32, pub i32, pub i32);

impl VoxelKey {
    #[inline]
    pub fn of(x: f64, y: f64, z: f64) -> Option<VoxelKey> {
        let f = |c: f64| {
            let q = (c / VOXEL_SIZE).floor();
            (q >= i32::MIN as f64 && q <= i32::MAX as f64).then_some(q as i32)
        };
        Some(VoxelKey(f(x)?, f(y)?, f(z)?))
    }
}

/// Modal non-unlabeled class; ties go to the smallest class id. Returns
/// [`UNLABELED`] when no member carries a label.
pub fn modal_label(labels: impl IntoIterator<Item = ClassId>) -> ClassId {
    let mut labeled: Vec<ClassId> = labels.into_iter().filter(|&l| l != UNLABELED).collect();
    labeled.sort_unstable();
    let mut best = UNLABELED;
    let mut best_count = 0usize;
    let mut i = 0;
    while i < labeled.len() {
        let mut j = i;
        while j < labeled.len() && labeled[j] == labeled[i] {
            j += 1;
        }
        // strictly greater keeps the smaller id on ties (ascending scan)
        if j - i > best_count {
            best_count = j - i;
            best = labeled[i];
        }
        i = j;
    }
    best
}

/// Compressed voxel → members table.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelIndex {
    keys: Vec<VoxelKey>,
    representative: Vec<ClassId>,
    offsets: Vec<u32>,
    members: Vec<u32>,
    lookup: HashMap<VoxelKey, u32>,
}

impl VoxelIndex {
    pub fn build(cloud: &PointCloud) -> Result<Self> {
        if cloud.len() > u32::MAX as usize {
            return Err(Error::invalid("world model exceeds 2^32 points"));
        }
        let mut keyed: Vec<(VoxelKey, u32)> = Vec::with_capacity(cloud.len());
        for i in 0..cloud.len() {
            let key = VoxelKey::of(cloud.xs()[i], cloud.ys()[i], cloud.zs()[i]).ok_or_else(|| {
                Error::invalid(format!("point {i} has non-finite or out-of-grid coordinates"))
            })?;
            keyed.push((key, i as u32));
        }
        keyed.sort_unstable();

        let labels = cloud.labels();
        let mut keys = Vec::new();
        let mut representative = Vec::new();
        let mut offsets = vec![0u32];
        let mut members = Vec::with_capacity(keyed.len());
        let mut start = 0;
        while start < keyed.len() {
            let key = keyed[start].0;
            let mut end = start;
            while end < keyed.len() && keyed[end].0 == key {
                members.push(keyed[end].1);
                end += 1;
            }
            keys.push(key);
            representative.push(modal_label(
                keyed[start..end].iter().map(|&(_, i)| labels[i as usize]),
            ));
            offsets.push(members.len() as u32);
            start = end;
        }
        let lookup = keys.iter().enumerate().map(|(i, k)| (*k, i as u32)).collect();
        Ok(VoxelIndex {
            keys,
            representative,
            offsets,
            members,
            lookup,
        })
    }

    /// Rebuilds from stored arrays (the world cache); validates shape.
    pub(crate) fn from_parts(
        keys: Vec<VoxelKey>,
        representative: Vec<ClassId>,
        offsets: Vec<u32>,
        members: Vec<u32>,
        point_count: usize,
    ) -> Result<Self> {
        let ok = representative.len() == keys.len()
            && offsets.len() == keys.len() + 1
            && offsets.first() == Some(&0)
            && offsets.windows(2).all(|w| w[0] <= w[1])
            && *offsets.last().unwrap() as usize == members.len()
            && members.len() == point_count
            && keys.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(Error::invalid("inconsistent voxel index arrays"));
        }
        let lookup = keys.iter().enumerate().map(|(i, k)| (*k, i as u32)).collect();
        Ok(VoxelIndex {
            keys,
            representative,
            offsets,
            members,
            lookup,
        })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[VoxelKey] {
        &self.keys
    }

    pub fn representatives(&self) -> &[ClassId] {
        &self.representative
    }

    pub fn offsets(&self) -> &[u32] {
        &self.offsets
    }

    pub fn member_array(&self) -> &[u32] {
        &self.members
    }

    pub fn members(&self, voxel: usize) -> &[u32] {
        &self.members[self.offsets[voxel] as usize..self.offsets[voxel + 1] as usize]
    }

    pub fn find(&self, key: &VoxelKey) -> Option<usize> {
        self.lookup.get(key).map(|&i| i as usize)
    }

    /// Representative label of the voxel containing `(x, y, z)`, if the
    /// voxel is occupied.
    pub fn label_at(&self, x: f64, y: f64, z: f64) -> Option<ClassId> {
        let key = VoxelKey::of(x, y, z)?;
        self.find(&key).map(|v| self.representative[v])
    }
}

/// Occupancy statistics of a voxel index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoxelStats {
    pub voxels: usize,
    pub labeled_voxels: usize,
    pub labeled_points: usize,
    /// Mean number of points per occupied voxel.
    pub points_per_voxel: f64,
    /// Mean number of labeled points per voxel holding at least one.
    pub labeled_points_per_labeled_voxel: f64,
}

pub fn voxel_stats(cloud: &PointCloud, index: &VoxelIndex) -> VoxelStats {
    let labels = cloud.labels();
    let mut labeled_voxels = 0;
    let mut labeled_points = 0;
    for v in 0..index.len() {
        let n = index
            .members(v)
            .iter()
            .filter(|&&i| labels[i as usize] != UNLABELED)
            .count();
        if n > 0 {
            labeled_voxels += 1;
            labeled_points += n;
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    VoxelStats {
        voxels: index.len(),
        labeled_voxels,
        labeled_points,
        points_per_voxel: ratio(cloud.len(), index.len()),
        labeled_points_per_labeled_voxel: ratio(labeled_points, labeled_voxels),
    }
}
