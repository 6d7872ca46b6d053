use std::collections::HashSet;

use crate::cloud::{ClassId, PointCloud};
use crate::error::{Error, Result};

use super::{
    accumulate_dynamic, aggregate_filtered, place_object, select_adjacent, vote_and_propagate,
    BoxTrack, LabeledFrame, VoxelStats, WorldModel,
};

/// Frames aggregated per world model when not configured.
pub const DEFAULT_AGGREGATION_COUNT: usize = 40;

/// Temporal half-window for dynamic classes without box tracks.
pub const DEFAULT_DYNAMIC_WINDOW: usize = 5;

/// SemanticKITTI classes that can move: vehicles, persons, riders and the
/// `moving-*` variants.
pub const SEMANTIC_KITTI_DYNAMIC_CLASSES: &[ClassId] = &[
    10, 11, 13, 15, 16, 18, 20, 30, 31, 32, 252, 253, 254, 255, 256, 257, 258, 259,
];

/// How points on moving objects enter the world model.
#[derive(Debug, Clone, PartialEq)]
pub enum DynamicPolicy {
    /// Aggregate them like the static scene.
    AsStatic,
    /// Take points of `classes` only from frames within `window` frames of
    /// the reference (temporal, not geometric, adjacency).
    TemporalWindow { window: usize, classes: Vec<ClassId> },
    /// Remove in-box points from the static aggregation and re-insert each
    /// tracked object accumulated across its whole track.
    Tracks(Vec<BoxTrack>),
}

#[derive(Debug, Clone)]
pub struct WorldBuilder {
    pub aggregation_count: usize,
    pub dynamic: DynamicPolicy,
    pub vote: bool,
}

impl Default for WorldBuilder {
    fn default() -> Self {
        WorldBuilder {
            aggregation_count: DEFAULT_AGGREGATION_COUNT,
            dynamic: DynamicPolicy::AsStatic,
            vote: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildStats {
    pub reference: usize,
    pub frames_used: Vec<usize>,
    pub static_points: usize,
    pub object_points: usize,
    pub objects: usize,
    pub voxels: VoxelStats,
}

impl WorldBuilder {
    /// World model around frame position `t` of `frames`.
    pub fn build(&self, frames: &[LabeledFrame], t: usize) -> Result<(WorldModel, BuildStats)> {
        if frames.is_empty() {
            return Err(Error::invalid("empty sequence"));
        }
        let poses: Vec<_> = frames.iter().map(|f| f.pose).collect();
        let n = self.aggregation_count.min(frames.len()).max(1);
        let offsets = select_adjacent(&poses, t, n)?;
        let selected: HashSet<usize> = offsets.iter().map(|k| (t as isize + k) as usize).collect();

        let mut keys: Vec<(u32, u32)> = Vec::new();
        let (cloud, objects) = match &self.dynamic {
            DynamicPolicy::AsStatic => {
                let c = aggregate_filtered(frames, t, &offsets, |_, _| true)?;
                (c, Vec::new())
            }
            DynamicPolicy::TemporalWindow { window, classes } => {
                let dynamic: HashSet<ClassId> = classes.iter().copied().collect();
                let lo = t.saturating_sub(*window);
                let hi = (t + window).min(frames.len() - 1);
                let all: Vec<isize> = (lo..=hi)
                    .chain(selected.iter().copied())
                    .collect::<HashSet<_>>()
                    .into_iter()
                    .map(|p| p as isize - t as isize)
                    .collect();
                let c = aggregate_filtered(frames, t, &all, |pos, i| {
                    let is_dynamic = dynamic.contains(&frames[pos].cloud.labels()[i]);
                    if is_dynamic {
                        pos >= lo && pos <= hi
                    } else {
                        selected.contains(&pos)
                    }
                })?;
                (c, Vec::new())
            }
            DynamicPolicy::Tracks(tracks) => {
                let c = aggregate_filtered(frames, t, &offsets, |pos, i| {
                    let f = &frames[pos];
                    let world = f.pose.apply(&f.cloud.point(i));
                    !tracks.iter().any(|tr| {
                        tr.observation_at(f.time_index)
                            .is_some_and(|o| o.bbox.contains(&world))
                    })
                })?;
                let reference_time = frames[t].time_index;
                let mut objects = Vec::new();
                for track in tracks {
                    if track.observation_at(reference_time).is_none() {
                        continue;
                    }
                    let acc = accumulate_dynamic(frames, track)?;
                    if let Some(placed) = place_object(&acc, track, reference_time, &frames[t].pose) {
                        objects.push(placed);
                    }
                }
                (c, objects)
            }
        };

        // static points arrive ordered by (frame, index); object points are
        // merged in by source so the world order stays (source, capture order)
        let static_points = cloud.len();
        let object_points: usize = objects.iter().map(|o| o.len()).sum();
        let mut merged = cloud;
        for o in &objects {
            merged.extend(o);
        }
        if !objects.is_empty() {
            keys.reserve(merged.len());
            for i in 0..merged.len() {
                keys.push((merged.sources()[i], i as u32));
            }
            keys.sort_unstable();
            let mut ordered = PointCloud::with_capacity(merged.len());
            for &(_, i) in &keys {
                ordered.push_from(&merged, i as usize);
            }
            merged = ordered;
        }

        let mut world = WorldModel::from_cloud(merged)?;
        if self.vote && !world.is_empty() {
            world = vote_and_propagate(&world, &PointCloud::new())?.world;
        }
        let mut frames_used: Vec<usize> = selected.into_iter().collect();
        frames_used.sort_unstable();
        let stats = BuildStats {
            reference: t,
            frames_used,
            static_points,
            object_points,
            objects: objects.len(),
            voxels: world.stats(),
        };
        Ok((world, stats))
    }
}
