//! Accumulation of points on tracked moving objects.
//!
//! Boxes and per-step object motions are expressed in world coordinates;
//! frame points are lifted to world coordinates with the frame pose before
//! the box test.

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::pose::Pose;

use super::LabeledFrame;

/// Yaw-oriented 3D box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox {
    pub center: Vector3<f64>,
    pub half_extents: Vector3<f64>,
    pub yaw: f64,
}

impl OrientedBox {
    /// `size` is full length/width/height along the box's x/y/z axes.
    pub fn new(center: Vector3<f64>, size: Vector3<f64>, yaw: f64) -> Result<Self> {
        if !(size.iter().all(|s| s.is_finite() && *s > 0.0)) {
            return Err(Error::invalid(format!(
                "box size must be positive, got ({}, {}, {})",
                size.x, size.y, size.z
            )));
        }
        Ok(OrientedBox {
            center,
            half_extents: size * 0.5,
            yaw,
        })
    }

    /// Inclusive containment test.
    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        let d = p - self.center;
        let (s, c) = self.yaw.sin_cos();
        let lx = c * d.x + s * d.y;
        let ly = -s * d.x + c * d.y;
        lx.abs() <= self.half_extents.x
            && ly.abs() <= self.half_extents.y
            && d.z.abs() <= self.half_extents.z
    }
}

/// One time step of a track: the object's box and its motion since the
/// previous step (`T_n`, identity for the first step).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackObservation {
    pub time_index: u32,
    pub bbox: OrientedBox,
    pub motion: Pose,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxTrack {
    object_id: u32,
    observations: Vec<TrackObservation>,
}

impl BoxTrack {
    pub fn new(object_id: u32, observations: Vec<TrackObservation>) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::invalid(format!("track {object_id} has no observations")));
        }
        if observations.windows(2).any(|w| w[0].time_index >= w[1].time_index) {
            return Err(Error::invalid(format!(
                "track {object_id}: time indices must be strictly increasing"
            )));
        }
        Ok(BoxTrack {
            object_id,
            observations,
        })
    }

    pub fn object_id(&self) -> u32 {
        self.object_id
    }

    pub fn observations(&self) -> &[TrackObservation] {
        &self.observations
    }

    pub fn observation_at(&self, time_index: u32) -> Option<&TrackObservation> {
        self.observations
            .binary_search_by_key(&time_index, |o| o.time_index)
            .ok()
            .map(|i| &self.observations[i])
    }

    /// Object motion from its first observation to `time_index`
    /// (`T_n ∘ … ∘ T_1`).
    pub fn motion_until(&self, time_index: u32) -> Option<Pose> {
        let mut m = Pose::identity();
        for o in &self.observations {
            m = o.motion.compose(&m);
            if o.time_index == time_index {
                return Some(m);
            }
        }
        None
    }
}

/// Collects the in-box points of every observed frame, cancelling the
/// object's motion so all of them land in the object's first-frame pose
/// (world coordinates).
///
/// Running transform: `T ← T ∘ T_n⁻¹`, then `T(P_n ∩ b_n)` is appended.
/// Observations whose frame is absent from `frames` contribute no points but
/// still advance the running transform.
pub fn accumulate_dynamic(frames: &[LabeledFrame], track: &BoxTrack) -> Result<PointCloud> {
    let by_time: HashMap<u32, &LabeledFrame> = frames.iter().map(|f| (f.time_index, f)).collect();
    let mut running = Pose::identity();
    let mut out = PointCloud::new();
    for obs in track.observations() {
        running = running.compose(&obs.motion.inverse());
        let Some(frame) = by_time.get(&obs.time_index) else {
            continue;
        };
        let c = &frame.cloud;
        for i in 0..c.len() {
            let world = frame.pose.apply(&c.point(i));
            if obs.bbox.contains(&world) {
                out.push(running.apply(&world), c.intensities()[i], c.labels()[i], c.sources()[i]);
            }
        }
    }
    Ok(out)
}

/// Moves accumulated object points to where the object is at
/// `time_index`, expressed in the sensor coordinates of `reference`.
/// `None` when the track has no observation at that time.
pub fn place_object(
    accumulated: &PointCloud,
    track: &BoxTrack,
    time_index: u32,
    reference: &Pose,
) -> Option<PointCloud> {
    let motion = track.motion_until(time_index)?;
    Some(accumulated.transformed(&reference.inverse().compose(&motion)))
}
