//! Synthetic labeled street scenes for benchmarks and tests.
//!
//! Class ids follow SemanticKITTI: 10 car, 40 road, 48 sidewalk, 50
//! building, 70 vegetation, 80 pole, 0 unlabeled.

use std::f64::consts::TAU;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cloud::PointCloud;
use crate::pose::Pose;
use crate::render::{extract_cloud, render_posed, RenderOptions};
use crate::sensor::LidarConfig;
use crate::world::{LabeledFrame, WorldModel};

pub const SENSOR_HEIGHT: f64 = 1.73;

#[derive(Debug, Clone, Copy)]
pub struct SceneParams {
    pub target_points: usize,
    pub seed: u64,
}

impl Default for SceneParams {
    fn default() -> Self {
        SceneParams {
            target_points: 1_000_000,
            seed: 0,
        }
    }
}

/// Street scene around the origin with exactly `target_points` points,
/// tagged with 8 source frames.
pub fn scene_cloud(p: &SceneParams) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let n = p.target_points;
    let mut c = PointCloud::with_capacity(n);
    let ground = -SENSOR_HEIGHT;

    let cars: Vec<(Vector3<f64>, f64)> = (0..14)
        .map(|_| {
            let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let x = rng.gen_range(-40.0..40.0);
            (Vector3::new(x, side * rng.gen_range(3.5..5.0), ground), rng.gen_range(-0.2..0.2))
        })
        .collect();
    let poles: Vec<(f64, f64)> = (0..30)
        .map(|_| {
            let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            (rng.gen_range(-60.0..60.0), side * rng.gen_range(6.5..7.5))
        })
        .collect();

    for i in 0..n {
        let kind = rng.gen_range(0.0..1.0);
        let (p, label) = if kind < 0.45 {
            // ground: road strip |y| < 6, sidewalk beyond
            let r: f64 = rng.gen_range(2.0..70.0);
            let a = rng.gen_range(0.0..TAU);
            let (x, y) = (r * a.cos(), r * a.sin());
            let label = if y.abs() < 6.0 { 40 } else { 48 };
            (Vector3::new(x, y, ground + rng.gen_range(-0.02..0.02)), label)
        } else if kind < 0.70 {
            // building facades on both sides
            let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let x: f64 = rng.gen_range(-80.0..80.0);
            let y = side * (12.0 + 3.0 * ((x / 10.0).floor().rem_euclid(3.0)));
            let z = ground + rng.gen_range(0.0..10.0);
            (Vector3::new(x, y, z), 50)
        } else if kind < 0.84 {
            let (base, yaw) = cars[rng.gen_range(0..cars.len())];
            let local = box_surface(&mut rng, Vector3::new(4.2, 1.8, 1.5));
            let (s, co) = f64::sin_cos(yaw);
            let world = Vector3::new(co * local.x - s * local.y, s * local.x + co * local.y, local.z + 0.75);
            (base + world, 10)
        } else if kind < 0.90 {
            let (px, py) = poles[rng.gen_range(0..poles.len())];
            let a = rng.gen_range(0.0..TAU);
            let z = ground + rng.gen_range(0.0..6.0);
            (Vector3::new(px + 0.12 * a.cos(), py + 0.12 * a.sin(), z), 80)
        } else if kind < 0.96 {
            // tree crowns above the poles
            let (px, py) = poles[rng.gen_range(0..poles.len())];
            let d = random_unit(&mut rng) * rng.gen_range(0.5..2.0);
            (Vector3::new(px + 1.5, py, ground + 6.0) + d, 70)
        } else {
            let r = rng.gen_range(3.0..50.0);
            let a = rng.gen_range(0.0..TAU);
            (Vector3::new(r * a.cos(), r * a.sin(), ground + rng.gen_range(0.0..3.0)), 0)
        };
        let source = (i * 8 / n.max(1)) as u32;
        c.push(p, rng.gen_range(0.0..1.0), label, source);
    }
    c
}

pub fn scene(p: &SceneParams) -> WorldModel {
    WorldModel::from_cloud(scene_cloud(p)).expect("synthetic scene is finite")
}

/// Frames of `world` captured by `sensor` while driving along +x at
/// `step` meters per frame with a slight left turn.
pub fn sequence(world: &WorldModel, sensor: &LidarConfig, frames: usize, step: f64) -> Vec<LabeledFrame> {
    (0..frames)
        .map(|k| {
            let pose = Pose::from_yaw(0.01 * k as f64, Vector3::new(step * k as f64, 0.05 * k as f64, 0.0));
            let map = render_posed(world, &pose.inverse(), sensor, RenderOptions::default());
            LabeledFrame::new(extract_cloud(&map), pose, k as u32)
        })
        .collect()
}

fn box_surface(rng: &mut ChaCha8Rng, size: Vector3<f64>) -> Vector3<f64> {
    let h = size * 0.5;
    let mut p = Vector3::new(
        rng.gen_range(-h.x..h.x),
        rng.gen_range(-h.y..h.y),
        rng.gen_range(-h.z..h.z),
    );
    let axis = rng.gen_range(0..3);
    p[axis] = if rng.gen_bool(0.5) { h[axis] } else { -h[axis] };
    p
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let a = rng.gen_range(0.0..TAU);
    let s = (1.0 - z * z).sqrt();
    Vector3::new(s * a.cos(), s * a.sin(), z)
}
