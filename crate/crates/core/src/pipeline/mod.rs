//! Seeded on-demand augmentation: sample a sensor, then for each mixed
//! world sample a pose and a motion, render, distort; mix the maps by
//! sampled sectors and back-project.

mod spec;

use std::time::{Duration, Instant};

use nalgebra::Vector3;

pub use spec::{parse_seed, seed_from_env, AugmentSpec};

use crate::cloud::PointCloud;
use crate::distortion::{distort, sample_motion, MotionParams};
use crate::error::{Error, Result};
use crate::mixer::{mix, sample_sectors, Sector};
use crate::pose::Pose;
use crate::render::{extract_cloud, render_posed, RangeMap, RenderOptions};
use crate::sampling::{choose, motion_stream, pose_stream, stream, uniform, uniform_int, UniformSource};
use crate::sampling::{STREAM_CONFIG, STREAM_SECTORS};
use crate::sensor::LidarConfig;
use crate::world::WorldModel;

/// Draw order: width, channels, f_up, f_down.
pub fn sample_config(spec: &AugmentSpec, src: &mut impl UniformSource) -> Result<LidarConfig> {
    if let Some(c) = spec.fixed_config {
        return Ok(c);
    }
    let width = choose(src, &spec.widths);
    let channels = uniform_int(src, spec.channels);
    let f_up = uniform(src, spec.f_up);
    let f_down = uniform(src, spec.f_down);
    LidarConfig::new(channels, width, f_up, f_down, spec.max_range, spec.spin_hz)
}

/// `R_z(yaw)` with componentwise uniform translation. Draw order: yaw, x,
/// y, z.
pub fn sample_pose(spec: &AugmentSpec, src: &mut impl UniformSource) -> Pose {
    let yaw = uniform(src, spec.yaw);
    let x = uniform(src, spec.tx);
    let y = uniform(src, spec.ty);
    let z = uniform(src, spec.tz);
    Pose::from_yaw(yaw, Vector3::new(x, y, z))
}

#[derive(Debug, Clone)]
pub struct AugmentOutput {
    pub cloud: PointCloud,
    pub map: RangeMap,
    pub config: LidarConfig,
    pub seed: u64,
    pub poses: Vec<Pose>,
    pub motions: Vec<MotionParams>,
    pub sectors: Vec<Sector>,
    /// Wall time of the call, world construction excluded.
    pub latency: Duration,
}

/// Augments `worlds[..spec.n_mix]`; the output depends only on the worlds
/// and `spec` (not on `spec.threads`).
pub fn augment(worlds: &[&WorldModel], spec: &AugmentSpec) -> Result<AugmentOutput> {
    let started = Instant::now();
    spec.validate()?;
    if worlds.len() < spec.n_mix {
        return Err(Error::invalid(format!(
            "{} world(s) given but n_mix = {}",
            worlds.len(),
            spec.n_mix
        )));
    }
    if let Some(i) = worlds[..spec.n_mix].iter().position(|w| w.is_empty()) {
        return Err(Error::invalid(format!("world {i} is empty")));
    }
    let seed = spec.seed;
    let config = sample_config(spec, &mut stream(seed, STREAM_CONFIG))?;
    let options = RenderOptions { threads: spec.threads };
    let mut poses = Vec::with_capacity(spec.n_mix);
    let mut motions = Vec::with_capacity(spec.n_mix);
    let mut maps = Vec::with_capacity(spec.n_mix);
    for (i, world) in worlds[..spec.n_mix].iter().enumerate() {
        let pose = sample_pose(spec, &mut pose_stream(seed, i));
        let motion = sample_motion(
            &mut motion_stream(seed, i),
            spec.speed_kmh,
            spec.yaw_rate,
            config.spin_omega(),
        )?;
        let rendered = render_posed(world, &pose, &config, options);
        maps.push(distort(&rendered, &motion, spec.distortion));
        poses.push(pose);
        motions.push(motion);
    }
    let sectors = sample_sectors(&mut stream(seed, STREAM_SECTORS), spec.n_mix)?;
    let map = if maps.len() == 1 {
        maps.pop().expect("one map")
    } else {
        let refs: Vec<&RangeMap> = maps.iter().collect();
        mix(&refs, &sectors)?
    };
    let cloud = extract_cloud(&map);
    Ok(AugmentOutput {
        cloud,
        map,
        config,
        seed,
        poses,
        motions,
        sectors,
        latency: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::render;
    use crate::sampling::ConstantSource;
    use crate::sensor::Preset;
    use crate::synth;
    use std::f64::consts::PI;

    #[test]
    fn low_endpoint_config() {
        let c = sample_config(&AugmentSpec::default(), &mut ConstantSource(0.0)).unwrap();
        assert_eq!((c.width(), c.channels(), c.f_up(), c.f_down()), (1024, 16, 0.0, -PI / 6.0));
    }

    #[test]
    fn midpoint_pose_is_identity() {
        let p = sample_pose(&AugmentSpec::default(), &mut ConstantSource(0.5));
        assert!(p.is_identity());
    }

    #[test]
    fn identity_spec_collapses_to_render() {
        let world = synth::scene(&synth::SceneParams { target_points: 20_000, seed: 5 });
        let cfg = Preset::V32.config();
        let out = augment(&[&world], &AugmentSpec::identity(cfg)).unwrap();
        assert_eq!(out.map, render(&world, &cfg));
    }

    #[test]
    fn same_seed_same_output_and_threads_do_not_matter() {
        let world = synth::scene(&synth::SceneParams { target_points: 30_000, seed: 1 });
        let spec = AugmentSpec { seed: 99, ..Default::default() };
        let a = augment(&[&world, &world], &spec).unwrap();
        let b = augment(&[&world, &world], &AugmentSpec { threads: 3, ..spec.clone() }).unwrap();
        assert_eq!(a.map, b.map);
        assert_eq!(a.cloud, b.cloud);
    }

    #[test]
    fn too_few_worlds_is_rejected() {
        let world = synth::scene(&synth::SceneParams { target_points: 1000, seed: 1 });
        assert!(augment(&[&world], &AugmentSpec::default()).is_err());
    }
}
