//! Z-buffer rendering of world models into range maps, and back-projection
//! of range maps into labeled point clouds.

pub(crate) mod kernel;

use rayon::prelude::*;

use crate::cloud::{ClassId, PointCloud};
use crate::pose::Pose;
use crate::sensor::LidarConfig;
use crate::world::WorldModel;

use kernel::PixelKernel;

/// Sentinel stored in the range channel of empty pixels.
pub const INVALID_RANGE: f32 = 0.0;

const EMPTY_KEY: u64 = u64::MAX;

/// H×W image of the nearest return per pixel, row-major (`row * W + col`).
#[derive(Debug, Clone, PartialEq)]
pub struct RangeMap {
    pub(crate) config: LidarConfig,
    pub(crate) range: Vec<f32>,
    pub(crate) label: Vec<ClassId>,
    pub(crate) intensity: Vec<f32>,
    pub(crate) source: Vec<u32>,
    pub(crate) valid: Vec<bool>,
}

/// Contents of one valid pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pixel {
    pub range: f32,
    pub label: ClassId,
    pub intensity: f32,
    pub source: u32,
}

impl RangeMap {
    pub fn empty(config: LidarConfig) -> Self {
        let n = config.pixel_count();
        RangeMap {
            config,
            range: vec![INVALID_RANGE; n],
            label: vec![0; n],
            intensity: vec![0.0; n],
            source: vec![0; n],
            valid: vec![false; n],
        }
    }

    pub fn config(&self) -> &LidarConfig {
        &self.config
    }

    pub fn width(&self) -> usize {
        self.config.width() as usize
    }

    pub fn height(&self) -> usize {
        self.config.channels() as usize
    }

    #[inline]
    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.width() + col
    }

    pub fn get(&self, col: usize, row: usize) -> Option<Pixel> {
        self.get_index(self.index(col, row))
    }

    #[inline]
    pub fn get_index(&self, i: usize) -> Option<Pixel> {
        self.valid[i].then(|| Pixel {
            range: self.range[i],
            label: self.label[i],
            intensity: self.intensity[i],
            source: self.source[i],
        })
    }

    /// Stores `px` at pixel `i`, or clears the pixel when its range falls
    /// outside `(0, max_range]`.
    #[inline]
    pub fn set_index(&mut self, i: usize, px: Pixel) {
        if px.range > 0.0 && (px.range as f64) <= self.config.max_range() {
            self.range[i] = px.range;
            self.label[i] = px.label;
            self.intensity[i] = px.intensity;
            self.source[i] = px.source;
            self.valid[i] = true;
        } else {
            self.clear_index(i);
        }
    }

    #[inline]
    pub fn clear_index(&mut self, i: usize) {
        self.range[i] = INVALID_RANGE;
        self.label[i] = 0;
        self.intensity[i] = 0.0;
        self.source[i] = 0;
        self.valid[i] = false;
    }

    pub fn ranges(&self) -> &[f32] {
        &self.range
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.label
    }

    pub fn intensities(&self) -> &[f32] {
        &self.intensity
    }

    pub fn sources(&self) -> &[u32] {
        &self.source
    }

    pub fn valid_mask(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }
}

/// Rendering knobs. `threads > 1` splits the point scan over a rayon pool;
/// the result is identical to the sequential scan.
#[derive(Debug, Clone, Copy)]
pub struct RenderOptions {
    pub threads: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { threads: 1 }
    }
}

/// Renders `world` as seen by `config` at the sensor origin.
pub fn render(world: &WorldModel, config: &LidarConfig) -> RangeMap {
    render_posed(world, &Pose::identity(), config, RenderOptions::default())
}

/// Renders `pose(world)` without materializing the moved world. Equal to
/// `render(&world.augment_pose(pose)?, config)` bit for bit.
pub fn render_posed(
    world: &WorldModel,
    pose: &Pose,
    config: &LidarConfig,
    options: RenderOptions,
) -> RangeMap {
    let keys = zbuffer(world, pose, config, options);
    let cloud = world.cloud();
    let mut map = RangeMap::empty(*config);
    for (i, &key) in keys.iter().enumerate().take(config.pixel_count()) {
        if key == EMPTY_KEY {
            continue;
        }
        let idx = (key & 0xffff_ffff) as usize;
        map.range[i] = f32::from_bits((key >> 32) as u32);
        map.label[i] = cloud.labels()[idx];
        map.intensity[i] = cloud.intensities()[idx];
        map.source[i] = cloud.sources()[idx];
        map.valid[i] = true;
    }
    map
}

/// World index of the winning point of every pixel (`None` for empty
/// pixels), row-major.
pub fn render_winners(
    world: &WorldModel,
    pose: &Pose,
    config: &LidarConfig,
    options: RenderOptions,
) -> Vec<Option<u32>> {
    zbuffer(world, pose, config, options)
        .into_iter()
        .take(config.pixel_count())
        .map(|k| (k != EMPTY_KEY).then_some((k & 0xffff_ffff) as u32))
        .collect()
}

/// One key per pixel plus a trailing discard slot. A key packs the f32
/// range bits above the world index, so the minimum key is the nearest
/// point with ties going to the lower index.
fn zbuffer(world: &WorldModel, pose: &Pose, config: &LidarConfig, options: RenderOptions) -> Vec<u64> {
    let kernel = PixelKernel::new(config);
    let cloud = world.cloud();
    let (rot, t) = pose.coefficients();
    let slots = config.pixel_count() + 1;
    let scan = |start: usize, end: usize, keys: &mut [u64]| {
        kernel.scan(
            &rot,
            &t,
            &cloud.xs()[start..end],
            &cloud.ys()[start..end],
            &cloud.zs()[start..end],
            &mut |j, pix, range| {
                let key = ((range.to_bits() as u64) << 32) | (start + j) as u64;
                let slot = &mut keys[pix as usize];
                *slot = (*slot).min(key);
            },
        );
    };

    let n = cloud.len();
    let threads = options.threads.max(1);
    if threads == 1 || n < 4096 {
        let mut keys = vec![EMPTY_KEY; slots];
        scan(0, n, &mut keys);
        return keys;
    }
    let chunk = n.div_ceil(threads);
    let run = || {
        (0..threads)
            .into_par_iter()
            .map(|c| {
                let mut keys = vec![EMPTY_KEY; slots];
                scan((c * chunk).min(n), ((c + 1) * chunk).min(n), &mut keys);
                keys
            })
            .reduce_with(|mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x = (*x).min(*y));
                a
            })
            .unwrap_or_else(|| vec![EMPTY_KEY; slots])
    };
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    }
}

/// Pixel-center unit directions of a config, cached per column and row.
#[derive(Debug, Clone)]
pub(crate) struct DirectionTable {
    cos_az: Vec<f64>,
    sin_az: Vec<f64>,
    cos_el: Vec<f64>,
    sin_el: Vec<f64>,
}

impl DirectionTable {
    pub(crate) fn new(cfg: &LidarConfig) -> Self {
        let (mut cos_az, mut sin_az) = (Vec::new(), Vec::new());
        for c in 0..cfg.width() {
            let (az, _) = cfg.angles_at(c as f64 + 0.5, 0.5);
            cos_az.push(az.cos());
            sin_az.push(az.sin());
        }
        let (mut cos_el, mut sin_el) = (Vec::new(), Vec::new());
        for r in 0..cfg.channels() {
            let (_, el) = cfg.angles_at(0.5, r as f64 + 0.5);
            cos_el.push(el.cos());
            sin_el.push(el.sin());
        }
        DirectionTable {
            cos_az,
            sin_az,
            cos_el,
            sin_el,
        }
    }

    /// Same arithmetic as [`LidarConfig::back_project`] at the pixel center.
    #[inline]
    pub(crate) fn point(&self, col: usize, row: usize, r: f64) -> [f64; 3] {
        let ce = self.cos_el[row];
        [
            ce * self.cos_az[col] * r,
            ce * self.sin_az[col] * r,
            self.sin_el[row] * r,
        ]
    }
}

/// One point per valid pixel, back-projected through the pixel center at
/// the stored range, in row-major pixel order.
pub fn extract_cloud(map: &RangeMap) -> PointCloud {
    let table = DirectionTable::new(map.config());
    let w = map.width();
    let mut out = PointCloud::with_capacity(map.valid_count());
    for (i, px) in (0..map.valid.len()).filter_map(|i| map.get_index(i).map(|p| (i, p))) {
        let [x, y, z] = table.point(i % w, i / w, px.range as f64);
        out.push(nalgebra::Vector3::new(x, y, z), px.intensity, px.label, px.source);
    }
    out
}
