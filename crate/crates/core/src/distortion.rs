//! Spin/ego-motion distortion of range maps.
//!
//! Columns are indexed from the scan start: column `u` is swept at scan
//! angle `u·2π/W`, i.e. `u·2π/(W·ω₀)` seconds after column 0.
//!
//! * Resampling: with platform yaw rate `ω` the effective spin is `ω₀ + ω`,
//!   so column `u` lands at `u' = round(u·(ω₀ + ω)/ω₀)`. Destinations at or
//!   beyond `W` are dropped, skipped destinations stay empty, and when
//!   several columns land on one destination the later-scanned one wins.
//! * Travel: a pixel swept at column `u` was measured after the platform
//!   moved `d(u) = V·(u·2π/W)/ω₀` forward. The default mode moves the
//!   pixel's 3D point by `−d` along x and re-projects it through a z-buffer;
//!   [`DepthMode::RangeAdd`] adds `d` to the stored range instead.

use crate::error::{Error, Result};
use crate::render::kernel::PixelKernel;
use crate::render::{DirectionTable, RangeMap};
use crate::sampling::{uniform, UniformSource};

use std::f64::consts::PI;

/// Platform motion during one sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionParams {
    /// Forward speed, m/s.
    pub speed: f64,
    /// Platform yaw rate, rad/s.
    pub yaw_rate: f64,
    /// Sensor spin rate, rad/s.
    pub spin_omega: f64,
}

impl MotionParams {
    pub fn new(speed: f64, yaw_rate: f64, spin_omega: f64) -> Result<Self> {
        if !(spin_omega > 0.0 && spin_omega.is_finite()) {
            return Err(Error::invalid(format!("spin rate must be positive, got {spin_omega} rad/s")));
        }
        if !speed.is_finite() || !yaw_rate.is_finite() || spin_omega + yaw_rate == 0.0 {
            return Err(Error::invalid(format!(
                "invalid motion: speed {speed} m/s, yaw rate {yaw_rate} rad/s"
            )));
        }
        Ok(MotionParams {
            speed,
            yaw_rate,
            spin_omega,
        })
    }

    pub fn from_kmh(speed_kmh: f64, yaw_rate: f64, spin_omega: f64) -> Result<Self> {
        Self::new(speed_kmh / 3.6, yaw_rate, spin_omega)
    }

    pub fn stationary(spin_omega: f64) -> Result<Self> {
        Self::new(0.0, 0.0, spin_omega)
    }

    /// `(ω₀ + ω)/ω₀`.
    pub fn column_scale(&self) -> f64 {
        (self.spin_omega + self.yaw_rate) / self.spin_omega
    }

    /// Travel distance after sweeping `angle` radians from the scan start.
    pub fn displacement(&self, angle: f64) -> f64 {
        self.speed * (angle / self.spin_omega)
    }

    /// Travel distance at continuous column `u` of a `width`-column map.
    pub fn displacement_at(&self, u: f64, width: u32) -> f64 {
        self.displacement(u * 2.0 * PI / width as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistortionOrder {
    /// Resample columns, then apply travel at the destination column.
    #[default]
    ResampleFirst,
    /// Apply travel at the source column, then resample.
    TravelFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DepthMode {
    /// Translate the back-projected point and re-project it.
    #[default]
    Translate,
    /// Add `d(u)` to the range channel in place.
    RangeAdd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DistortOptions {
    pub order: DistortionOrder,
    pub depth: DepthMode,
}

/// Samples `V ~ U(speed_kmh)` (converted to m/s) and `ω ~ U(yaw_rate)`.
pub fn sample_motion(
    src: &mut impl UniformSource,
    speed_kmh: (f64, f64),
    yaw_rate: (f64, f64),
    spin_omega: f64,
) -> Result<MotionParams> {
    let v = uniform(src, speed_kmh);
    let w = uniform(src, yaw_rate);
    MotionParams::from_kmh(v, w, spin_omega)
}

/// Distorts `map` as if it had been captured while moving with `motion`.
pub fn distort(map: &RangeMap, motion: &MotionParams, options: DistortOptions) -> RangeMap {
    let resample = motion.yaw_rate != 0.0;
    let travel = motion.speed != 0.0;
    match options.order {
        DistortionOrder::ResampleFirst => {
            let m = if resample { resample_columns(map, motion.column_scale()) } else { map.clone() };
            if travel {
                apply_travel(&m, motion, options.depth)
            } else {
                m
            }
        }
        DistortionOrder::TravelFirst => {
            let m = if travel { apply_travel(map, motion, options.depth) } else { map.clone() };
            if resample {
                resample_columns(&m, motion.column_scale())
            } else {
                m
            }
        }
    }
}

/// Column `u` moves to `round(u·scale)`; see the module docs.
pub fn resample_columns(map: &RangeMap, scale: f64) -> RangeMap {
    let w = map.width();
    let h = map.height();
    let mut out = RangeMap::empty(*map.config());
    let dst: Vec<Option<usize>> = (0..w)
        .map(|u| {
            let d = (u as f64 * scale).round();
            (d >= 0.0 && d < w as f64).then_some(d as usize)
        })
        .collect();
    for row in 0..h {
        let base = row * w;
        for (u, d) in dst.iter().enumerate() {
            let Some(d) = *d else { continue };
            let (s, d) = (base + u, base + d);
            out.range[d] = map.range[s];
            out.label[d] = map.label[s];
            out.intensity[d] = map.intensity[s];
            out.source[d] = map.source[s];
            out.valid[d] = map.valid[s];
        }
    }
    out
}

fn apply_travel(map: &RangeMap, motion: &MotionParams, mode: DepthMode) -> RangeMap {
    let w = map.width();
    let cfg = *map.config();
    let d: Vec<f64> = (0..w).map(|u| motion.displacement_at(u as f64, cfg.width())).collect();
    match mode {
        DepthMode::RangeAdd => {
            let mut out = map.clone();
            for i in 0..map.valid.len() {
                if let Some(mut px) = map.get_index(i) {
                    px.range = (px.range as f64 + d[i % w]) as f32;
                    out.set_index(i, px);
                }
            }
            out
        }
        DepthMode::Translate => translate(map, &d),
    }
}

fn translate(map: &RangeMap, d: &[f64]) -> RangeMap {
    let cfg = *map.config();
    let w = map.width();
    let table = DirectionTable::new(&cfg);
    let kernel = PixelKernel::new(&cfg);
    let n = map.valid_count();
    let mut origin = Vec::with_capacity(n);
    let (mut xs, mut ys, mut zs) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut keys = vec![u64::MAX; cfg.pixel_count() + 1];
    for i in (0..map.valid.len()).filter(|&i| map.valid[i]) {
        let col = i % w;
        if d[col] == 0.0 {
            // undisplaced pixels keep their cell and range as stored
            let key = ((map.range[i].to_bits() as u64) << 32) | i as u64;
            keys[i] = keys[i].min(key);
            continue;
        }
        let [x, y, z] = table.point(col, i / w, map.range[i] as f64);
        origin.push(i as u32);
        xs.push(x - d[col]);
        ys.push(y);
        zs.push(z);
    }
    let id = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
    kernel.scan(&id, &[0.0; 3], &xs, &ys, &zs, &mut |j, pix, range| {
        let key = ((range.to_bits() as u64) << 32) | origin[j] as u64;
        let slot = &mut keys[pix as usize];
        *slot = (*slot).min(key);
    });
    let mut out = RangeMap::empty(cfg);
    for (i, &key) in keys.iter().enumerate().take(cfg.pixel_count()) {
        if key == u64::MAX {
            continue;
        }
        let s = (key & 0xffff_ffff) as usize;
        out.range[i] = f32::from_bits((key >> 32) as u32);
        out.label[i] = map.label[s];
        out.intensity[i] = map.intensity[s];
        out.source[i] = map.source[s];
        out.valid[i] = true;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::PointCloud;
    use crate::render::{render, Pixel};
    use crate::sampling::ConstantSource;
    use crate::sensor::{LidarConfig, Preset};
    use crate::world::WorldModel;
    use nalgebra::Vector3;

    fn ring_world() -> WorldModel {
        let mut c = PointCloud::new();
        for i in 0..4000 {
            let a = i as f64 * 2.0 * PI / 4000.0;
            for z in [-1.5, -0.5, 0.3] {
                c.push(Vector3::new(15.0 * a.cos(), 15.0 * a.sin(), z), 0.1, (i % 3) as u16 + 1, 0);
            }
        }
        WorldModel::from_cloud(c).unwrap()
    }

    fn v64() -> LidarConfig {
        Preset::V64.config()
    }

    #[test]
    fn stationary_motion_is_bit_identical() {
        let map = render(&ring_world(), &v64());
        let m = MotionParams::stationary(v64().spin_omega()).unwrap();
        for order in [DistortionOrder::ResampleFirst, DistortionOrder::TravelFirst] {
            for depth in [DepthMode::Translate, DepthMode::RangeAdd] {
                let out = distort(&map, &m, DistortOptions { order, depth });
                assert_eq!(out, map);
            }
        }
    }

    #[test]
    fn full_sweep_travel_at_72_kmh_is_one_metre() {
        let m = MotionParams::from_kmh(72.0, 0.0, 2.0 * PI * 20.0).unwrap();
        let d = m.displacement_at(2048.0, 2048);
        assert!((d - 1.0).abs() <= 1e-12, "{d}");
        assert_eq!(m.displacement_at(0.0, 2048), 0.0);
    }

    #[test]
    fn yaw_rate_equal_to_spin_doubles_columns() {
        let cfg = v64();
        let mut map = RangeMap::empty(cfg);
        let px = |c: usize| Pixel {
            range: 10.0 + 0.01 * c as f32,
            label: 7,
            intensity: 0.5,
            source: c as u32,
        };
        for c in [0usize, 1, 512, 1023, 1024] {
            let i = map.index(c, 3);
            map.set_index(i, px(c));
        }
        let m = MotionParams::new(0.0, cfg.spin_omega(), cfg.spin_omega()).unwrap();
        let out = distort(&map, &m, DistortOptions::default());
        for c in [0usize, 1, 512, 1023] {
            assert_eq!(out.get(2 * c, 3), Some(px(c)));
        }
        // column 1024 would land on 2048: dropped
        assert_eq!(out.valid_count(), 4);
    }

    #[test]
    fn negative_yaw_rate_overlap_keeps_later_column() {
        let cfg = v64();
        let mut map = RangeMap::empty(cfg);
        for c in [3usize, 4] {
            let i = map.index(c, 0);
            map.set_index(i, Pixel { range: 5.0, label: c as u16, intensity: 0.0, source: 0 });
        }
        // scale 0.5: 3 -> round(1.5) = 2 and 4 -> 2; column 4 was swept later
        let out = resample_columns(&map, 0.5);
        assert_eq!(out.get(2, 0).unwrap().label, 4);
        assert_eq!(out.valid_count(), 1);
    }

    #[test]
    fn range_add_matches_translation_on_the_rear_axis() {
        let cfg = v64();
        let mut map = RangeMap::empty(cfg);
        // column 1: just past the rear axis; row with elevation near 0
        let row = (cfg.f_up() / cfg.fov() * cfg.channels() as f64) as usize;
        let i = map.index(1, row);
        map.set_index(i, Pixel { range: 30.0, label: 3, intensity: 0.0, source: 0 });
        let m = MotionParams::new(20.0, 0.0, cfg.spin_omega()).unwrap();
        let add = distort(&map, &m, DistortOptions { depth: DepthMode::RangeAdd, ..Default::default() });
        let tr = distort(&map, &m, DistortOptions::default());
        let want = 30.0 + m.displacement_at(1.0, cfg.width());
        assert_eq!(add.get(1, row).unwrap().range, want as f32);
        let got = tr.get(1, row).unwrap().range as f64;
        assert!((got - want).abs() < 1e-4, "{got} vs {want}");
    }

    #[test]
    fn distortion_never_adds_pixels() {
        let map = render(&ring_world(), &v64());
        for (v, w) in [(10.0, 0.0), (0.0, -0.3), (15.0, 0.39)] {
            let m = MotionParams::new(v, w, v64().spin_omega()).unwrap();
            assert!(distort(&map, &m, DistortOptions::default()).valid_count() <= map.valid_count());
        }
        let m = MotionParams::new(12.0, 0.0, v64().spin_omega()).unwrap();
        let out = distort(&map, &m, DistortOptions { depth: DepthMode::RangeAdd, ..Default::default() });
        assert_eq!(out.valid_count(), map.valid_count());
    }

    #[test]
    fn sampled_motion_endpoints() {
        let omega0 = v64().spin_omega();
        let lo = sample_motion(&mut ConstantSource(0.0), (0.0, 60.0), (-PI / 8.0, PI / 8.0), omega0).unwrap();
        assert_eq!((lo.speed, lo.yaw_rate), (0.0, -PI / 8.0));
        let hi = sample_motion(&mut ConstantSource(1.0), (0.0, 60.0), (-PI / 8.0, PI / 8.0), omega0).unwrap();
        assert!((hi.speed - 16.667).abs() < 1e-3);
        assert_eq!(hi.yaw_rate, PI / 8.0);
    }

    #[test]
    fn invalid_motion_is_rejected() {
        assert!(MotionParams::new(1.0, 0.0, 0.0).is_err());
        assert!(MotionParams::new(1.0, -5.0, 5.0).is_err());
        assert!(MotionParams::new(f64::NAN, 0.0, 5.0).is_err());
    }
}
