//! Batched point → pixel classification.
//!
//! Pixel assignment is defined by [`LidarConfig::project`] followed by
//! [`LidarConfig::pixel`] in f64. The batched path evaluates the angles in
//! f32 with a polynomial arctangent and only trusts the result when both
//! continuous coordinates sit farther than a proven error margin from a
//! pixel boundary; everything else is re-evaluated on the exact path. The
//! result is therefore identical to the exact definition for every point.

use std::f32::consts::{FRAC_PI_2 as FRAC_PI_2_F32, FRAC_PI_4 as FRAC_PI_4_F32, PI as PI_F32};
use std::f64::consts::PI;

use crate::sensor::LidarConfig;

/// Upper bound (radians) on the angle error of the f32 path, covering the
/// f64→f32 input rounding, the polynomial and the f32 arithmetic. Measured
/// worst case is below 1e-6.
pub(crate) const ANGLE_TOLERANCE: f32 = 4e-6;

const BLOCK: usize = 1024;

// atan(s) ≈ s + s³·P(s²) on |s| ≤ tan(π/8), max error 2e-8
const ATAN_COEFFS: [f32; 5] = [
    -0.333_333_3,
    0.199_995_5,
    -0.142_642_33,
    0.107_463,
    -0.064_593_81,
];

#[inline(always)]
pub(crate) fn fast_atan2(y: f32, x: f32) -> f32 {
    let ax = x.abs();
    let ay = y.abs();
    let mn = ax.min(ay);
    let mx = ax.max(ay);
    let big = mn > 0.414_213_57 * mx;
    let num = if big { mn - mx } else { mn };
    let den = if big { mn + mx } else { mx };
    let base = if big { FRAC_PI_4_F32 } else { 0.0 };
    let s = num / den;
    let w = s * s;
    let c = &ATAN_COEFFS;
    let p = c[0] + w * (c[1] + w * (c[2] + w * (c[3] + w * c[4])));
    let a = base + (s + s * w * p);
    let a = if ay > ax { FRAC_PI_2_F32 - a } else { a };
    let a = if x < 0.0 { PI_F32 - a } else { a };
    a.copysign(y)
}

/// Per-config constants of the classifier.
#[derive(Debug, Clone)]
pub(crate) struct PixelKernel {
    cfg: LidarConfig,
    width: u32,
    height_f: f32,
    f_up: f32,
    row_scale: f32,
    col_scale: f32,
    col_tol: f32,
    row_tol: f32,
    max_range: f64,
    /// Index used for points that land nowhere; one past the last pixel.
    pub(crate) none: u32,
}

impl PixelKernel {
    pub(crate) fn new(cfg: &LidarConfig) -> Self {
        let w = cfg.width() as f64;
        let h = cfg.channels() as f64;
        let ulp = f32::EPSILON as f64;
        let col_tol = ANGLE_TOLERANCE as f64 * w / (2.0 * PI) + 8.0 * w * ulp;
        let row_tol = ANGLE_TOLERANCE as f64 * h / cfg.fov()
            + 8.0 * (h + cfg.f_up().abs() * h / cfg.fov()) * ulp;
        PixelKernel {
            cfg: *cfg,
            width: cfg.width(),
            height_f: cfg.channels() as f32,
            f_up: cfg.f_up() as f32,
            row_scale: (h / cfg.fov()) as f32,
            col_scale: (w / (2.0 * PI)) as f32,
            col_tol: col_tol as f32,
            row_tol: row_tol as f32,
            max_range: cfg.max_range(),
            none: cfg.pixel_count() as u32,
        }
    }

    /// Reference classification: pixel index (or `none`) and f32 range.
    #[inline(never)]
    pub(crate) fn exact(&self, x: f64, y: f64, z: f64) -> (u32, f32) {
        let r = (x * x + y * y + z * z).sqrt();
        let rf = r as f32;
        if !(rf > 0.0 && (rf as f64) <= self.max_range) {
            return (self.none, rf);
        }
        let p = self.cfg.project_unchecked(x, y, z, r);
        match self.cfg.pixel(p.u, p.v) {
            Some((col, row)) => (row * self.width + col, rf),
            None => (self.none, rf),
        }
    }

    /// Classifies points `pose(x[i], y[i], z[i])` and hands
    /// `(local index, pixel, range)` to `sink` in input order.
    #[inline]
    pub(crate) fn scan(
        &self,
        rot: &[f64; 9],
        t: &[f64; 3],
        xs: &[f64],
        ys: &[f64],
        zs: &[f64],
        sink: &mut impl FnMut(usize, u32, f32),
    ) {
        #[cfg(target_arch = "x86_64")]
        {
            if std::is_x86_feature_detected!("avx2") {
                // SAFETY: the CPU supports AVX2, checked just above.
                unsafe { self.scan_avx2(rot, t, xs, ys, zs, sink) };
                return;
            }
        }
        self.scan_generic(rot, t, xs, ys, zs, sink);
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx2")]
    unsafe fn scan_avx2(
        &self,
        rot: &[f64; 9],
        t: &[f64; 3],
        xs: &[f64],
        ys: &[f64],
        zs: &[f64],
        sink: &mut impl FnMut(usize, u32, f32),
    ) {
        self.scan_generic(rot, t, xs, ys, zs, sink)
    }

    #[inline(always)]
    fn scan_generic(
        &self,
        rot: &[f64; 9],
        t: &[f64; 3],
        xs: &[f64],
        ys: &[f64],
        zs: &[f64],
        sink: &mut impl FnMut(usize, u32, f32),
    ) {
        let n = xs.len().min(ys.len()).min(zs.len());
        let mut fx = [0f32; BLOCK];
        let mut fy = [0f32; BLOCK];
        let mut fz = [0f32; BLOCK];
        let mut range = [0f32; BLOCK];
        let mut uu = [0f32; BLOCK];
        let mut vv = [0f32; BLOCK];
        let mut pixel = [0u32; BLOCK];
        let mut check = [0u8; BLOCK];

        let wi = self.width as i32;
        let max_range = self.max_range;
        let (f_up, row_scale, col_scale) = (self.f_up, self.row_scale, self.col_scale);
        let (col_tol, row_tol, height_f, none) = (self.col_tol, self.row_tol, self.height_f, self.none);
        let mut start = 0;
        while start < n {
            let end = (start + BLOCK).min(n);
            let len = end - start;
            let (xc, yc, zc) = (&xs[start..end], &ys[start..end], &zs[start..end]);
            for j in 0..len {
                let (px, py, pz) = (xc[j], yc[j], zc[j]);
                // same expression order as Pose::apply_xyz
                let x = rot[0] * px + rot[1] * py + rot[2] * pz + t[0];
                let y = rot[3] * px + rot[4] * py + rot[5] * pz + t[1];
                let z = rot[6] * px + rot[7] * py + rot[8] * pz + t[2];
                range[j] = (x * x + y * y + z * z).sqrt() as f32;
                fx[j] = x as f32;
                fy[j] = y as f32;
                fz[j] = z as f32;
            }
            for j in 0..len {
                let (x, y, z) = (fx[j], fy[j], fz[j]);
                let rho = (x * x + y * y).sqrt();
                vv[j] = (f_up - fast_atan2(z, rho)) * row_scale;
                uu[j] = (PI_F32 - fast_atan2(y, x)) * col_scale;
            }
            for j in 0..len {
                let (u, v, rf) = (uu[j], vv[j], range[j]);
                let range_ok = (rf > 0.0) & ((rf as f64) <= max_range);
                let vi = v as i32;
                let ui = u as i32;
                let fu = u - ui as f32;
                let fv = v - vi as f32;
                let u_safe = (fu >= col_tol) & (fu <= 1.0 - col_tol);
                let v_safe = (fv >= row_tol) & (fv <= 1.0 - row_tol);
                let in_fov = (v >= 0.0) & (v < height_f);
                let col = if ui >= wi { ui - wi } else { ui };
                let hit = range_ok & in_fov & (col >= 0) & (col < wi);
                pixel[j] = if hit {
                    vi.wrapping_mul(wi).wrapping_add(col) as u32
                } else {
                    none
                };
                let near_fov = (v > -row_tol) & (v < height_f + row_tol);
                check[j] = (range_ok & near_fov & !(u_safe & v_safe)) as u8;
            }
            for j in 0..len {
                if check[j] != 0 {
                    let (px, py, pz) = (xc[j], yc[j], zc[j]);
                    let x = rot[0] * px + rot[1] * py + rot[2] * pz + t[0];
                    let y = rot[3] * px + rot[4] * py + rot[5] * pz + t[1];
                    let z = rot[6] * px + rot[7] * py + rot[8] * pz + t[2];
                    (pixel[j], range[j]) = self.exact(x, y, z);
                }
            }
            for j in 0..len {
                sink(start + j, pixel[j], range[j]);
            }
            start = end;
        }
    }
}
