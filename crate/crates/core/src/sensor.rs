//! Cylindrical LiDAR configurations and the projection between 3D points
//! and continuous range-map coordinates.
//!
//! Axes: x forward, y left, z up. Column `u` runs from the rear azimuth
//! (u = 0, atan2 = +π) through the forward direction (u = W/2) and back to
//! the rear; row `v` runs from the top of the vertical field of view (v = 0)
//! down to the bottom (v = H).

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::textcfg::{self, Document};

/// A cylindrical sensor description. Angles are stored in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LidarConfig {
    channels: u32,
    width: u32,
    f_up: f64,
    f_down: f64,
    max_range: f64,
    spin_rate_hz: f64,
}

/// Continuous range-map coordinates of a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub u: f64,
    pub v: f64,
    pub r: f64,
}

impl LidarConfig {
    pub fn new(
        channels: u32,
        width: u32,
        f_up: f64,
        f_down: f64,
        max_range: f64,
        spin_rate_hz: f64,
    ) -> Result<Self> {
        if channels == 0 || width == 0 {
            return Err(Error::invalid(format!(
                "sensor resolution must be positive, got {channels}x{width}"
            )));
        }
        if !(f_up.is_finite() && f_down.is_finite()) || f_up < 0.0 || f_down > 0.0 || f_up <= f_down
        {
            return Err(Error::invalid(format!(
                "vertical field of view needs f_up >= 0 >= f_down and f_up > f_down, got ({f_up}, {f_down}) rad"
            )));
        }
        if f_up > PI / 2.0 || f_down < -PI / 2.0 {
            return Err(Error::invalid("vertical field of view exceeds ±90°"));
        }
        if !(max_range.is_finite() && max_range > 0.0) {
            return Err(Error::invalid(format!("max range must be positive, got {max_range}")));
        }
        if !(spin_rate_hz.is_finite() && spin_rate_hz > 0.0) {
            return Err(Error::invalid(format!("spin rate must be positive, got {spin_rate_hz}")));
        }
        Ok(LidarConfig {
            channels,
            width,
            f_up,
            f_down,
            max_range,
            spin_rate_hz,
        })
    }

    /// Builds a config from the table's degree-valued field of view.
    pub fn from_degrees(
        channels: u32,
        width: u32,
        fov_up_deg: f64,
        fov_down_deg: f64,
        max_range: f64,
        spin_rate_hz: f64,
    ) -> Result<Self> {
        Self::new(
            channels,
            width,
            fov_up_deg.to_radians(),
            fov_down_deg.to_radians(),
            max_range,
            spin_rate_hz,
        )
    }

    pub fn preset(name: &str) -> Result<Self> {
        Ok(name.parse::<Preset>()?.config())
    }

    /// Number of rows (H).
    pub fn channels(&self) -> u32 {
        self.channels
    }

    /// Number of columns (W).
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn f_up(&self) -> f64 {
        self.f_up
    }

    pub fn f_down(&self) -> f64 {
        self.f_down
    }

    pub fn max_range(&self) -> f64 {
        self.max_range
    }

    pub fn spin_rate_hz(&self) -> f64 {
        self.spin_rate_hz
    }

    /// Total vertical field of view `|f_up| + |f_down|`.
    pub fn fov(&self) -> f64 {
        self.f_up.abs() + self.f_down.abs()
    }

    /// Spin angular speed in rad/s.
    pub fn spin_omega(&self) -> f64 {
        2.0 * PI * self.spin_rate_hz
    }

    pub fn pixel_count(&self) -> usize {
        self.channels as usize * self.width as usize
    }

    pub fn project(&self, p: &Vector3<f64>) -> Result<Projection> {
        let r = (p.x * p.x + p.y * p.y + p.z * p.z).sqrt();
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid(format!(
                "cannot project point with norm {r}"
            )));
        }
        Ok(self.project_unchecked(p.x, p.y, p.z, r))
    }

    #[inline]
    pub(crate) fn project_unchecked(&self, x: f64, y: f64, z: f64, r: f64) -> Projection {
        let w = self.width as f64;
        let h = self.channels as f64;
        let u = 0.5 * (1.0 - y.atan2(x) / PI) * w;
        let v = (1.0 - ((z / r).asin() - self.f_down) / self.fov()) * h;
        Projection { u, v, r }
    }

    /// Pixel `(column, row)` containing continuous coordinates, or `None`
    /// when the row falls outside the vertical field of view.
    #[inline]
    pub fn pixel(&self, u: f64, v: f64) -> Option<(u32, u32)> {
        let h = self.channels as f64;
        if !(v >= 0.0 && v < h) || !u.is_finite() {
            return None;
        }
        let col = (u.floor() as i64).rem_euclid(self.width as i64) as u32;
        Some((col, v as u32))
    }

    /// Exact inverse of [`project`](Self::project) on continuous coordinates.
    /// Pass `col + 0.5, row + 0.5` to recover a pixel-center direction.
    pub fn back_project(&self, u: f64, v: f64, r: f64) -> Result<Vector3<f64>> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid(format!("back-projection needs r > 0, got {r}")));
        }
        if !(v >= 0.0 && v < self.channels as f64) {
            return Err(Error::invalid(format!(
                "row coordinate {v} outside [0, {})",
                self.channels
            )));
        }
        let (az, el) = self.angles_at(u, v);
        Ok(direction(az, el) * r)
    }

    /// Azimuth and elevation (radians) of continuous coordinates.
    #[inline]
    pub fn angles_at(&self, u: f64, v: f64) -> (f64, f64) {
        let az = PI * (1.0 - 2.0 * u / self.width as f64);
        let el = self.f_up - (v / self.channels as f64) * self.fov();
        (az, el)
    }

    /// Angular quantization bound `2π/W + f/H`; multiplied by the range it
    /// bounds the distance between a point and its pixel-center
    /// back-projection.
    pub fn quantization_bound(&self) -> f64 {
        2.0 * PI / self.width as f64 + self.fov() / self.channels as f64
    }

    /// Reads a single sensor from a key=value description file.
    pub fn from_sensor_file(path: &Path) -> Result<Self> {
        let doc = textcfg::read(path)?;
        let mut sensors = sensors_from_document(&doc)?;
        match sensors.len() {
            1 => Ok(sensors.remove(0).1),
            0 => Err(Error::format(path, "no sensor description found")),
            n => Err(Error::format(
                path,
                format!("{n} sensors described; select one by name"),
            )),
        }
    }

    /// Serializes in the sensor-description grammar.
    pub fn to_sensor_text(&self) -> String {
        format!(
            "channels = {}\nwidth = {}\nfov_up_deg = {}\nfov_down_deg = {}\nmax_range_m = {}\nspin_hz = {}\n",
            self.channels,
            self.width,
            self.f_up.to_degrees(),
            self.f_down.to_degrees(),
            self.max_range,
            self.spin_rate_hz
        )
    }
}

impl fmt::Display for LidarConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{} fov={:+.3}/{:+.3}deg range={}m spin={}Hz",
            self.channels,
            self.width,
            self.f_up.to_degrees(),
            self.f_down.to_degrees(),
            self.max_range,
            self.spin_rate_hz
        )
    }
}

#[inline]
pub(crate) fn direction(az: f64, el: f64) -> Vector3<f64> {
    let ce = el.cos();
    Vector3::new(ce * az.cos(), ce * az.sin(), el.sin())
}

/// Sensors shipped with the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Velodyne HDL-64E
    V64,
    /// Velodyne HDL-32E
    V32,
    /// Velodyne VLP-16
    V16,
    /// Ouster OS-1 64
    O64,
    /// Ouster OS-1 128
    O128,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::V64, Preset::V32, Preset::V16, Preset::O64, Preset::O128];

    pub fn name(self) -> &'static str {
        match self {
            Preset::V64 => "V64",
            Preset::V32 => "V32",
            Preset::V16 => "V16",
            Preset::O64 => "O64",
            Preset::O128 => "O128",
        }
    }

    pub fn config(self) -> LidarConfig {
        let (h, w, up, down, range) = match self {
            Preset::V64 => (64, 2048, 2.0, -24.9, 120.0),
            Preset::V32 => (32, 2048, 10.67, -30.67, 100.0),
            Preset::V16 => (16, 2048, 15.0, -15.0, 100.0),
            Preset::O64 => (64, 1024, 22.5, -22.5, 120.0),
            Preset::O128 => (128, 1024, 22.5, -22.5, 120.0),
        };
        LidarConfig::from_degrees(h, w, up, down, range, 20.0).expect("preset table is valid")
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Every sensor in a description document, keyed by section name (the
/// unnamed top-level section is reported as `""`).
pub fn sensors_from_document(doc: &Document) -> Result<Vec<(String, LidarConfig)>> {
    let mut out = Vec::new();
    for section in doc.sections() {
        if section.is_empty() {
            continue;
        }
        let channels = section.require_parse::<u32>("channels")?;
        let width = section.require_parse::<u32>("width")?;
        let up = section.require_parse::<f64>("fov_up_deg")?;
        let down = section.require_parse::<f64>("fov_down_deg")?;
        let range = section.require_parse::<f64>("max_range_m")?;
        let spin = section.get_parse::<f64>("spin_hz")?.unwrap_or(20.0);
        section.reject_unknown(&[
            "channels",
            "width",
            "fov_up_deg",
            "fov_down_deg",
            "max_range_m",
            "spin_hz",
        ])?;
        let cfg = LidarConfig::from_degrees(channels, width, up, down, range, spin)
            .map_err(|e| section.error_at_header(e.to_string()))?;
        out.push((section.name().to_string(), cfg));
    }
    Ok(out)
}
