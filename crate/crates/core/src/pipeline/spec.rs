use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use crate::distortion::{DepthMode, DistortOptions, DistortionOrder};
use crate::error::{Error, Result};
use crate::sensor::{LidarConfig, Preset};
use crate::textcfg::{self, Document, Section};
use crate::SEED_ENV;

/// Sampling ranges and switches of one augmentation. Angles in radians,
/// translations in meters, speed in km/h, yaw rate in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentSpec {
    pub seed: u64,
    /// Horizontal resolutions to choose from, in this order.
    pub widths: Vec<u32>,
    /// Closed interval of channel counts.
    pub channels: (u32, u32),
    pub f_up: (f64, f64),
    pub f_down: (f64, f64),
    pub max_range: f64,
    pub spin_hz: f64,
    /// When set, every augmentation uses this sensor instead of sampling.
    pub fixed_config: Option<LidarConfig>,
    pub yaw: (f64, f64),
    pub tx: (f64, f64),
    pub ty: (f64, f64),
    pub tz: (f64, f64),
    pub speed_kmh: (f64, f64),
    pub yaw_rate: (f64, f64),
    pub n_mix: usize,
    pub distortion: DistortOptions,
    /// Render workers; never changes the output.
    pub threads: usize,
}

impl Default for AugmentSpec {
    fn default() -> Self {
        AugmentSpec {
            seed: 0,
            widths: vec![1024, 2048],
            channels: (16, 128),
            f_up: (0.0, PI / 12.0),
            f_down: (-PI / 6.0, 0.0),
            max_range: 120.0,
            spin_hz: 20.0,
            fixed_config: None,
            yaw: (-PI / 6.0, PI / 6.0),
            tx: (-1.0, 1.0),
            ty: (-0.5, 0.5),
            tz: (-0.1, 0.1),
            speed_kmh: (0.0, 60.0),
            yaw_rate: (-PI / 8.0, PI / 8.0),
            n_mix: 2,
            distortion: DistortOptions::default(),
            threads: 1,
        }
    }
}

const KEYS: &[&str] = &[
    "seed", "widths", "channels", "f_up", "f_down", "max_range_m", "spin_hz", "preset", "sensor",
    "yaw", "tx", "ty", "tz", "speed_kmh", "yaw_rate", "n_mix", "distortion_order", "depth_mode",
    "threads",
];

impl AugmentSpec {
    /// Fixed sensor, identity pose, no motion, one world: the pipeline then
    /// reduces to a plain render.
    pub fn identity(config: LidarConfig) -> Self {
        AugmentSpec {
            fixed_config: Some(config),
            yaw: (0.0, 0.0),
            tx: (0.0, 0.0),
            ty: (0.0, 0.0),
            tz: (0.0, 0.0),
            speed_kmh: (0.0, 0.0),
            yaw_rate: (0.0, 0.0),
            n_mix: 1,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::invalid(format!("`{field}`: {msg}")));
        if self.widths.is_empty() || self.widths.contains(&0) {
            return bad("widths", "need at least one positive width".into());
        }
        if self.channels.0 == 0 || self.channels.0 > self.channels.1 {
            return bad("channels", format!("invalid interval {:?}", self.channels));
        }
        for (name, (lo, hi)) in [
            ("f_up", self.f_up),
            ("f_down", self.f_down),
            ("yaw", self.yaw),
            ("tx", self.tx),
            ("ty", self.ty),
            ("tz", self.tz),
            ("speed_kmh", self.speed_kmh),
            ("yaw_rate", self.yaw_rate),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return bad(name, format!("invalid range [{lo}, {hi}]"));
            }
        }
        if self.f_up.0 < 0.0 || self.f_up.1 > PI / 2.0 {
            return bad("f_up", "must lie in [0, π/2]".into());
        }
        if self.f_down.1 > 0.0 || self.f_down.0 < -PI / 2.0 {
            return bad("f_down", "must lie in [-π/2, 0]".into());
        }
        if !(self.max_range > 0.0 && self.max_range.is_finite()) {
            return bad("max_range_m", format!("must be positive, got {}", self.max_range));
        }
        if !(self.spin_hz > 0.0 && self.spin_hz.is_finite()) {
            return bad("spin_hz", format!("must be positive, got {}", self.spin_hz));
        }
        let omega0 = 2.0 * PI * self.spin_hz;
        let omega0 = self.fixed_config.map_or(omega0, |c| c.spin_omega());
        if self.yaw_rate.0 <= -omega0 {
            return bad("yaw_rate", "must stay above minus the spin rate".into());
        }
        if self.n_mix == 0 {
            return bad("n_mix", "must be at least 1".into());
        }
        Ok(())
    }

    /// Replaces the seed with `LIDOMAUG_SEED` when that is set.
    pub fn apply_env_seed(&mut self) -> Result<()> {
        if let Some(seed) = seed_from_env()? {
            self.seed = seed;
        }
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_document(&textcfg::read(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_document(&Document::parse(text, Path::new("<spec>"))?)
    }

    pub fn from_document(doc: &Document) -> Result<Self> {
        if let Some(s) = doc.sections().iter().find(|s| !s.name().is_empty()) {
            return Err(s.error_at_header("augmentation specs have no sections"));
        }
        let mut spec = AugmentSpec::default();
        spec.update_from(doc.root())?;
        Ok(spec)
    }

    /// Overrides fields present in `section`, then validates.
    pub fn update_from(&mut self, s: &Section) -> Result<()> {
        s.reject_unknown(KEYS)?;
        if let Some(v) = s.get_parse("seed")? {
            self.seed = v;
        }
        if let Some(v) = s.get_list("widths")? {
            self.widths = v;
        }
        if let Some(v) = s.get_range("channels")? {
            self.channels = v;
        }
        macro_rules! range {
            ($($key:literal => $field:ident),*) => {$(
                if let Some(v) = s.get_range($key)? {
                    self.$field = v;
                }
            )*};
        }
        range!("f_up" => f_up, "f_down" => f_down, "yaw" => yaw, "tx" => tx, "ty" => ty,
               "tz" => tz, "speed_kmh" => speed_kmh, "yaw_rate" => yaw_rate);
        if let Some(v) = s.get_parse("max_range_m")? {
            self.max_range = v;
        }
        if let Some(v) = s.get_parse("spin_hz")? {
            self.spin_hz = v;
        }
        if let Some(v) = s.get_parse("n_mix")? {
            self.n_mix = v;
        }
        if let Some(v) = s.get_parse("threads")? {
            self.threads = v;
        }
        if let Some(e) = s.get("preset") {
            let p: Preset = e.value.parse().map_err(|err: Error| s.error_at(e, err.to_string()))?;
            self.fixed_config = Some(p.config());
        }
        if let Some(e) = s.get("sensor") {
            let cfg = parse_inline_sensor(&e.value).map_err(|err| s.error_at(e, err.to_string()))?;
            self.fixed_config = Some(cfg);
        }
        if let Some(e) = s.get("distortion_order") {
            self.distortion.order = match e.value.as_str() {
                "resample-first" => DistortionOrder::ResampleFirst,
                "travel-first" => DistortionOrder::TravelFirst,
                other => return Err(s.error_at(e, format!("unknown distortion_order `{other}`"))),
            };
        }
        if let Some(e) = s.get("depth_mode") {
            self.distortion.depth = match e.value.as_str() {
                "translate" => DepthMode::Translate,
                "range-add" => DepthMode::RangeAdd,
                other => return Err(s.error_at(e, format!("unknown depth_mode `{other}`"))),
            };
        }
        self.validate().map_err(|e| s.error_at_header(e.to_string()))
    }

    /// Serializes every field; [`AugmentSpec::parse`] reads it back exactly.
    pub fn to_text(&self) -> String {
        let mut t = String::new();
        let r = |(a, b): (f64, f64)| format!("{a:?}, {b:?}");
        let _ = writeln!(t, "seed = {}", self.seed);
        let widths: Vec<String> = self.widths.iter().map(u32::to_string).collect();
        let _ = writeln!(t, "widths = {}", widths.join(", "));
        let _ = writeln!(t, "channels = {}, {}", self.channels.0, self.channels.1);
        let _ = writeln!(t, "f_up = {}", r(self.f_up));
        let _ = writeln!(t, "f_down = {}", r(self.f_down));
        let _ = writeln!(t, "max_range_m = {:?}", self.max_range);
        let _ = writeln!(t, "spin_hz = {:?}", self.spin_hz);
        if let Some(c) = &self.fixed_config {
            let _ = writeln!(t, "sensor = {}", inline_sensor(c));
        }
        let _ = writeln!(t, "yaw = {}", r(self.yaw));
        let _ = writeln!(t, "tx = {}", r(self.tx));
        let _ = writeln!(t, "ty = {}", r(self.ty));
        let _ = writeln!(t, "tz = {}", r(self.tz));
        let _ = writeln!(t, "speed_kmh = {}", r(self.speed_kmh));
        let _ = writeln!(t, "yaw_rate = {}", r(self.yaw_rate));
        let _ = writeln!(t, "n_mix = {}", self.n_mix);
        let order = match self.distortion.order {
            DistortionOrder::ResampleFirst => "resample-first",
            DistortionOrder::TravelFirst => "travel-first",
        };
        let depth = match self.distortion.depth {
            DepthMode::Translate => "translate",
            DepthMode::RangeAdd => "range-add",
        };
        let _ = writeln!(t, "distortion_order = {order}");
        let _ = writeln!(t, "depth_mode = {depth}");
        let _ = writeln!(t, "threads = {}", self.threads);
        t
    }
}

/// `H W f_up f_down max_range spin_hz`, angles in radians.
fn inline_sensor(c: &LidarConfig) -> String {
    format!(
        "{} {} {:?} {:?} {:?} {:?}",
        c.channels(),
        c.width(),
        c.f_up(),
        c.f_down(),
        c.max_range(),
        c.spin_rate_hz()
    )
}

fn parse_inline_sensor(s: &str) -> Result<LidarConfig> {
    let f: Vec<&str> = s.split_whitespace().collect();
    let bad = || Error::invalid(format!("`sensor` expects `H W f_up f_down max_range spin_hz`, got `{s}`"));
    if f.len() != 6 {
        return Err(bad());
    }
    let num = |i: usize| f[i].parse::<f64>().map_err(|_| bad());
    LidarConfig::new(
        f[0].parse().map_err(|_| bad())?,
        f[1].parse().map_err(|_| bad())?,
        num(2)?,
        num(3)?,
        num(4)?,
        num(5)?,
    )
}

/// Seed from `LIDOMAUG_SEED`, if set.
pub fn seed_from_env() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => parse_seed(&v)
            .map(Some)
            .map_err(|_| Error::invalid(format!("{SEED_ENV}=`{v}` is not a 64-bit unsigned integer"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::invalid(format!("{SEED_ENV}: {e}"))),
    }
}

/// Decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(s: &str) -> std::result::Result<u64, std::num::ParseIntError> {
    let s = s.trim();
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
}
