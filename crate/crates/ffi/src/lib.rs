//! C ABI over the lidomaug engine.
//!
//! Every fallible function returns an [`LdmStatus`]; on failure a message
//! is kept per thread and can be read with [`ldm_last_error`]. Handles are
//! opaque and must be released with their `_free` function. A world handle
//! may be shared by any number of threads; result handles are immutable.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use lidomaug::{augment, AugmentSpec, Error, LidarConfig, Preset, WorldModel};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdmStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    UnknownPreset = 4,
    Parse = 5,
    Format = 6,
    CacheVersion = 7,
    Io = 8,
    Panic = 9,
}

/// A world model loaded from a cache file.
pub struct LdmWorld {
    world: WorldModel,
}

/// Output of one augmentation.
pub struct LdmAugmented {
    points: Vec<f32>,
    labels: Vec<u16>,
    range: Vec<f32>,
    height: u32,
    width: u32,
    seed: u64,
}

/// Cylindrical sensor description; angles in radians.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LdmSensor {
    pub channels: u32,
    pub width: u32,
    pub f_up: f64,
    pub f_down: f64,
    pub max_range: f64,
    pub spin_hz: f64,
}

impl From<LidarConfig> for LdmSensor {
    fn from(c: LidarConfig) -> Self {
        LdmSensor {
            channels: c.channels(),
            width: c.width(),
            f_up: c.f_up(),
            f_down: c.f_down(),
            max_range: c.max_range(),
            spin_hz: c.spin_rate_hz(),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: LdmStatus, msg: impl Into<String>) -> LdmStatus {
    set_error(msg.into());
    status
}

fn status_of(e: &Error) -> LdmStatus {
    match e {
        Error::InvalidInput(_) => LdmStatus::InvalidInput,
        Error::UnknownPreset(_) => LdmStatus::UnknownPreset,
        Error::Parse { .. } => LdmStatus::Parse,
        Error::Format { .. } => LdmStatus::Format,
        Error::CacheVersion { .. } => LdmStatus::CacheVersion,
        Error::Io { .. } => LdmStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), LdmStatus>) -> LdmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LdmStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(LdmStatus::Panic, format!("internal error: {msg}"))
        }
    }
}

fn engine(e: Error) -> LdmStatus {
    fail(status_of(&e), e.to_string())
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, LdmStatus> {
    if p.is_null() {
        return Err(fail(LdmStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(LdmStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ldm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ldm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Number of built-in sensor presets.
#[no_mangle]
pub extern "C" fn ldm_preset_count() -> usize {
    Preset::ALL.len()
}

// same order as Preset::ALL
const PRESET_NAMES: [&str; 5] = ["V64\0", "V32\0", "V16\0", "O64\0", "O128\0"];

/// Static name of preset `index`, or null when out of range.
#[no_mangle]
pub extern "C" fn ldm_preset_name(index: usize) -> *const c_char {
    PRESET_NAMES.get(index).map_or(ptr::null(), |n| n.as_ptr().cast())
}

/// Looks up a preset by name (case-insensitive).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ldm_preset(name: *const c_char, out: *mut LdmSensor) -> LdmStatus {
    guard(|| {
        let name = text(name, "preset name")?;
        if out.is_null() {
            return Err(fail(LdmStatus::NullArgument, "output is null"));
        }
        let cfg = LidarConfig::preset(name).map_err(engine)?;
        *out = cfg.into();
        Ok(())
    })
}

/// Opens a world cache file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ldm_world_open(path: *const c_char, out: *mut *mut LdmWorld) -> LdmStatus {
    guard(|| {
        let path = text(path, "path")?;
        if out.is_null() {
            return Err(fail(LdmStatus::NullArgument, "output is null"));
        }
        *out = ptr::null_mut();
        let world = lidomaug::io::load_world(Path::new(path)).map_err(engine)?;
        *out = Box::into_raw(Box::new(LdmWorld { world }));
        Ok(())
    })
}

/// Point count of a world; 0 for null.
///
/// # Safety
/// `world` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ldm_world_len(world: *const LdmWorld) -> usize {
    world.as_ref().map_or(0, |w| w.world.len())
}

/// # Safety
/// `world` must be null or a handle not yet freed and not in use.
#[no_mangle]
pub unsafe extern "C" fn ldm_world_free(world: *mut LdmWorld) {
    if !world.is_null() {
        drop(Box::from_raw(world));
    }
}

/// Runs one augmentation.
///
/// `spec` is a spec document in the `key = value` grammar, or null for
/// the defaults; `seed` replaces any seed it contains. When fewer than
/// `n_mix` worlds are given they are reused in turn.
///
/// # Safety
/// `worlds` must point to `n_worlds` live handles, `spec` must be null or
/// a NUL-terminated string, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ldm_augment(
    worlds: *const *const LdmWorld,
    n_worlds: usize,
    spec: *const c_char,
    seed: u64,
    out: *mut *mut LdmAugmented,
) -> LdmStatus {
    guard(|| {
        if out.is_null() || worlds.is_null() {
            return Err(fail(LdmStatus::NullArgument, "worlds or output is null"));
        }
        *out = ptr::null_mut();
        if n_worlds == 0 {
            return Err(fail(LdmStatus::InvalidInput, "at least one world is required"));
        }
        let handles = std::slice::from_raw_parts(worlds, n_worlds);
        let mut list = Vec::with_capacity(n_worlds);
        for (i, h) in handles.iter().enumerate() {
            match h.as_ref() {
                Some(w) => list.push(&w.world),
                None => return Err(fail(LdmStatus::NullArgument, format!("world {i} is null"))),
            }
        }
        let mut s = if spec.is_null() {
            AugmentSpec::default()
        } else {
            AugmentSpec::parse(text(spec, "spec")?).map_err(engine)?
        };
        s.seed = seed;
        let refs: Vec<&WorldModel> = (0..s.n_mix.max(1)).map(|i| list[i % list.len()]).collect();
        let o = augment(&refs, &s).map_err(engine)?;
        let c = &o.cloud;
        let mut points = Vec::with_capacity(c.len() * 4);
        for i in 0..c.len() {
            points.extend([c.xs()[i] as f32, c.ys()[i] as f32, c.zs()[i] as f32, c.intensities()[i]]);
        }
        *out = Box::into_raw(Box::new(LdmAugmented {
            points,
            labels: c.labels().to_vec(),
            range: o.map.ranges().to_vec(),
            height: o.config.channels(),
            width: o.config.width(),
            seed,
        }));
        Ok(())
    })
}

/// Number of output points N.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ldm_augmented_len(r: *const LdmAugmented) -> usize {
    r.as_ref().map_or(0, |r| r.labels.len())
}

/// Row-major N×4 array `x, y, z, intensity`, owned by the handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ldm_augmented_points(r: *const LdmAugmented) -> *const f32 {
    r.as_ref().map_or(ptr::null(), |r| r.points.as_ptr())
}

/// N class ids, owned by the handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ldm_augmented_labels(r: *const LdmAugmented) -> *const u16 {
    r.as_ref().map_or(ptr::null(), |r| r.labels.as_ptr())
}

/// Row-major H×W range image in meters, 0 for empty pixels.
///
/// # Safety
/// `r` must be null or a live handle; `height` and `width` may be null.
#[no_mangle]
pub unsafe extern "C" fn ldm_augmented_range(
    r: *const LdmAugmented,
    height: *mut u32,
    width: *mut u32,
) -> *const f32 {
    let Some(r) = r.as_ref() else { return ptr::null() };
    if let Some(h) = height.as_mut() {
        *h = r.height;
    }
    if let Some(w) = width.as_mut() {
        *w = r.width;
    }
    r.range.as_ptr()
}

/// Seed the result was generated with.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ldm_augmented_seed(r: *const LdmAugmented) -> u64 {
    r.as_ref().map_or(0, |r| r.seed)
}

/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ldm_augmented_free(r: *mut LdmAugmented) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
