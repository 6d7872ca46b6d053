//! Seeded uniform sampling.
//!
//! Every sampled quantity draws from its own ChaCha8 stream derived from
//! the master seed (`seed_from_u64(seed)` then `set_stream(id)`), so adding
//! a sampler or changing how many values one sampler consumes never shifts
//! the values another one sees.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

/// Source of uniform variates in `[0, 1)`. Tests substitute degenerate
/// sources that always return an endpoint.
pub trait UniformSource {
    fn next_unit(&mut self) -> f64;
}

impl UniformSource for ChaCha8Rng {
    fn next_unit(&mut self) -> f64 {
        self.gen::<f64>()
    }
}

/// Always returns the same value.
#[derive(Debug, Clone, Copy)]
pub struct ConstantSource(pub f64);

impl UniformSource for ConstantSource {
    fn next_unit(&mut self) -> f64 {
        self.0
    }
}

pub const STREAM_CONFIG: u64 = 1;
pub const STREAM_SECTORS: u64 = 2;
const STREAM_POSE: u64 = 0x100;
const STREAM_MOTION: u64 = 0x200;

pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn pose_stream(seed: u64, source: usize) -> ChaCha8Rng {
    stream(seed, STREAM_POSE + source as u64)
}

pub fn motion_stream(seed: u64, source: usize) -> ChaCha8Rng {
    stream(seed, STREAM_MOTION + source as u64)
}

/// `lo + u·(hi − lo)`; a zero-width range yields `lo`.
pub fn uniform(src: &mut impl UniformSource, (lo, hi): (f64, f64)) -> f64 {
    let u = src.next_unit();
    if lo == hi {
        lo
    } else {
        lo + u * (hi - lo)
    }
}

/// Integer uniform on the closed interval `[lo, hi]`.
pub fn uniform_int(src: &mut impl UniformSource, (lo, hi): (u32, u32)) -> u32 {
    let u = src.next_unit();
    let span = (hi - lo) as f64 + 1.0;
    let k = (u * span).floor() as u64;
    lo + k.min((hi - lo) as u64) as u32
}

/// Uniform choice; `items` must be non-empty.
pub fn choose<T: Copy>(src: &mut impl UniformSource, items: &[T]) -> T {
    let i = uniform_int(src, (0, items.len() as u32 - 1));
    items[i as usize]
}
