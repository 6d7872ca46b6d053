use std::path::Path;

use sha2::{Digest, Sha256};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::world::{VoxelIndex, VoxelKey, WorldModel};

use super::read_bytes;

pub const CACHE_MAGIC: &[u8; 8] = b"LDMWORLD";
pub const CACHE_VERSION: u8 = 1;

const HEADER: usize = 8 + 1 + 32 + 8 + 8;

/// Writes `world` with a 32-byte digest of the parameters it was built
/// with. See `docs/formats.md` for the layout.
pub fn write_world(world: &WorldModel, params_hash: &[u8; 32], path: &Path) -> Result<()> {
    let c = world.cloud();
    let v = world.voxels();
    let n = c.len();
    let mut b = Vec::with_capacity(HEADER + n * 42 + v.len() * 18 + 36);
    b.extend_from_slice(CACHE_MAGIC);
    b.push(CACHE_VERSION);
    b.extend_from_slice(params_hash);
    b.extend_from_slice(&(n as u64).to_le_bytes());
    b.extend_from_slice(&(v.len() as u64).to_le_bytes());
    for col in [c.xs(), c.ys(), c.zs()] {
        col.iter().for_each(|x| b.extend_from_slice(&x.to_le_bytes()));
    }
    c.intensities().iter().for_each(|x| b.extend_from_slice(&x.to_le_bytes()));
    c.labels().iter().for_each(|x| b.extend_from_slice(&x.to_le_bytes()));
    c.sources().iter().for_each(|x| b.extend_from_slice(&x.to_le_bytes()));
    for k in v.keys() {
        for x in [k.0, k.1, k.2] {
            b.extend_from_slice(&x.to_le_bytes());
        }
    }
    v.representatives().iter().for_each(|x| b.extend_from_slice(&x.to_le_bytes()));
    v.offsets().iter().for_each(|x| b.extend_from_slice(&x.to_le_bytes()));
    v.member_array().iter().for_each(|x| b.extend_from_slice(&x.to_le_bytes()));
    let digest = Sha256::digest(&b);
    b.extend_from_slice(&digest);
    std::fs::write(path, b).map_err(|e| Error::io(path, e))
}

pub fn save_world(world: &WorldModel, path: &Path) -> Result<()> {
    write_world(world, &[0; 32], path)
}

/// Reads a cache; returns the world and its parameter digest.
pub fn read_world(path: &Path) -> Result<(WorldModel, [u8; 32])> {
    let bytes = read_bytes(path)?;
    let bad = |msg: String| Error::format(path, msg);
    if bytes.len() < 8 || &bytes[..8] != CACHE_MAGIC {
        return Err(bad("not a world cache (bad magic bytes)".into()));
    }
    if bytes.len() < 9 {
        return Err(bad("truncated header".into()));
    }
    if bytes[8] != CACHE_VERSION {
        return Err(Error::CacheVersion {
            path: path.to_path_buf(),
            found: bytes[8],
            expected: CACHE_VERSION,
        });
    }
    if bytes.len() < HEADER + 32 {
        return Err(bad("truncated header".into()));
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != digest {
        return Err(bad("checksum mismatch (file is corrupt or truncated)".into()));
    }
    let mut params = [0u8; 32];
    params.copy_from_slice(&body[9..41]);
    let n = u64::from_le_bytes(body[41..49].try_into().expect("8 bytes")) as usize;
    let nv = u64::from_le_bytes(body[49..57].try_into().expect("8 bytes")) as usize;
    let expected = n
        .checked_mul(8 * 3 + 4 + 2 + 4 + 4)
        .and_then(|p| nv.checked_mul(12 + 2 + 4).and_then(|q| p.checked_add(q)))
        .and_then(|s| s.checked_add(HEADER + 4));
    if expected != Some(body.len()) {
        return Err(bad(format!("size does not match {n} points and {nv} voxels")));
    }
    let mut r = Reader { b: &body[HEADER..] };
    let x = r.take(n, |b| f64::from_le_bytes(b.try_into().unwrap()));
    let y = r.take(n, |b| f64::from_le_bytes(b.try_into().unwrap()));
    let z = r.take(n, |b| f64::from_le_bytes(b.try_into().unwrap()));
    let intensity = r.take(n, |b| f32::from_le_bytes(b.try_into().unwrap()));
    let label = r.take(n, |b| u16::from_le_bytes(b.try_into().unwrap()));
    let source = r.take(n, |b| u32::from_le_bytes(b.try_into().unwrap()));
    let coords = r.take(nv * 3, |b| i32::from_le_bytes(b.try_into().unwrap()));
    let keys = coords.chunks_exact(3).map(|k| VoxelKey(k[0], k[1], k[2])).collect();
    let reps = r.take(nv, |b| u16::from_le_bytes(b.try_into().unwrap()));
    let offsets = r.take(nv + 1, |b| u32::from_le_bytes(b.try_into().unwrap()));
    let members = r.take(n, |b| u32::from_le_bytes(b.try_into().unwrap()));

    let cloud = PointCloud::from_columns(x, y, z, intensity, label, source)?;
    if cloud.sources().windows(2).any(|w| w[0] > w[1]) {
        return Err(bad("points are not ordered by source".into()));
    }
    let voxels = VoxelIndex::from_parts(keys, reps, offsets, members, n).map_err(|e| bad(e.to_string()))?;
    Ok((WorldModel::from_parts_unchecked(cloud, voxels), params))
}

pub fn load_world(path: &Path) -> Result<WorldModel> {
    read_world(path).map(|(w, _)| w)
}

struct Reader<'a> {
    b: &'a [u8],
}

impl Reader<'_> {
    /// Consumes `count` little-endian values of `size_of::<T>()` bytes.
    fn take<T>(&mut self, count: usize, f: impl Fn(&[u8]) -> T) -> Vec<T> {
        let len = count * std::mem::size_of::<T>();
        let (head, rest) = self.b.split_at(len);
        self.b = rest;
        head.chunks_exact(std::mem::size_of::<T>()).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn world() -> WorldModel {
        synth::scene(&synth::SceneParams { target_points: 3000, seed: 4 })
    }

    #[test]
    fn round_trip_preserves_hash_and_index() {
        let w = world();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.ldm");
        write_world(&w, &[7; 32], &p).unwrap();
        let (back, params) = read_world(&p).unwrap();
        assert_eq!(params, [7; 32]);
        assert_eq!(back.content_hash(), w.content_hash());
        assert_eq!(back, w);
    }

    #[test]
    fn corrupt_files_are_typed_errors() {
        let w = world();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.ldm");
        save_world(&w, &p).unwrap();
        let good = std::fs::read(&p).unwrap();

        let mut b = good.clone();
        b[0] = b'X';
        std::fs::write(&p, &b).unwrap();
        assert!(matches!(load_world(&p), Err(Error::Format { .. })));

        let mut b = good.clone();
        b[8] = 9;
        std::fs::write(&p, &b).unwrap();
        assert!(matches!(load_world(&p), Err(Error::CacheVersion { found: 9, .. })));

        let mut b = good.clone();
        b[100] ^= 1;
        std::fs::write(&p, &b).unwrap();
        assert!(matches!(load_world(&p), Err(Error::Format { .. })));

        std::fs::write(&p, &good[..good.len() / 2]).unwrap();
        assert!(load_world(&p).is_err());
    }
}
