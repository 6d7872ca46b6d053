use std::io::Write;
use std::path::Path;

use nalgebra::Vector3;

use crate::cloud::{PointCloud, UNLABELED};
use crate::error::{Error, Result};

use super::{read_bytes, write_with};

/// KITTI velodyne scan: little-endian f32 `(x, y, z, intensity)` records.
/// Points are unlabeled with source 0.
pub fn read_scan(path: &Path) -> Result<PointCloud> {
    let bytes = read_bytes(path)?;
    if bytes.len() % 16 != 0 {
        return Err(Error::format(
            path,
            format!("size {} is not a multiple of 16 bytes (x, y, z, intensity as f32)", bytes.len()),
        ));
    }
    let mut c = PointCloud::with_capacity(bytes.len() / 16);
    for rec in bytes.chunks_exact(16) {
        let f = |i: usize| f32::from_le_bytes(rec[4 * i..4 * i + 4].try_into().expect("4 bytes"));
        c.push(Vector3::new(f(0) as f64, f(1) as f64, f(2) as f64), f(3), UNLABELED, 0);
    }
    Ok(c)
}

/// Positions are narrowed to f32.
pub fn write_scan(cloud: &PointCloud, path: &Path) -> Result<()> {
    write_with(path, |w| {
        for i in 0..cloud.len() {
            for v in [cloud.xs()[i] as f32, cloud.ys()[i] as f32, cloud.zs()[i] as f32, cloud.intensities()[i]] {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_size_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.bin");
        let mut c = PointCloud::new();
        c.push(Vector3::new(1.5, -2.25, 0.125), 0.75, 0, 0);
        c.push(Vector3::new(f32::MAX as f64, 1e-30, -0.0), 0.0, 0, 0);
        write_scan(&c, &p).unwrap();
        assert_eq!(std::fs::metadata(&p).unwrap().len(), 32);
        let back = read_scan(&p).unwrap();
        assert_eq!(back.len(), 2);
        let again = dir.path().join("b.bin");
        write_scan(&back, &again).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&again).unwrap());
    }

    #[test]
    fn empty_and_misaligned_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.bin");
        std::fs::write(&p, b"").unwrap();
        assert!(read_scan(&p).unwrap().is_empty());
        std::fs::write(&p, [0u8; 20]).unwrap();
        assert!(matches!(read_scan(&p), Err(Error::Format { .. })));
        assert!(matches!(read_scan(&dir.path().join("missing.bin")), Err(Error::Io { .. })));
    }
}
