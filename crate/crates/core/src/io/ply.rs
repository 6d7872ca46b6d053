use std::io::Write;
use std::path::Path;

use nalgebra::Vector3;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

use super::{read_bytes, write_with};

const PROPERTIES: [&str; 5] = [
    "property float x",
    "property float y",
    "property float z",
    "property float intensity",
    "property ushort label",
];

const RECORD: usize = 18;

/// Binary little-endian PLY with `x y z intensity` as float and `label` as
/// ushort.
pub fn write_ply(cloud: &PointCloud, path: &Path) -> Result<()> {
    write_with(path, |w| {
        write!(w, "ply\nformat binary_little_endian 1.0\nelement vertex {}\n", cloud.len())?;
        for p in PROPERTIES {
            writeln!(w, "{p}")?;
        }
        writeln!(w, "end_header")?;
        for i in 0..cloud.len() {
            for v in [cloud.xs()[i] as f32, cloud.ys()[i] as f32, cloud.zs()[i] as f32, cloud.intensities()[i]] {
                w.write_all(&v.to_le_bytes())?;
            }
            w.write_all(&cloud.labels()[i].to_le_bytes())?;
        }
        Ok(())
    })
}

/// Reads files written by [`write_ply`] (comment lines allowed).
pub fn read_ply(path: &Path) -> Result<PointCloud> {
    let bytes = read_bytes(path)?;
    let bad = |msg: &str| Error::format(path, msg);
    let marker = b"end_header\n";
    let end = bytes
        .windows(marker.len())
        .position(|w| w == marker)
        .ok_or_else(|| bad("missing end_header"))?;
    let header = std::str::from_utf8(&bytes[..end]).map_err(|_| bad("header is not UTF-8"))?;
    let lines: Vec<&str> = header
        .lines()
        .map(str::trim)
        .filter(|l| !l.starts_with("comment") && !l.is_empty())
        .collect();
    if lines.first() != Some(&"ply") || lines.get(1) != Some(&"format binary_little_endian 1.0") {
        return Err(bad("not a binary little-endian PLY file"));
    }
    let count: usize = lines
        .get(2)
        .and_then(|l| l.strip_prefix("element vertex "))
        .and_then(|n| n.trim().parse().ok())
        .ok_or_else(|| bad("missing `element vertex N`"))?;
    if lines[3..] != PROPERTIES {
        return Err(bad("unsupported vertex properties"));
    }
    let body = &bytes[end + marker.len()..];
    if body.len() != count * RECORD {
        return Err(bad(&format!(
            "{} body bytes for {count} vertices of {RECORD} bytes",
            body.len()
        )));
    }
    let mut c = PointCloud::with_capacity(count);
    for rec in body.chunks_exact(RECORD) {
        let f = |i: usize| f32::from_le_bytes(rec[4 * i..4 * i + 4].try_into().expect("4 bytes"));
        let label = u16::from_le_bytes([rec[16], rec[17]]);
        c.push(Vector3::new(f(0) as f64, f(1) as f64, f(2) as f64), f(3), label, 0);
    }
    Ok(c)
}
