use std::io::Write;
use std::path::Path;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::pose::{nearest_rotation, orthonormality_error, Pose};

use super::write_with;

/// Rotations deviating from orthonormal by more than this are replaced by
/// the nearest rotation.
pub const REPROJECT_THRESHOLD: f64 = 1e-9;

/// Re-projections above this deviation are logged as warnings.
pub const WARN_THRESHOLD: f64 = 1e-4;

/// Deviations above this are rejected as corrupt.
const REJECT_THRESHOLD: f64 = 0.1;

/// A pose line whose rotation was re-orthonormalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseReport {
    pub line: usize,
    pub deviation: f64,
}

/// KITTI odometry pose file: one row-major 3×4 `[R|t]` per line.
pub fn read_poses(path: &Path) -> Result<Vec<Pose>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (poses, reports) = parse_poses(&text, path)?;
    for r in &reports {
        if r.deviation > WARN_THRESHOLD {
            log::warn!(
                "{}:{}: rotation deviates from orthonormal by {:.3e}; projected to the nearest rotation",
                path.display(),
                r.line,
                r.deviation
            );
        }
    }
    if !reports.is_empty() {
        log::info!("{}: re-orthonormalized {} pose(s)", path.display(), reports.len());
    }
    Ok(poses)
}

/// Parses pose lines; trailing blank lines are ignored.
pub fn parse_poses(text: &str, path: &Path) -> Result<(Vec<Pose>, Vec<PoseReport>)> {
    let mut poses = Vec::new();
    let mut reports = Vec::new();
    for (idx, line) in text.trim_end().lines().enumerate() {
        let line_no = idx + 1;
        let err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: line_no,
            msg,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 12 {
            return Err(err(format!("expected 12 values, found {}", fields.len())));
        }
        let mut v = [0.0f64; 12];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| err(format!("`{f}` is not a finite number")))?;
        }
        let r = Matrix3::new(v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10]);
        let t = Vector3::new(v[3], v[7], v[11]);
        let dev = orthonormality_error(&r);
        if r.determinant() <= 0.0 || dev > REJECT_THRESHOLD {
            return Err(err(format!("not a rotation (deviation {dev:.3e})")));
        }
        let r = if dev > REPROJECT_THRESHOLD {
            reports.push(PoseReport {
                line: line_no,
                deviation: dev,
            });
            nearest_rotation(&r).map_err(|e| err(e.to_string()))?
        } else {
            r
        };
        poses.push(Pose::new(r, t).map_err(|e| err(e.to_string()))?);
    }
    Ok((poses, reports))
}

/// Shortest round-tripping decimal per value.
pub fn write_poses(poses: &[Pose], path: &Path) -> Result<()> {
    write_with(path, |w| {
        for p in poses {
            let vals: Vec<String> = p.to_row_major_3x4().iter().map(|v| format!("{v:?}")).collect();
            writeln!(w, "{}", vals.join(" "))?;
        }
        Ok(())
    })
}
