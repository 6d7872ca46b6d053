//! Box-track text format, one observation per line:
//!
//! ```text
//! # object_id frame cx cy cz l w h yaw r00 r01 r02 t0 r10 r11 r12 t1 r20 r21 r22 t2
//! 3 17 12.1 -3.4 -0.9 4.2 1.8 1.5 0.05 1 0 0 0.8 0 1 0 0 0 0 1 0
//! ```
//!
//! Boxes, yaw and the 3×4 motion since the object's previous observation
//! are in world coordinates. Lines of one object must have increasing
//! frame numbers.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::pose::Pose;
use crate::world::{BoxTrack, OrientedBox, TrackObservation};

use super::write_with;

pub fn read_tracks(path: &Path) -> Result<Vec<BoxTrack>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tracks(&text, path)
}

/// Tracks ordered by object id.
pub fn parse_tracks(text: &str, path: &Path) -> Result<Vec<BoxTrack>> {
    let mut by_id: BTreeMap<u32, Vec<TrackObservation>> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: line_no,
            msg,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 21 {
            return Err(err(format!("expected 21 values, found {}", f.len())));
        }
        let id: u32 = f[0].parse().map_err(|_| err(format!("bad object id `{}`", f[0])))?;
        let frame: u32 = f[1].parse().map_err(|_| err(format!("bad frame `{}`", f[1])))?;
        let mut v = [0.0f64; 19];
        for (slot, s) in v.iter_mut().zip(&f[2..]) {
            *slot = s
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| err(format!("`{s}` is not a finite number")))?;
        }
        let bbox = OrientedBox::new(Vector3::new(v[0], v[1], v[2]), Vector3::new(v[3], v[4], v[5]), v[6])
            .map_err(|e| err(e.to_string()))?;
        let motion = Pose::from_row_major_3x4(v[7..19].try_into().expect("12 values"))
            .map_err(|e| err(e.to_string()))?;
        let obs = by_id.entry(id).or_default();
        if obs.last().is_some_and(|o| o.time_index >= frame) {
            return Err(err(format!("object {id}: frame {frame} is not after the previous one")));
        }
        obs.push(TrackObservation {
            time_index: frame,
            bbox,
            motion,
        });
    }
    by_id
        .into_iter()
        .map(|(id, obs)| BoxTrack::new(id, obs))
        .collect()
}

pub fn write_tracks(tracks: &[BoxTrack], path: &Path) -> Result<()> {
    write_with(path, |w| {
        writeln!(w, "# object_id frame cx cy cz l w h yaw motion[12]")?;
        for t in tracks {
            for o in t.observations() {
                let b = &o.bbox;
                let size = b.half_extents * 2.0;
                let mut vals = vec![
                    b.center.x, b.center.y, b.center.z, size.x, size.y, size.z, b.yaw,
                ];
                vals.extend(o.motion.to_row_major_3x4());
                let vals: Vec<String> = vals.iter().map(|v| format!("{v:?}")).collect();
                writeln!(w, "{} {} {}", t.object_id(), o.time_index, vals.join(" "))?;
            }
        }
        Ok(())
    })
}
