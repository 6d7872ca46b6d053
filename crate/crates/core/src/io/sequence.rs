//! KITTI-style sequence directory:
//!
//! ```text
//! <dir>/poses.txt          one pose per scan
//! <dir>/velodyne/*.bin     scans, ordered by file name
//! <dir>/labels/*.label     optional; same stems as the scans
//! <dir>/tracks.txt         optional box tracks
//! ```

use std::path::{Path, PathBuf};

use crate::cloud::UNLABELED;
use crate::error::{Error, Result};
use crate::world::{BoxTrack, LabeledFrame};

use super::{class_of, read_labels_checked, read_poses, read_scan, read_tracks};

#[derive(Debug, Clone)]
pub struct Sequence {
    pub frames: Vec<LabeledFrame>,
    pub labeled: bool,
    pub tracks: Vec<BoxTrack>,
}

/// Loads every frame; the frame's time index is its position in file-name
/// order.
pub fn load_sequence(dir: &Path) -> Result<Sequence> {
    let poses_path = dir.join("poses.txt");
    let scan_dir = dir.join("velodyne");
    let label_dir = dir.join("labels");
    let mut missing = Vec::new();
    if !poses_path.is_file() {
        missing.push(poses_path.clone());
    }
    if !scan_dir.is_dir() {
        missing.push(scan_dir.clone());
    }
    if !missing.is_empty() {
        return Err(missing_error(dir, &missing));
    }
    let mut scans: Vec<PathBuf> = std::fs::read_dir(&scan_dir)
        .map_err(|e| Error::io(&scan_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "bin"))
        .collect();
    scans.sort();
    if scans.is_empty() {
        return Err(Error::format(&scan_dir, "no .bin scans found"));
    }
    let labeled = label_dir.is_dir();
    let label_paths: Vec<PathBuf> = scans
        .iter()
        .map(|s| label_dir.join(s.file_stem().expect("file name")).with_extension("label"))
        .collect();
    if labeled {
        missing.extend(label_paths.iter().filter(|p| !p.is_file()).cloned());
        if !missing.is_empty() {
            return Err(missing_error(dir, &missing));
        }
    } else {
        log::warn!("{}: no labels/ directory; frames are unlabeled", dir.display());
    }
    let poses = read_poses(&poses_path)?;
    if poses.len() != scans.len() {
        return Err(Error::format(
            &poses_path,
            format!("{} poses for {} scans", poses.len(), scans.len()),
        ));
    }
    let mut frames = Vec::with_capacity(scans.len());
    for (i, (scan, pose)) in scans.iter().zip(poses).enumerate() {
        let mut cloud = read_scan(scan)?;
        if labeled {
            let words = read_labels_checked(&label_paths[i], cloud.len())?;
            cloud.set_labels(words.into_iter().map(class_of).collect())?;
        } else {
            cloud.labels_mut().fill(UNLABELED);
        }
        frames.push(LabeledFrame::new(cloud, pose, i as u32));
    }
    let tracks_path = dir.join("tracks.txt");
    let tracks = if tracks_path.is_file() {
        read_tracks(&tracks_path)?
    } else {
        Vec::new()
    };
    Ok(Sequence {
        frames,
        labeled,
        tracks,
    })
}

fn missing_error(dir: &Path, missing: &[PathBuf]) -> Error {
    let list: Vec<String> = missing.iter().map(|p| format!("  missing: {}", p.display())).collect();
    Error::format(dir, format!("incomplete sequence directory\n{}", list.join("\n")))
}

/// Writes `frames` in the layout read by [`load_sequence`].
pub fn write_sequence(frames: &[LabeledFrame], dir: &Path) -> Result<()> {
    let scan_dir = dir.join("velodyne");
    let label_dir = dir.join("labels");
    for d in [&scan_dir, &label_dir] {
        std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
    }
    for f in frames {
        let stem = format!("{:06}", f.time_index);
        super::write_scan(&f.cloud, &scan_dir.join(format!("{stem}.bin")))?;
        let words: Vec<u32> = f.cloud.labels().iter().map(|&l| l as u32).collect();
        super::write_labels(&words, &label_dir.join(format!("{stem}.label")))?;
    }
    let poses: Vec<_> = frames.iter().map(|f| f.pose).collect();
    super::write_poses(&poses, &dir.join("poses.txt"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pose::Pose;
    use crate::cloud::PointCloud;
    use nalgebra::Vector3;

    fn frames() -> Vec<LabeledFrame> {
        (0..3)
            .map(|i| {
                let mut c = PointCloud::new();
                c.push(Vector3::new(1.0, i as f64, 0.5), 0.25, 40, 0);
                c.push(Vector3::new(-3.0, 2.0, 0.0), 0.5, 10, 0);
                LabeledFrame::new(c, Pose::from_translation(Vector3::new(i as f64, 0.0, 0.0)), i)
            })
            .collect()
    }

    #[test]
    fn write_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let f = frames();
        write_sequence(&f, dir.path()).unwrap();
        let s = load_sequence(dir.path()).unwrap();
        assert!(s.labeled);
        assert_eq!(s.frames, f);
    }

    #[test]
    fn missing_label_file_is_named() {
        let dir = tempfile::tempdir().unwrap();
        write_sequence(&frames(), dir.path()).unwrap();
        std::fs::remove_file(dir.path().join("labels/000001.label")).unwrap();
        let e = load_sequence(dir.path()).unwrap_err().to_string();
        assert!(e.contains("000001.label"), "{e}");
    }

    #[test]
    fn pose_count_must_match() {
        let dir = tempfile::tempdir().unwrap();
        write_sequence(&frames(), dir.path()).unwrap();
        std::fs::write(dir.path().join("poses.txt"), "1 0 0 0 0 1 0 0 0 0 1 0\n").unwrap();
        assert!(load_sequence(dir.path()).is_err());
    }
}
