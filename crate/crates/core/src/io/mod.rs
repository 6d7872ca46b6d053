//! On-disk formats. Byte layouts are documented in `docs/formats.md`.

mod cache;
mod labels;
mod ply;
mod poses;
mod range_png;
mod scan;
mod sequence;
mod tracks;

pub use cache::{load_world, read_world, save_world, write_world, CACHE_MAGIC, CACHE_VERSION};
pub use labels::{class_of, read_labels, read_labels_checked, write_labels};
pub use ply::{read_ply, write_ply};
pub use poses::{parse_poses, read_poses, write_poses, PoseReport, REPROJECT_THRESHOLD, WARN_THRESHOLD};
pub use range_png::{range_to_mm, read_range_png, write_range_png};
pub use scan::{read_scan, write_scan};
pub use sequence::{load_sequence, write_sequence, Sequence};
pub use tracks::{parse_tracks, read_tracks, write_tracks};

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

/// Writes through a buffered file; the closure's I/O errors carry `path`.
pub(crate) fn write_with(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}
