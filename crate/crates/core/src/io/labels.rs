use std::io::Write;
use std::path::Path;

use crate::cloud::ClassId;
use crate::error::{Error, Result};

use super::{read_bytes, write_with};

/// Semantic class of a SemanticKITTI label word (low 16 bits; the high 16
/// bits are the instance id).
pub fn class_of(word: u32) -> ClassId {
    (word & 0xffff) as ClassId
}

/// Raw little-endian u32 label words.
pub fn read_labels(path: &Path) -> Result<Vec<u32>> {
    let bytes = read_bytes(path)?;
    if bytes.len() % 4 != 0 {
        return Err(Error::format(
            path,
            format!("size {} is not a multiple of 4 bytes", bytes.len()),
        ));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|b| u32::from_le_bytes(b.try_into().expect("4 bytes")))
        .collect())
}

/// Reads labels that must match a scan of `points` points.
pub fn read_labels_checked(path: &Path, points: usize) -> Result<Vec<u32>> {
    let words = read_labels(path)?;
    if words.len() != points {
        return Err(Error::format(
            path,
            format!("{} labels for a scan of {points} points", words.len()),
        ));
    }
    Ok(words)
}

pub fn write_labels(words: &[u32], path: &Path) -> Result<()> {
    write_with(path, |w| {
        for v in words {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_bits_are_the_class() {
        assert_eq!(class_of(0x0001_000A), 10);
        assert_eq!(class_of(0), 0);
    }

    #[test]
    fn round_trip_keeps_instance_bits() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l.label");
        let words = vec![0x0001_000A, 0, 0xffff_0028];
        write_labels(&words, &p).unwrap();
        assert_eq!(read_labels(&p).unwrap(), words);
        assert!(read_labels_checked(&p, 3).is_ok());
        assert!(matches!(read_labels_checked(&p, 4), Err(Error::Format { .. })));
        std::fs::write(&p, [1u8, 2, 3]).unwrap();
        assert!(read_labels(&p).is_err());
    }
}
