use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use crate::error::{Error, Result};
use crate::render::RangeMap;

/// Millimeters as stored in the PNG: `round(r·1000)` clipped to
/// `[1, 65535]`, so ranges beyond 65.535 m saturate and a valid range never
/// reads back as the invalid value 0.
pub fn range_to_mm(range: f32) -> u16 {
    let mm = (range as f64 * 1000.0).round();
    mm.clamp(1.0, 65535.0) as u16
}

/// 16-bit grayscale, one pixel per map cell, 0 for invalid pixels.
pub fn write_range_png(map: &RangeMap, path: &Path) -> Result<()> {
    let mut data = Vec::with_capacity(map.ranges().len() * 2);
    for (i, &r) in map.ranges().iter().enumerate() {
        let v = if map.valid_mask()[i] { range_to_mm(r) } else { 0 };
        data.extend_from_slice(&v.to_be_bytes());
    }
    super::write_with(path, |w| {
        let mut enc = png::Encoder::new(w, map.width() as u32, map.height() as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Sixteen);
        let mut writer = enc.write_header().map_err(std::io::Error::other)?;
        writer.write_image_data(&data).map_err(std::io::Error::other)?;
        writer.finish().map_err(std::io::Error::other)
    })
}

/// Returns `(width, height, millimeters)` row-major.
pub fn read_range_png(path: &Path) -> Result<(u32, u32, Vec<u16>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let decoder = png::Decoder::new(BufReader::new(file));
    let mut reader = decoder.read_info().map_err(|e| Error::format(path, e.to_string()))?;
    let info = reader.info();
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Sixteen {
        return Err(Error::format(path, "expected a 16-bit grayscale range image"));
    }
    let (w, h) = (info.width, info.height);
    let mut buf = vec![0u8; w as usize * h as usize * 2];
    reader.next_frame(&mut buf).map_err(|e| Error::format(path, e.to_string()))?;
    let mm = buf.chunks_exact(2).map(|b| u16::from_be_bytes([b[0], b[1]])).collect();
    Ok((w, h, mm))
}
