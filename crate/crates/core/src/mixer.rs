//! Scene- and sensor-level mixing of range maps by azimuth sector.
//!
//! Sector angles are scan angles: column `u` sits at `u·2π/W` measured from
//! the scan start (column 0). A column belongs to the sector containing the
//! angle of its center, `(u + ½)·2π/W`.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::render::RangeMap;
use crate::sampling::UniformSource;

/// Boundary slack for sector lists assembled by callers.
pub const PARTITION_TOLERANCE: f64 = 1e-12;

/// Half-open scan-angle interval `[start, end)` owned by map `source`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    pub start: f64,
    pub end: f64,
    pub source: usize,
}

impl Sector {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, angle: f64) -> bool {
        self.start <= angle && angle < self.end
    }
}

/// Checks that `sectors`, in order, tile `[0, 2π)` without gaps or overlap
/// and reference maps below `n_maps`.
pub fn validate_sectors(sectors: &[Sector], n_maps: usize) -> Result<()> {
    let first = sectors.first().ok_or_else(|| Error::invalid("no sectors given"))?;
    if first.start.abs() > PARTITION_TOLERANCE {
        return Err(Error::invalid(format!("sectors must start at 0, got {}", first.start)));
    }
    let last = sectors.last().expect("non-empty");
    if (last.end - TAU).abs() > PARTITION_TOLERANCE {
        return Err(Error::invalid(format!("sectors must end at 2π, got {}", last.end)));
    }
    for (i, s) in sectors.iter().enumerate() {
        if !(s.start <= s.end) {
            return Err(Error::invalid(format!("sector {i} is reversed: [{}, {})", s.start, s.end)));
        }
        if s.source >= n_maps {
            return Err(Error::invalid(format!(
                "sector {i} references map {} but only {n_maps} given",
                s.source
            )));
        }
    }
    for (i, w) in sectors.windows(2).enumerate() {
        if (w[0].end - w[1].start).abs() > PARTITION_TOLERANCE {
            return Err(Error::invalid(format!(
                "sectors {i} and {} leave a gap or overlap ({} vs {})",
                i + 1,
                w[0].end,
                w[1].start
            )));
        }
    }
    Ok(())
}

/// Index of the map owning each column of a `width`-column map.
pub fn column_owners(sectors: &[Sector], width: usize) -> Vec<usize> {
    let mut owners = Vec::with_capacity(width);
    let mut s = 0;
    for u in 0..width {
        let angle = (u as f64 + 0.5) * TAU / width as f64;
        while s + 1 < sectors.len() && angle >= sectors[s].end {
            s += 1;
        }
        owners.push(sectors[s].source);
    }
    owners
}

/// Copies every column whole from the map owning its sector.
pub fn mix(maps: &[&RangeMap], sectors: &[Sector]) -> Result<RangeMap> {
    let first = maps.first().ok_or_else(|| Error::invalid("mix needs at least one map"))?;
    if let Some(i) = maps.iter().position(|m| m.config() != first.config()) {
        return Err(Error::invalid(format!(
            "map {i} has config {} but map 0 has {}",
            maps[i].config(),
            first.config()
        )));
    }
    validate_sectors(sectors, maps.len())?;
    let w = first.width();
    let owners = column_owners(sectors, w);
    let mut out = (*first).clone();
    for (i, owner) in (0..out.valid.len()).map(|i| (i, owners[i % w])) {
        if owner == 0 {
            continue;
        }
        let m = maps[owner];
        out.range[i] = m.range[i];
        out.label[i] = m.label[i];
        out.intensity[i] = m.intensity[i];
        out.source[i] = m.source[i];
        out.valid[i] = m.valid[i];
    }
    Ok(out)
}

/// `n − 1` uniform cuts in `[0, 2π)`, sorted; arc `i` goes to map `i`.
pub fn sample_sectors(src: &mut impl UniformSource, n: usize) -> Result<Vec<Sector>> {
    if n == 0 {
        return Err(Error::invalid("cannot partition among zero sources"));
    }
    let mut cuts: Vec<f64> = (1..n).map(|_| src.next_unit() * TAU).collect();
    cuts.sort_by(f64::total_cmp);
    let mut bounds = Vec::with_capacity(n + 1);
    bounds.push(0.0);
    bounds.extend(cuts);
    bounds.push(TAU);
    Ok(bounds
        .windows(2)
        .enumerate()
        .map(|(source, b)| Sector {
            start: b[0],
            end: b[1],
            source,
        })
        .collect())
}
