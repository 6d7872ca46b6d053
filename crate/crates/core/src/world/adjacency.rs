use crate::error::{Error, Result};
use crate::pose::Pose;

/// Offsets `k` of the `n` frames whose adjacency centers are nearest to the
/// center of frame `t`, returned in ascending order.
///
/// Distances are Euclidean between `Rᵀ·t` centers; ties prefer smaller
/// `|k|`, then the negative offset.
pub fn select_adjacent(poses: &[Pose], t: usize, n: usize) -> Result<Vec<isize>> {
    if poses.is_empty() {
        return Err(Error::invalid("cannot select adjacent frames of an empty sequence"));
    }
    if t >= poses.len() {
        return Err(Error::invalid(format!(
            "reference frame {t} outside sequence of {} frames",
            poses.len()
        )));
    }
    if n > poses.len() {
        return Err(Error::invalid(format!(
            "asked for {n} adjacent frames from a sequence of {}",
            poses.len()
        )));
    }
    let center = poses[t].adjacency_center();
    let mut ranked: Vec<(f64, isize)> = poses
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let k = i as isize - t as isize;
            ((p.adjacency_center() - center).norm(), k)
        })
        .collect();
    ranked.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.unsigned_abs().cmp(&b.1.unsigned_abs()))
            .then(a.1.cmp(&b.1))
    });
    let mut chosen: Vec<isize> = ranked.into_iter().take(n).map(|(_, k)| k).collect();
    chosen.sort_unstable();
    Ok(chosen)
}
