use crate::cloud::PointCloud;
use crate::error::{Error, Result};

use super::{LabeledFrame, WorldModel};

/// Union of the frames at `t + k` for every offset `k`, each moved into the
/// sensor coordinates of frame `t` by `T_t⁻¹ ∘ T_{t+k}`.
pub fn aggregate_static(frames: &[LabeledFrame], t: usize, offsets: &[isize]) -> Result<WorldModel> {
    WorldModel::from_cloud(aggregate_filtered(frames, t, offsets, |_, _| true)?)
}

/// Like [`aggregate_static`] but keeps only points for which
/// `keep(frame_position, point_index)` holds, and returns the raw cloud
/// ordered by frame position then point index.
pub fn aggregate_filtered(
    frames: &[LabeledFrame],
    t: usize,
    offsets: &[isize],
    mut keep: impl FnMut(usize, usize) -> bool,
) -> Result<PointCloud> {
    let reference = frames.get(t).ok_or_else(|| {
        Error::invalid(format!("reference frame {t} outside sequence of {} frames", frames.len()))
    })?;
    let mut positions = Vec::with_capacity(offsets.len());
    for &k in offsets {
        let pos = t as isize + k;
        if pos < 0 || pos as usize >= frames.len() {
            return Err(Error::invalid(format!(
                "offset {k} from frame {t} has no frame or pose"
            )));
        }
        positions.push(pos as usize);
    }
    positions.sort_unstable();
    positions.dedup();

    let to_reference = reference.pose.inverse();
    let total = positions.iter().map(|&p| frames[p].cloud.len()).sum();
    let mut out = PointCloud::with_capacity(total);
    for pos in positions {
        let frame = &frames[pos];
        let rel = to_reference.compose(&frame.pose);
        let c = &frame.cloud;
        for i in 0..c.len() {
            if !keep(pos, i) {
                continue;
            }
            let [x, y, z] = rel.apply_xyz(c.xs()[i], c.ys()[i], c.zs()[i]);
            out.push(
                nalgebra::Vector3::new(x, y, z),
                c.intensities()[i],
                c.labels()[i],
                c.sources()[i],
            );
        }
    }
    Ok(out)
}
