use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::pose::Pose;

/// Semantic class id (low 16 bits of a SemanticKITTI label).
pub type ClassId = u16;

/// Class id of points without annotation.
pub const UNLABELED: ClassId = 0;

/// Unordered labeled point set stored as parallel columns.
///
/// `source` tags each point with the index of the frame it was captured in.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    intensity: Vec<f32>,
    label: Vec<ClassId>,
    source: Vec<u32>,
}

impl PointCloud {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        PointCloud {
            x: Vec::with_capacity(n),
            y: Vec::with_capacity(n),
            z: Vec::with_capacity(n),
            intensity: Vec::with_capacity(n),
            label: Vec::with_capacity(n),
            source: Vec::with_capacity(n),
        }
    }

    /// Builds a cloud from positions only; intensity 0, unlabeled, source 0.
    pub fn from_points(points: &[Vector3<f64>]) -> Self {
        let mut c = Self::with_capacity(points.len());
        for p in points {
            c.push(*p, 0.0, UNLABELED, 0);
        }
        c
    }

    pub fn from_columns(
        x: Vec<f64>,
        y: Vec<f64>,
        z: Vec<f64>,
        intensity: Vec<f32>,
        label: Vec<ClassId>,
        source: Vec<u32>,
    ) -> Result<Self> {
        let n = x.len();
        if [y.len(), z.len(), intensity.len(), label.len(), source.len()]
            .iter()
            .any(|&m| m != n)
        {
            return Err(Error::invalid("point cloud columns differ in length"));
        }
        Ok(PointCloud {
            x,
            y,
            z,
            intensity,
            label,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn push(&mut self, p: Vector3<f64>, intensity: f32, label: ClassId, source: u32) {
        self.x.push(p.x);
        self.y.push(p.y);
        self.z.push(p.z);
        self.intensity.push(intensity);
        self.label.push(label);
        self.source.push(source);
    }

    /// Appends point `i` of `other`.
    pub fn push_from(&mut self, other: &PointCloud, i: usize) {
        self.x.push(other.x[i]);
        self.y.push(other.y[i]);
        self.z.push(other.z[i]);
        self.intensity.push(other.intensity[i]);
        self.label.push(other.label[i]);
        self.source.push(other.source[i]);
    }

    pub fn extend(&mut self, other: &PointCloud) {
        self.x.extend_from_slice(&other.x);
        self.y.extend_from_slice(&other.y);
        self.z.extend_from_slice(&other.z);
        self.intensity.extend_from_slice(&other.intensity);
        self.label.extend_from_slice(&other.label);
        self.source.extend_from_slice(&other.source);
    }

    #[inline]
    pub fn point(&self, i: usize) -> Vector3<f64> {
        Vector3::new(self.x[i], self.y[i], self.z[i])
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = Vector3<f64>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn xs(&self) -> &[f64] {
        &self.x
    }

    pub fn ys(&self) -> &[f64] {
        &self.y
    }

    pub fn zs(&self) -> &[f64] {
        &self.z
    }

    pub fn intensities(&self) -> &[f32] {
        &self.intensity
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.label
    }

    pub fn labels_mut(&mut self) -> &mut [ClassId] {
        &mut self.label
    }

    pub fn sources(&self) -> &[u32] {
        &self.source
    }

    pub fn set_labels(&mut self, labels: Vec<ClassId>) -> Result<()> {
        if labels.len() != self.len() {
            return Err(Error::invalid(format!(
                "{} labels for {} points",
                labels.len(),
                self.len()
            )));
        }
        self.label = labels;
        Ok(())
    }

    pub fn set_source(&mut self, source: u32) {
        self.source.iter_mut().for_each(|s| *s = source);
    }

    /// Applies `pose` to every position; attributes are unchanged.
    pub fn transformed(&self, pose: &Pose) -> PointCloud {
        let mut out = self.clone();
        out.transform_in_place(pose);
        out
    }

    pub fn transform_in_place(&mut self, pose: &Pose) {
        for i in 0..self.len() {
            let [x, y, z] = pose.apply_xyz(self.x[i], self.y[i], self.z[i]);
            self.x[i] = x;
            self.y[i] = y;
            self.z[i] = z;
        }
    }

    /// Points whose index satisfies `keep`, in order.
    pub fn filter_indexed(&self, mut keep: impl FnMut(usize) -> bool) -> PointCloud {
        let mut out = PointCloud::new();
        for i in 0..self.len() {
            if keep(i) {
                out.push_from(self, i);
            }
        }
        out
    }

    /// Stable reorder by source index; points from one frame keep their
    /// relative order.
    pub(crate) fn sort_by_source(&mut self) {
        if self.source.windows(2).all(|w| w[0] <= w[1]) {
            return;
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| self.source[i]);
        let mut out = PointCloud::with_capacity(self.len());
        for i in order {
            out.push_from(self, i);
        }
        *self = out;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_lengths_are_checked() {
        let err = PointCloud::from_columns(vec![0.0], vec![], vec![0.0], vec![0.0], vec![0], vec![0]);
        assert!(err.is_err());
    }

    #[test]
    fn sort_by_source_is_stable() {
        let mut c = PointCloud::new();
        for (i, s) in [2u32, 0, 2, 1, 0].iter().enumerate() {
            c.push(Vector3::new(i as f64, 0.0, 0.0), 0.0, 0, *s);
        }
        c.sort_by_source();
        assert_eq!(c.sources(), &[0, 0, 1, 2, 2]);
        assert_eq!(c.xs(), &[1.0, 4.0, 3.0, 0.0, 2.0]);
    }
}
