use nalgebra::{Matrix3, Matrix4, Vector3};

use crate::error::{Error, Result};

/// Tolerance on `RᵀR = I` and `det R = 1` for a valid pose.
pub const ROTATION_TOLERANCE: f64 = 1e-6;

/// Rigid transform `x ↦ R·x + t`.
///
/// For a sequence pose this maps sensor coordinates of that frame to world
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose {
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        let err = orthonormality_error(&rotation);
        if !(err <= ROTATION_TOLERANCE) || !translation.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid(format!(
                "not a rigid transform (rotation deviation {err:.3e})"
            )));
        }
        Ok(Pose {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        Pose {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn from_translation(t: Vector3<f64>) -> Self {
        Pose {
            rotation: Matrix3::identity(),
            translation: t,
        }
    }

    /// Rotation about +z by `yaw` radians followed by translation `t`.
    pub fn from_yaw(yaw: f64, t: Vector3<f64>) -> Self {
        let (s, c) = yaw.sin_cos();
        Pose {
            rotation: Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
            translation: t,
        }
    }

    /// Parses a row-major 3×4 `[R|t]` block, as in KITTI pose files.
    pub fn from_row_major_3x4(v: &[f64; 12]) -> Result<Self> {
        Self::new(
            Matrix3::new(v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10]),
            Vector3::new(v[3], v[7], v[11]),
        )
    }

    pub fn to_row_major_3x4(&self) -> [f64; 12] {
        let r = &self.rotation;
        let t = &self.translation;
        [
            r[(0, 0)],
            r[(0, 1)],
            r[(0, 2)],
            t.x,
            r[(1, 0)],
            r[(1, 1)],
            r[(1, 2)],
            t.y,
            r[(2, 0)],
            r[(2, 1)],
            r[(2, 2)],
            t.z,
        ]
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let [x, y, z] = self.apply_xyz(p.x, p.y, p.z);
        Vector3::new(x, y, z)
    }

    /// Component-wise transform with a fixed evaluation order, shared by
    /// every code path that moves world points so their results agree to
    /// the bit.
    #[inline(always)]
    pub fn apply_xyz(&self, x: f64, y: f64, z: f64) -> [f64; 3] {
        let r = &self.rotation;
        let t = &self.translation;
        [
            r[(0, 0)] * x + r[(0, 1)] * y + r[(0, 2)] * z + t.x,
            r[(1, 0)] * x + r[(1, 1)] * y + r[(1, 2)] * z + t.y,
            r[(2, 0)] * x + r[(2, 1)] * y + r[(2, 2)] * z + t.z,
        ]
    }

    /// Sensor center expression `Rᵀ·t` used for geometric adjacency.
    pub fn adjacency_center(&self) -> Vector3<f64> {
        self.rotation.transpose() * self.translation
    }

    /// Row-major 3×3 rotation followed by the translation, for hot loops.
    #[inline(always)]
    pub(crate) fn coefficients(&self) -> ([f64; 9], [f64; 3]) {
        let r = &self.rotation;
        (
            [
                r[(0, 0)],
                r[(0, 1)],
                r[(0, 2)],
                r[(1, 0)],
                r[(1, 1)],
                r[(1, 2)],
                r[(2, 0)],
                r[(2, 1)],
                r[(2, 2)],
            ],
            [self.translation.x, self.translation.y, self.translation.z],
        )
    }

    pub fn is_identity(&self) -> bool {
        self.rotation == Matrix3::identity() && self.translation == Vector3::zeros()
    }
}

/// Largest of `‖RᵀR − I‖_max` and `|det R − 1|`.
pub fn orthonormality_error(r: &Matrix3<f64>) -> f64 {
    let gram = r.transpose() * r - Matrix3::identity();
    let ortho = gram.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    ortho.max((r.determinant() - 1.0).abs())
}

/// Closest rotation in the Frobenius sense (`U·Vᵀ` of the SVD, with the
/// sign fixed so the determinant is +1).
pub fn nearest_rotation(m: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    if m.determinant() <= 0.0 {
        return Err(Error::invalid("matrix has non-positive determinant"));
    }
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᵀ");
    let mut r = u * v_t;
    if r.determinant() < 0.0 {
        let mut u = u;
        u.column_mut(2).neg_mut();
        r = u * v_t;
    }
    Ok(r)
}
