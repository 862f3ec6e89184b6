//! Affine 4×4 transforms and the camera-to-proxy alignment kernel.
//!
//! Matrices are stored row-major and act on column vectors, so the
//! translation lives in the last column (`m[3]`, `m[7]`, `m[11]`). All
//! world matrices are camera-to-world (or object-to-world) transforms.

use std::fmt;
use std::ops::Mul;

use thiserror::Error;

/// Smallest accepted magnitude of the upper-left 3×3 determinant.
pub const SINGULAR_EPSILON: f64 = 1e-12;

/// Maximum relative spread of column norms still considered uniform scale.
pub const UNIFORM_SCALE_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("singular matrix (|det| = {det:e})")]
pub struct SingularMatrix {
    pub det: f64,
}

/// A 4×4 affine transform, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat4 {
    m: [f64; 16],
}

impl Mat4 {
    pub const IDENTITY: Mat4 = Mat4 {
        m: [
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    };

    /// Wraps 16 row-major values without validation.
    pub const fn from_row_major(m: [f64; 16]) -> Self {
        Mat4 { m }
    }

    pub fn translation(x: f64, y: f64, z: f64) -> Self {
        let mut m = Self::IDENTITY;
        m.m[3] = x;
        m.m[7] = y;
        m.m[11] = z;
        m
    }

    pub fn scale(x: f64, y: f64, z: f64) -> Self {
        let mut m = Self::IDENTITY;
        m.m[0] = x;
        m.m[5] = y;
        m.m[10] = z;
        m
    }

    /// Rotation by `angle` radians about `axis` (need not be normalized).
    pub fn rotation(axis: [f64; 3], angle: f64) -> Self {
        let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let [x, y, z] = [axis[0] / len, axis[1] / len, axis[2] / len];
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        Mat4 {
            m: [
                t * x * x + c,
                t * x * y - s * z,
                t * x * z + s * y,
                0.0,
                t * x * y + s * z,
                t * y * y + c,
                t * y * z - s * x,
                0.0,
                t * x * z - s * y,
                t * y * z + s * x,
                t * z * z + c,
                0.0,
                0.0,
                0.0,
                0.0,
                1.0,
            ],
        }
    }

    pub fn as_row_major(&self) -> &[f64; 16] {
        &self.m
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.m[row * 4 + col]
    }

    pub fn translation_part(&self) -> [f64; 3] {
        [self.m[3], self.m[7], self.m[11]]
    }

    pub fn with_translation(mut self, t: [f64; 3]) -> Self {
        self.m[3] = t[0];
        self.m[7] = t[1];
        self.m[11] = t[2];
        self
    }

    /// True when the bottom row is exactly `[0, 0, 0, 1]`.
    pub fn is_affine(&self) -> bool {
        self.m[12] == 0.0 && self.m[13] == 0.0 && self.m[14] == 0.0 && self.m[15] == 1.0
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|v| v.is_finite())
    }

    /// Determinant of the upper-left 3×3 block.
    pub fn linear_determinant(&self) -> f64 {
        let m = &self.m;
        m[0] * (m[5] * m[10] - m[6] * m[9]) - m[1] * (m[4] * m[10] - m[6] * m[8])
            + m[2] * (m[4] * m[9] - m[5] * m[8])
    }

    pub fn multiply(&self, rhs: &Mat4) -> Mat4 {
        let (a, b) = (&self.m, &rhs.m);
        let mut out = [0.0; 16];
        for row in 0..4 {
            for col in 0..4 {
                out[row * 4 + col] = a[row * 4] * b[col]
                    + a[row * 4 + 1] * b[4 + col]
                    + a[row * 4 + 2] * b[8 + col]
                    + a[row * 4 + 3] * b[12 + col];
            }
        }
        Mat4 { m: out }
    }

    /// Inverse of an affine matrix: adjugate inverse of the linear block,
    /// then `t' = -L⁻¹ t`. The bottom row of the result is exactly `[0,0,0,1]`.
    pub fn invert(&self) -> Result<Mat4, SingularMatrix> {
        let det = self.linear_determinant();
        if !(det.abs() > SINGULAR_EPSILON) {
            return Err(SingularMatrix { det });
        }
        let m = &self.m;
        let inv_det = 1.0 / det;
        let l = [
            (m[5] * m[10] - m[6] * m[9]) * inv_det,
            (m[2] * m[9] - m[1] * m[10]) * inv_det,
            (m[1] * m[6] - m[2] * m[5]) * inv_det,
            (m[6] * m[8] - m[4] * m[10]) * inv_det,
            (m[0] * m[10] - m[2] * m[8]) * inv_det,
            (m[2] * m[4] - m[0] * m[6]) * inv_det,
            (m[4] * m[9] - m[5] * m[8]) * inv_det,
            (m[1] * m[8] - m[0] * m[9]) * inv_det,
            (m[0] * m[5] - m[1] * m[4]) * inv_det,
        ];
        let t = [m[3], m[7], m[11]];
        let tx = -(l[0] * t[0] + l[1] * t[1] + l[2] * t[2]);
        let ty = -(l[3] * t[0] + l[4] * t[1] + l[5] * t[2]);
        let tz = -(l[6] * t[0] + l[7] * t[1] + l[8] * t[2]);
        Ok(Mat4 {
            m: [
                l[0], l[1], l[2], tx, //
                l[3], l[4], l[5], ty, //
                l[6], l[7], l[8], tz, //
                0.0, 0.0, 0.0, 1.0,
            ],
        })
    }

    /// Largest absolute element-wise difference.
    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn analyze_scale(&self) -> ScaleAnalysis {
        let norm = |c: usize| {
            (self.m[c] * self.m[c] + self.m[4 + c] * self.m[4 + c] + self.m[8 + c] * self.m[8 + c])
                .sqrt()
        };
        let column_norms = [norm(0), norm(1), norm(2)];
        let mut spread: f64 = 0.0;
        for i in 0..3 {
            for j in (i + 1)..3 {
                let (a, b) = (column_norms[i], column_norms[j]);
                let denom = a.max(b);
                if denom > 0.0 {
                    spread = spread.max((a - b).abs() / denom);
                }
            }
        }
        ScaleAnalysis {
            column_norms,
            uniform: spread <= UNIFORM_SCALE_TOLERANCE,
        }
    }
}

impl Default for Mat4 {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Mul for Mat4 {
    type Output = Mat4;

    fn mul(self, rhs: Mat4) -> Mat4 {
        self.multiply(&rhs)
    }
}

impl Mul for &Mat4 {
    type Output = Mat4;

    fn mul(self, rhs: &Mat4) -> Mat4 {
        self.multiply(rhs)
    }
}

impl fmt::Debug for Mat4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Mat4[")?;
        for row in 0..4 {
            if row > 0 {
                f.write_str("; ")?;
            }
            let r = &self.m[row * 4..row * 4 + 4];
            write!(f, "{:?}, {:?}, {:?}, {:?}", r[0], r[1], r[2], r[3])?;
        }
        f.write_str("]")
    }
}

/// Column norms of the linear block and whether they agree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleAnalysis {
    pub column_norms: [f64; 3],
    pub uniform: bool,
}

/// Expresses `camera_world` in the local frame of the NeRF proxy:
/// `nerf_world⁻¹ · camera_world`.
///
/// Moving, rotating or scaling the proxy in the editor therefore moves the
/// camera the opposite way relative to the NeRF, which is what the renderer
/// needs to reproduce the editor view.
///
/// ```
/// use nerf_vfx::xform::{align_camera, Mat4};
///
/// let camera = Mat4::IDENTITY;
/// let proxy = Mat4::translation(1.0, 2.0, 3.0);
/// let aligned = align_camera(&camera, &proxy).unwrap();
/// assert_eq!(aligned, Mat4::translation(-1.0, -2.0, -3.0));
/// ```
pub fn align_camera(camera_world: &Mat4, nerf_world: &Mat4) -> Result<Mat4, SingularMatrix> {
    Ok(nerf_world.invert()?.multiply(camera_world))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_product(a: &Mat4, b: &Mat4) -> Mat4 {
        let mut out = [0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += a.get(i, k) * b.get(k, j);
                }
                out[i * 4 + j] = acc;
            }
        }
        Mat4::from_row_major(out)
    }

    fn affine_strategy() -> impl Strategy<Value = Mat4> {
        (
            prop::array::uniform3(-1.0f64..1.0),
            0.0f64..std::f64::consts::TAU,
            0.1f64..10.0,
            prop::array::uniform3(-100.0f64..100.0),
        )
            .prop_filter("axis", |(axis, ..)| {
                axis.iter().map(|v| v * v).sum::<f64>() > 1e-3
            })
            .prop_map(|(axis, angle, s, t)| {
                Mat4::translation(t[0], t[1], t[2])
                    * Mat4::rotation(axis, angle)
                    * Mat4::scale(s, s, s)
            })
    }

    #[test]
    fn identity_products() {
        assert_eq!(Mat4::IDENTITY * Mat4::IDENTITY, Mat4::IDENTITY);
        assert_eq!(
            Mat4::translation(1.0, 2.0, 3.0) * Mat4::translation(4.0, 5.0, 6.0),
            Mat4::translation(5.0, 7.0, 9.0)
        );
    }

    #[test]
    fn inverse_of_simple_transforms() {
        assert_eq!(Mat4::IDENTITY.invert().unwrap(), Mat4::IDENTITY);
        assert_eq!(
            Mat4::translation(1.0, 2.0, 3.0).invert().unwrap(),
            Mat4::translation(-1.0, -2.0, -3.0)
        );
        assert_eq!(
            Mat4::scale(2.0, 4.0, 0.5).invert().unwrap(),
            Mat4::scale(0.5, 0.25, 2.0)
        );
    }

    #[test]
    fn singular_is_rejected() {
        let err = Mat4::scale(1.0, 0.0, 1.0).invert().unwrap_err();
        assert_eq!(err.det, 0.0);
        assert!(Mat4::scale(1e-5, 1e-5, 1e-5).invert().is_err());
        let nan = Mat4::from_row_major([f64::NAN; 16]);
        assert!(nan.invert().is_err());
    }

    #[test]
    fn align_with_identity_proxy_is_passthrough() {
        let c = Mat4::translation(0.0, 0.0, 5.0) * Mat4::rotation([0.0, 1.0, 0.0], 0.3);
        assert_eq!(align_camera(&c, &Mat4::IDENTITY).unwrap(), c);
    }

    #[test]
    fn scale_analysis() {
        let a = Mat4::IDENTITY.analyze_scale();
        assert_eq!(a.column_norms, [1.0, 1.0, 1.0]);
        assert!(a.uniform);
        let b = Mat4::scale(2.0, 2.0, 2.0).analyze_scale();
        assert_eq!(b.column_norms, [2.0, 2.0, 2.0]);
        assert!(b.uniform);
        let c = Mat4::scale(1.0, 2.0, 1.0).analyze_scale();
        assert_eq!(c.column_norms, [1.0, 2.0, 1.0]);
        assert!(!c.uniform);
        // just inside / outside the relative tolerance
        assert!(Mat4::scale(1.0, 1.0 + 0.9e-4, 1.0).analyze_scale().uniform);
        assert!(!Mat4::scale(1.0, 1.0 + 1.1e-4, 1.0).analyze_scale().uniform);
    }

    #[test]
    fn inverse_keeps_exact_bottom_row() {
        let m = Mat4::translation(3.0, -2.0, 7.5) * Mat4::rotation([1.0, 1.0, 0.0], 1.1);
        assert!(m.invert().unwrap().is_affine());
    }

    proptest! {
        #[test]
        fn product_matches_triple_loop(a in affine_strategy(), b in affine_strategy()) {
            prop_assert!((a * b).max_abs_diff(&naive_product(&a, &b)) <= 1e-9);
            prop_assert!((a * b).is_affine());
        }

        #[test]
        fn inverse_round_trips(m in affine_strategy()) {
            let inv = m.invert().unwrap();
            prop_assert!((m * inv).max_abs_diff(&Mat4::IDENTITY) < 1e-9);
            prop_assert!(inv.invert().unwrap().max_abs_diff(&m) < 1e-9);
        }

        #[test]
        fn alignment_reconstructs_camera(c in affine_strategy(), n in affine_strategy()) {
            let aligned = align_camera(&c, &n).unwrap();
            prop_assert!((n * aligned).max_abs_diff(&c) < 1e-9);
        }

        #[test]
        fn alignment_ignores_global_frame(
            c in affine_strategy(), n in affine_strategy(), g in affine_strategy()
        ) {
            let a = align_camera(&(g * c), &(g * n)).unwrap();
            let b = align_camera(&c, &n).unwrap();
            prop_assert!(a.max_abs_diff(&b) < 1e-9);
        }

        #[test]
        fn animating_proxy_equals_inverse_camera_motion(
            c in affine_strategy(), n in affine_strategy(), m in affine_strategy()
        ) {
            let a = align_camera(&c, &(m * n)).unwrap();
            let b = align_camera(&(m.invert().unwrap() * c), &n).unwrap();
            prop_assert!(a.max_abs_diff(&b) < 1e-9);
        }
    }
}
