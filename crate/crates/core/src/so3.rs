//! Rotations, the two orthogonalization maps onto SO(3), and the losses
//! measured on them.

use crate::error::{Result, RotjacError};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;
use crate::svd::{svd3, SvdFactors};

/// A validated element of SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix<T>(Mat3<T>);

impl<T: Real> RotationMatrix<T> {
    /// Validates `RᵀR = I` and `det R = 1` within [`Real::rotation_tol`].
    pub fn new(m: Mat3<T>) -> Result<Self> {
        let tol = T::rotation_tol();
        let orth = m.orthogonality_error();
        let det = m.det();
        if !m.is_finite() || orth > tol || (det - T::one()).abs() > tol {
            return Err(RotjacError::NotARotation {
                orthogonality_error: orth.to_f64_lossy(),
                det: det.to_f64_lossy(),
            });
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    /// Rotation by `angle` radians about `axis` (normalized internally).
    pub fn from_axis_angle(axis: Vec3<T>, angle: T) -> Self {
        let n = axis.norm();
        if n == T::zero() {
            return Self::identity();
        }
        let k = axis.scale(T::one() / n);
        let kx = k.hat();
        // Rodrigues: I + sin θ [k]ₓ + (1 − cos θ) [k]ₓ².
        Self(Mat3::identity() + kx.scale(angle.sin()) + (kx * kx).scale(T::one() - angle.cos()))
    }

    /// Rotation from a quaternion `(w, x, y, z)`; normalized internally.
    pub fn from_quaternion(q: [T; 4]) -> Self {
        let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
        let [w, x, y, z] = q.map(|c| c / n);
        let one = T::one();
        let two = T::lit(2.0);
        Self(Mat3::from_rows([
            [one - two * (y * y + z * z), two * (x * y - w * z), two * (x * z + w * y)],
            [two * (x * y + w * z), one - two * (x * x + z * z), two * (y * z - w * x)],
            [two * (x * z - w * y), two * (y * z + w * x), one - two * (x * x + y * y)],
        ]))
    }

    pub fn matrix(&self) -> &Mat3<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Mat3<T> {
        self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// Composition `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    /// Rotation vector `θ k` with `self = exp([θ k]ₓ)`. Accurate away from
    /// θ = π, where the axis sign is ambiguous.
    pub fn log(&self) -> Vec3<T> {
        let q = &self.0;
        let a = Vec3::new(q[(2, 1)] - q[(1, 2)], q[(0, 2)] - q[(2, 0)], q[(1, 0)] - q[(0, 1)]);
        let half = T::lit(0.5);
        let sin = a.norm() * half;
        let cos = ((q.trace() - T::one()) * half).max(-T::one()).min(T::one());
        let theta = sin.atan2(cos);
        let factor = if sin > T::epsilon() { theta / (sin + sin) } else { half };
        a.scale(factor)
    }
}

/// Two raw 3-vectors fed to Gram-Schmidt orthogonalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SixDParams<T> {
    pub t1: Vec3<T>,
    pub t2: Vec3<T>,
}

impl<T: Real> SixDParams<T> {
    pub fn new(t1: Vec3<T>, t2: Vec3<T>) -> Self {
        Self { t1, t2 }
    }

    /// First two columns of `m`.
    pub fn from_columns(m: &Mat3<T>) -> Self {
        Self { t1: m.col(0), t2: m.col(1) }
    }

    /// `(t1, t2)` as a flat 6-vector, `t1` first.
    pub fn to_flat(&self) -> [T; 6] {
        [self.t1.x, self.t1.y, self.t1.z, self.t2.x, self.t2.y, self.t2.z]
    }

    pub fn from_flat(x: &[T]) -> Self {
        assert_eq!(x.len(), 6, "six parameters expected");
        Self { t1: Vec3::new(x[0], x[1], x[2]), t2: Vec3::new(x[3], x[4], x[5]) }
    }

    /// `r₂″ = t2 − (r̂₁·t2) r̂₁`, the part of `t2` orthogonal to `t1`.
    /// Zero when `t1` vanishes.
    pub fn residual(&self) -> Vec3<T> {
        let n1 = self.t1.norm();
        if n1 == T::zero() {
            return Vec3::zeros();
        }
        let r1 = self.t1.scale(T::one() / n1);
        self.t2 - r1.scale(r1.dot(self.t2))
    }
}

/// Threshold under which Gram-Schmidt treats a norm as zero.
pub const GS_DEGENERACY_TOL: f64 = 1e-12;

/// Gram-Schmidt orthogonalization of `(t1, t2)` into a rotation whose
/// first column is parallel to `t1`.
pub fn gram_schmidt<T: Real>(p: &SixDParams<T>) -> Result<RotationMatrix<T>> {
    let tol = T::lit(GS_DEGENERACY_TOL);
    let n1 = p.t1.norm();
    if !(n1 >= tol) {
        return Err(RotjacError::DegenerateInput(format!("‖t1‖ = {n1} is below {GS_DEGENERACY_TOL:e}")));
    }
    let r1 = p.t1.scale(T::one() / n1);
    let r2pp = p.t2 - r1.scale(r1.dot(p.t2));
    let n2 = r2pp.norm();
    if !(n2 >= tol) {
        return Err(RotjacError::DegenerateInput(format!(
            "t1 and t2 are parallel (‖r2''‖ = {n2} is below {GS_DEGENERACY_TOL:e})"
        )));
    }
    let r2 = r2pp.scale(T::one() / n2);
    let r3 = r1.cross(r2);
    Ok(RotationMatrix(Mat3::from_cols(r1, r2, r3)))
}

/// Special-orthogonal projection `U · diag(1, 1, det(UVᵀ)) · Vᵀ`, the
/// nearest rotation to `m` in Frobenius norm.
pub fn svdo_plus<T: Real>(m: &Mat3<T>) -> Result<RotationMatrix<T>> {
    let f = svd3(m)?;
    svdo_plus_from_factors(&f)
}

pub fn svdo_plus_from_factors<T: Real>(f: &SvdFactors<T>) -> Result<RotationMatrix<T>> {
    if f.s[0] == T::zero() {
        return Err(RotjacError::DegenerateInput("zero matrix has no nearest rotation".into()));
    }
    let uvt = f.u * f.v.transpose();
    let d = if uvt.det() < T::zero() { -T::one() } else { T::one() };
    let r = f.u * Mat3::diag([T::one(), T::one(), d]) * f.v.transpose();
    Ok(RotationMatrix(r))
}

/// `‖r − r_star‖²_F`.
pub fn frobenius_loss<T: Real>(r: &Mat3<T>, r_star: &RotationMatrix<T>) -> T {
    (*r - r_star.0).frobenius_norm_squared()
}

/// Angle of the relative rotation `rᵀ r_star`, in `[0, π]`.
///
/// Evaluated as `atan2(sin θ, cos θ)` with `cos θ = (tr(rᵀr*) − 1)/2` and
/// `sin θ` taken from the antisymmetric part of `rᵀr*`. This equals
/// `arccos((tr(rᵀr*) − 1)/2)` on SO(3) but keeps full relative precision
/// near 0 and π, where the arccos form loses half the digits.
pub fn geodesic_distance<T: Real>(r: &RotationMatrix<T>, r_star: &RotationMatrix<T>) -> T {
    let q = r.0.transpose() * r_star.0;
    let half = T::lit(0.5);
    let cos = ((q.trace() - T::one()) * half).max(-T::one()).min(T::one());
    let axis = Vec3::new(q[(2, 1)] - q[(1, 2)], q[(0, 2)] - q[(2, 0)], q[(1, 0)] - q[(0, 1)]);
    let sin = axis.norm() * half;
    sin.atan2(cos)
}

/// The geodesic loss `arccos((tr(rᵀr*) − 1)/2)` evaluated on an arbitrary
/// matrix `r`, with the argument clamped to `[−1, 1]`.
///
/// This is the function whose ambient gradient is `−r*/(2 sin θ)`; use
/// [`geodesic_distance`] to measure angles between rotations.
pub fn geodesic_loss_ambient<T: Real>(r: &Mat3<T>, r_star: &RotationMatrix<T>) -> T {
    let c = ((r.inner(&r_star.0) - T::one()) * T::lit(0.5)).max(-T::one()).min(T::one());
    c.acos()
}

/// Smallest denominator in the projection Jacobian.
///
/// `s2 + s3` when `det M > 0`; `min(s1 − s3, s2 − s3, s1 + s2)` otherwise
/// (the determinant flip turns `s3` into `−s3`). A singular matrix takes
/// the negative branch.
pub fn singular_value_gap<T: Real>(m: &Mat3<T>) -> Result<T> {
    Ok(gap_from_factors(&svd3(m)?))
}

pub fn gap_from_factors<T: Real>(f: &SvdFactors<T>) -> T {
    let [s1, s2, s3] = f.s;
    if f.det_sign > 0 {
        s2 + s3
    } else {
        (s1 - s3).min(s2 - s3).min(s1 + s2)
    }
}

/// Splits `P = r*ᵀ n` into antisymmetric (tangent) and symmetric (normal)
/// parts, returned in that order.
pub fn tangent_normal_split<T: Real>(r_star: &RotationMatrix<T>, n: &Mat3<T>) -> (Mat3<T>, Mat3<T>) {
    let p = r_star.0.transpose() * *n;
    (p.skew_part(), p.sym_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn rz(angle: f64) -> RotationMatrix<f64> {
        RotationMatrix::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), angle)
    }

    #[test]
    fn rotation_validation() {
        assert!(RotationMatrix::new(Mat3::<f64>::identity()).is_ok());
        assert!(RotationMatrix::new(Mat3::diag([1.0, 1.0, -1.0])).is_err());
        assert!(RotationMatrix::new(Mat3::diag([1.0, 1.0, 1.0 + 1e-6])).is_err());
        assert!(RotationMatrix::new(*rz(0.7).matrix()).is_ok());
    }

    #[test]
    fn gram_schmidt_identity_cases() {
        let e1 = Vec3::new(1.0, 0.0, 0.0);
        let e2 = Vec3::new(0.0, 1.0, 0.0);
        let r = gram_schmidt(&SixDParams::new(e1, e2)).unwrap();
        assert_eq!(*r.matrix(), Mat3::identity());
        let r = gram_schmidt(&SixDParams::new(Vec3::new(2.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 0.0))).unwrap();
        assert_eq!(*r.matrix(), Mat3::identity());
    }

    #[test]
    fn gram_schmidt_degenerate() {
        let t = Vec3::new(0.3, -0.2, 0.9);
        let err = gram_schmidt(&SixDParams::new(t, t.scale(2.5))).unwrap_err();
        assert!(matches!(err, RotjacError::DegenerateInput(_)));
        let err = gram_schmidt(&SixDParams::new(Vec3::zeros(), t)).unwrap_err();
        assert!(matches!(err, RotjacError::DegenerateInput(_)));
    }

    #[test]
    fn svdo_plus_fixes_rotations_and_reflections() {
        let r = rz(1.1);
        let p = svdo_plus(r.matrix()).unwrap();
        assert!((*p.matrix() - *r.matrix()).frobenius_norm() < 1e-14);

        let p = svdo_plus(&Mat3::diag([2.0, 1.0, -1.0])).unwrap();
        assert!((*p.matrix() - Mat3::identity()).frobenius_norm() < 1e-15);

        assert!(matches!(svdo_plus(&Mat3::<f64>::zeros()), Err(RotjacError::DegenerateInput(_))));
    }

    #[test]
    fn frobenius_loss_values() {
        let i = RotationMatrix::<f64>::identity();
        assert_eq!(frobenius_loss(i.matrix(), &i), 0.0);
        let half_turn = *rz(PI).matrix();
        assert!((frobenius_loss(&half_turn, &i) - 8.0).abs() < 1e-14);

        let n = Mat3::from_rows([[0.5, -1.0, 0.2], [0.0, 1.5, -0.3], [0.7, 0.1, -0.4]]);
        let sigma = 0.25;
        let m = *i.matrix() + n.scale(sigma);
        let expected = sigma * sigma * n.frobenius_norm_squared();
        assert!((frobenius_loss(&m, &i) - expected).abs() < 1e-15);
    }

    #[test]
    fn geodesic_values() {
        let i = RotationMatrix::<f64>::identity();
        assert_eq!(geodesic_distance(&i, &i), 0.0);
        assert!((geodesic_distance(&i, &rz(FRAC_PI_2)) - FRAC_PI_2).abs() < 1e-15);
        assert!((geodesic_distance(&i, &rz(PI)) - PI).abs() < 1e-7);
        assert!((geodesic_distance(&rz(0.3), &rz(1e-9 + 0.3)) - 1e-9).abs() < 1e-16);
        let a = rz(0.4).compose(&RotationMatrix::from_axis_angle(Vec3::new(1.0, 1.0, 0.0), 0.9));
        let b = rz(-1.2);
        assert_eq!(geodesic_distance(&a, &b), geodesic_distance(&b, &a));
        assert!((geodesic_loss_ambient(a.matrix(), &b) - geodesic_distance(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn log_inverts_axis_angle() {
        let w = Vec3::new(0.3, -0.8, 0.5);
        let r = RotationMatrix::from_axis_angle(w, w.norm());
        assert!((r.log() - w).norm() < 1e-14);
        let tiny = Vec3::new(1e-9, 0.0, -2e-9);
        let r = RotationMatrix::from_axis_angle(tiny, tiny.norm());
        assert!((r.log() - tiny).norm() < 1e-20);
        assert_eq!(RotationMatrix::<f64>::identity().log(), Vec3::zeros());
    }

    #[test]
    fn gap_branches() {
        assert_eq!(singular_value_gap(&Mat3::diag([3.0, 2.0, 1.0])).unwrap(), 3.0);
        assert_eq!(singular_value_gap(&Mat3::diag([2.0, 1.0, -1.0])).unwrap(), 0.0);
        assert_eq!(singular_value_gap(&Mat3::<f64>::identity()).unwrap(), 2.0);
        // Singular matrix: negative branch with s3 = 0.
        assert_eq!(singular_value_gap(&Mat3::diag([3.0, 2.0, 0.0])).unwrap(), 2.0);
    }

    #[test]
    fn tangent_normal_cases() {
        let r = rz(0.8);
        let (a, s) = tangent_normal_split(&r, r.matrix());
        assert!(a.frobenius_norm() < 1e-15);
        assert!((s - Mat3::identity()).frobenius_norm() < 1e-15);

        let w = Vec3::new(0.2, -0.5, 1.0).hat();
        let (a, s) = tangent_normal_split(&RotationMatrix::identity(), &w);
        assert_eq!(a, w);
        assert_eq!(s, Mat3::zeros());
    }
}
