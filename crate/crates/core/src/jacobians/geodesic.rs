use crate::error::{Result, RotjacError};
use crate::linalg::Mat3;
use crate::scalar::Real;
use crate::so3::{gap_from_factors, geodesic_distance, svdo_plus_from_factors, RotationMatrix};
use crate::svd::svd3;

use super::svd::{check_spectrum, svd_backward_with, SpectrumGuard};

/// Angles closer than this to 0 or π are rejected by the geodesic gradient.
pub const GEODESIC_ANGLE_MARGIN: f64 = 1e-6;

/// Gradient of the geodesic loss with respect to `r`, treating the loss as
/// `arccos((⟨r, r*⟩ − 1)/2)` on all 3×3 matrices: `−r*/(2 sin θ)`.
pub fn geodesic_gradient<T: Real>(r: &RotationMatrix<T>, r_star: &RotationMatrix<T>) -> Result<Mat3<T>> {
    let theta = geodesic_distance(r, r_star);
    let margin = T::lit(GEODESIC_ANGLE_MARGIN);
    if !(theta > margin && theta < T::PI() - margin) {
        return Err(RotjacError::AngleSingularity { theta: theta.to_f64_lossy() });
    }
    Ok(r_star.matrix().scale(-T::one() / (T::lit(2.0) * theta.sin())))
}

/// Geodesic-loss gradient pulled back through the SVD projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompoundedGradient<T> {
    /// `‖Jᵀ vec(geodesic_gradient)‖`.
    pub norm: T,
    /// `√3 / (δ(M) · sin θ)`.
    pub bound: T,
    pub theta: T,
    pub gap: T,
}

/// Norm of `∂L_geo/∂M` through `svdo_plus`, with its spectral bound.
///
/// Repeated singular values are accepted as long as the gap δ(M) is not
/// degenerate: on SO(3) itself every singular value equals 1.
pub fn compounded_gradient_norm<T: Real>(m: &Mat3<T>, r_star: &RotationMatrix<T>) -> Result<CompoundedGradient<T>> {
    let f = svd3(m)?;
    check_spectrum(&f, SpectrumGuard::GapOnly)?;
    let r = svdo_plus_from_factors(&f)?;
    let g = geodesic_gradient(&r, r_star)?;
    let back = svd_backward_with(m, &g, SpectrumGuard::GapOnly)?;
    let theta = geodesic_distance(&r, r_star);
    let gap = gap_from_factors(&f);
    Ok(CompoundedGradient { norm: back.frobenius_norm(), bound: T::lit(3.0).sqrt() / (gap * theta.sin()), theta, gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobians::finite_difference_jacobian;
    use crate::linalg::Vec3;
    use crate::so3::geodesic_loss_ambient;

    fn rot(axis: [f64; 3], angle: f64) -> RotationMatrix<f64> {
        RotationMatrix::from_axis_angle(Vec3::from_array(axis), angle)
    }

    #[test]
    fn norm_formula() {
        for theta in [0.01, 0.1, 1.0, 3.0] {
            let g = geodesic_gradient(&rot([0.0, 0.0, 1.0], theta), &RotationMatrix::identity()).unwrap();
            let want = 3f64.sqrt() / (2.0 * theta.sin());
            assert!((g.frobenius_norm() - want).abs() < 1e-9 * want.max(1.0));
        }
    }

    #[test]
    fn matches_finite_differences() {
        let r = rot([0.3, -0.5, 0.8], 0.2);
        let r_star = rot([-0.6, 0.1, 0.4], 1.9);
        let g = geodesic_gradient(&r, &r_star).unwrap();
        let fd = finite_difference_jacobian(
            |x: &[f64]| Ok::<_, RotjacError>(vec![geodesic_loss_ambient(&Mat3::from_slice(x), &r_star)]),
            r.matrix().as_row_major(),
            1e-6,
        )
        .unwrap();
        for k in 0..9 {
            assert!((fd[(0, k)] - g.as_row_major()[k]).abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_endpoints() {
        let id = RotationMatrix::<f64>::identity();
        assert!(matches!(geodesic_gradient(&id, &id), Err(RotjacError::AngleSingularity { .. })));
        let flip = rot([1.0, 0.0, 0.0], std::f64::consts::PI);
        assert!(matches!(geodesic_gradient(&flip, &id), Err(RotjacError::AngleSingularity { .. })));
    }

    #[test]
    fn compounded_on_rotation() {
        let m = *rot([0.0, 1.0, 0.0], std::f64::consts::FRAC_PI_2).matrix();
        let c = compounded_gradient_norm(&m, &RotationMatrix::identity()).unwrap();
        assert!((c.bound - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(c.norm <= c.bound + 1e-9);
    }

    #[test]
    fn compounded_bound_substitution() {
        let m = *rot([1.0, 0.0, 0.0], 0.1).matrix() * Mat3::diag([1.0, 1.0, 0.05]);
        let c = compounded_gradient_norm(&m, &RotationMatrix::identity()).unwrap();
        assert!((c.bound - 3f64.sqrt() / (1.05 * 0.1f64.sin())).abs() < 1e-9);
        assert!((c.bound - 16.52).abs() < 0.01);
        assert!(c.norm <= c.bound + 1e-9);
    }
}
