use crate::error::{Result, RotjacError};
use crate::linalg::{DenseMatrix, Mat3};
use crate::scalar::Real;
use crate::so3::gap_from_factors;
use crate::svd::{svd3, SvdFactors};

use super::SpectrumReport;

/// Minimum singular-value separation and gap accepted by the Jacobian ops.
pub const JACOBIAN_DEGENERACY_TOL: f64 = 1e-8;

/// Which near-degeneracies make the projection Jacobian ops fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectrumGuard {
    /// Reject when any two singular values are closer than the tolerance,
    /// the gap δ(M) is below it, or `M` is numerically singular.
    #[default]
    Strict,
    /// Reject only on a small gap δ(M) or a singular `M`. The polar factor
    /// stays differentiable at repeated singular values whose signed sum is
    /// nonzero (e.g. every point of SO(3)), so this admits them.
    GapOnly,
}

/// `∂vec(R)/∂vec(M)` for `R = svdo_plus(M)`, row-major on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian9x9<T>(DenseMatrix<T>);

impl<T: Real> Jacobian9x9<T> {
    pub fn as_dense(&self) -> &DenseMatrix<T> {
        &self.0
    }

    pub fn into_dense(self) -> DenseMatrix<T> {
        self.0
    }

    pub fn apply(&self, dm: &Mat3<T>) -> Mat3<T> {
        Mat3::from_slice(&self.0.mul_vec(dm.as_row_major()))
    }

    pub fn apply_transpose(&self, g: &Mat3<T>) -> Mat3<T> {
        Mat3::from_slice(&self.0.transpose_mul_vec(g.as_row_major()))
    }
}

impl<T> AsRef<DenseMatrix<T>> for Jacobian9x9<T> {
    fn as_ref(&self) -> &DenseMatrix<T> {
        &self.0
    }
}

/// Which combination of a frame pair `(P_ij, P_ji)` drives the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSubspace {
    Antisymmetric,
    Symmetric,
}

/// A perturbation `dM` and its image, both in the SVD frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFrameDifferential<T> {
    /// `P = Uᵀ dM V`.
    pub p: Mat3<T>,
    /// Antisymmetric `Φ` with `dR = U Φ (V·diag(1, 1, sign det M))ᵀ`.
    pub phi: Mat3<T>,
    /// Active input combination for pairs (1,2), (1,3), (2,3).
    pub active_subspace_labels: [PairSubspace; 3],
}

pub fn check_spectrum<T: Real>(f: &SvdFactors<T>, guard: SpectrumGuard) -> Result<()> {
    let tol = T::lit(JACOBIAN_DEGENERACY_TOL);
    let s = f.s.map(Real::to_f64_lossy);
    let fail = |reason: String| Err(RotjacError::NearDegenerateSpectrum { reason, s });
    if f.s[2] < tol {
        return fail(format!("smallest singular value below {JACOBIAN_DEGENERACY_TOL:e}; sign of det M undefined"));
    }
    let gap = gap_from_factors(f);
    if gap < tol {
        return fail(format!("singular value gap {} below {JACOBIAN_DEGENERACY_TOL:e}", gap.to_f64_lossy()));
    }
    if guard == SpectrumGuard::Strict {
        for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if (f.s[i] - f.s[j]).abs() < tol {
                return fail(format!("singular values {} and {} coincide", i + 1, j + 1));
            }
        }
    }
    Ok(())
}

fn checked_factors<T: Real>(m: &Mat3<T>, guard: SpectrumGuard) -> Result<SvdFactors<T>> {
    let f = svd3(m)?;
    check_spectrum(&f, guard)?;
    Ok(f)
}

/// Maps a frame perturbation `P' = Uᵀ dM V'` to `Φ` with
/// `Φ_ij = (P'_ij − P'_ji)/(t_i + t_j)`, `t` the signed singular values.
fn frame_map<T: Real>(p: &Mat3<T>, t: [T; 3]) -> Mat3<T> {
    Mat3::from_fn(|i, j| if i == j { T::zero() } else { (p[(i, j)] - p[(j, i)]) / (t[i] + t[j]) })
}

/// Jacobian of the projection onto SO(3), rejecting near-degenerate spectra.
pub fn svd_jacobian<T: Real>(m: &Mat3<T>) -> Result<Jacobian9x9<T>> {
    svd_jacobian_with(m, SpectrumGuard::Strict)
}

pub fn svd_jacobian_with<T: Real>(m: &Mat3<T>, guard: SpectrumGuard) -> Result<Jacobian9x9<T>> {
    let f = checked_factors(m, guard)?;
    let u = f.u;
    let vp = f.v_signed();
    let t = f.signed_values();
    let mut j = DenseMatrix::zeros(9, 9);
    for a in 0..3 {
        for b in 0..3 {
            // P' = Uᵀ E_ab V' has entries U_ai V'_bj.
            let p = Mat3::from_fn(|i, k| u[(a, i)] * vp[(b, k)]);
            let dr = u * frame_map(&p, t) * vp.transpose();
            j.set_column(3 * a + b, dr.as_row_major());
        }
    }
    Ok(Jacobian9x9(j))
}

/// `Jᵀ vec(grad_r)`: the gradient with respect to `M` of a loss whose
/// gradient with respect to `R = svdo_plus(M)` is `grad_r`.
pub fn svd_backward<T: Real>(m: &Mat3<T>, grad_r: &Mat3<T>) -> Result<Mat3<T>> {
    svd_backward_with(m, grad_r, SpectrumGuard::Strict)
}

pub fn svd_backward_with<T: Real>(m: &Mat3<T>, grad_r: &Mat3<T>, guard: SpectrumGuard) -> Result<Mat3<T>> {
    let f = checked_factors(m, guard)?;
    let vp = f.v_signed();
    let t = f.signed_values();
    let g = f.u.transpose() * *grad_r * vp;
    // The frame map is self-adjoint up to the pairing (i,j) ↔ (j,i).
    let z = frame_map(&g, t);
    Ok(f.u * z * vp.transpose())
}

/// Closed-form spectrum `{2/(t_i + t_j)}` with `t = (s1, s2, ±s3)`.
pub fn svd_jacobian_spectrum<T: Real>(m: &Mat3<T>) -> Result<SpectrumReport<T>> {
    svd_jacobian_spectrum_with(m, SpectrumGuard::Strict)
}

pub fn svd_jacobian_spectrum_with<T: Real>(m: &Mat3<T>, guard: SpectrumGuard) -> Result<SpectrumReport<T>> {
    let f = checked_factors(m, guard)?;
    let t = f.signed_values();
    let two = T::lit(2.0);
    let values = vec![two / (t[0] + t[1]), two / (t[0] + t[2]), two / (t[1] + t[2])];
    Ok(SpectrumReport::from_nonzero(values, 9))
}

/// Decomposes the response to `dm` in the SVD frame.
pub fn svd_frame_differential<T: Real>(
    m: &Mat3<T>,
    dm: &Mat3<T>,
    guard: SpectrumGuard,
) -> Result<SvdFrameDifferential<T>> {
    let f = checked_factors(m, guard)?;
    let vp = f.v_signed();
    let p = f.u.transpose() * *dm * f.v;
    let p_signed = f.u.transpose() * *dm * vp;
    let phi = frame_map(&p_signed, f.signed_values());
    let third = if f.det_sign > 0 { PairSubspace::Antisymmetric } else { PairSubspace::Symmetric };
    Ok(SvdFrameDifferential { p, phi, active_subspace_labels: [PairSubspace::Antisymmetric, third, third] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vec3;
    use crate::so3::RotationMatrix;

    fn sample_dm() -> Mat3<f64> {
        Mat3::from_rows([[0.3, -1.1, 0.4], [0.9, 0.2, -0.5], [0.05, 0.7, -0.8]])
    }

    #[test]
    fn identity_maps_to_skew_part() {
        let j = svd_jacobian_with(&Mat3::<f64>::identity(), SpectrumGuard::GapOnly).unwrap();
        let dm = sample_dm();
        let out = j.apply(&dm);
        assert!((out - dm.skew_part()).frobenius_norm() < 1e-15);
    }

    #[test]
    fn strict_guard_rejects_repeated_values() {
        let err = svd_jacobian(&Mat3::<f64>::identity()).unwrap_err();
        assert!(matches!(err, RotjacError::NearDegenerateSpectrum { .. }));
        let m = Mat3::diag([2.0, 2.0 + 1e-11, 1.0]);
        assert!(matches!(svd_jacobian(&m), Err(RotjacError::NearDegenerateSpectrum { .. })));
        // diag(2,1,-1) has s2 = s3 with opposite signs: a true singularity.
        let m = Mat3::diag([2.0, 1.0, -1.0]);
        assert!(matches!(
            svd_jacobian_with(&m, SpectrumGuard::GapOnly),
            Err(RotjacError::NearDegenerateSpectrum { .. })
        ));
        assert!(matches!(
            svd_jacobian_with(&Mat3::diag([2.0, 1.0, 0.0]), SpectrumGuard::GapOnly),
            Err(RotjacError::NearDegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn spectrum_closed_form() {
        let rep = svd_jacobian_spectrum(&Mat3::diag([3.0, 2.0, 1.0])).unwrap();
        let want = [2.0 / 3.0, 0.5, 0.4f64];
        for (a, b) in rep.nonzero_singular_values.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((rep.condition_number - 5.0f64 / 3.0).abs() < 1e-15);
        assert_eq!((rep.rank, rep.null_space_dim), (3, 6));

        let rep = svd_jacobian_spectrum_with(&Mat3::<f64>::identity(), SpectrumGuard::GapOnly).unwrap();
        assert_eq!(rep.nonzero_singular_values, vec![1.0; 3]);
        assert_eq!(rep.condition_number, 1.0);
    }

    #[test]
    fn negative_determinant_spectrum_uses_differences() {
        // s = (3, 2, 1) with det < 0: denominators s1+s2, s1−s3, s2−s3.
        let rep = svd_jacobian_spectrum(&Mat3::diag([3.0, 2.0, -1.0])).unwrap();
        let want = [2.0, 1.0, 0.4f64];
        for (a, b) in rep.nonzero_singular_values.iter().zip(want) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
        let j = svd_jacobian(&Mat3::diag([3.0, 2.0, -1.0])).unwrap();
        let num = SpectrumReport::numerical(j.as_dense(), 1e-12);
        for (a, b) in num.nonzero_singular_values.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn frame_labels() {
        let r = RotationMatrix::from_axis_angle(Vec3::new(0.2, 1.0, -0.4), 0.9);
        let m = *r.matrix() * Mat3::diag([3.0, 2.0, 1.0]);
        let d = svd_frame_differential(&m, &sample_dm(), SpectrumGuard::Strict).unwrap();
        assert_eq!(d.active_subspace_labels, [PairSubspace::Antisymmetric; 3]);
        assert!((d.phi + d.phi.transpose()).frobenius_norm() < 1e-12);

        let m = *r.matrix() * Mat3::diag([3.0, 2.0, -1.0]);
        let d = svd_frame_differential(&m, &sample_dm(), SpectrumGuard::Strict).unwrap();
        assert_eq!(
            d.active_subspace_labels,
            [PairSubspace::Antisymmetric, PairSubspace::Symmetric, PairSubspace::Symmetric]
        );
        assert!((d.phi + d.phi.transpose()).frobenius_norm() < 1e-12);
    }

    #[test]
    fn backward_of_zero_is_zero() {
        let m = Mat3::from_rows([[1.2, 0.3, -0.1], [0.0, 0.8, 0.4], [0.2, -0.3, 0.5]]);
        assert_eq!(svd_backward(&m, &Mat3::zeros()).unwrap(), Mat3::zeros());
    }
}
