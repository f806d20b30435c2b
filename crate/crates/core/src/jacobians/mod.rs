//! Analytic Jacobians of the SO(3) projections and of the geodesic loss,
//! and the finite-difference oracle that validates them.
//!
//! Matrices are flattened row-major everywhere: entry `(r, c)` of a 3×3
//! matrix is component `3r + c` of its vector.

mod finite_difference;
mod geodesic;
mod gram_schmidt;
mod svd;

pub use finite_difference::finite_difference_jacobian;
pub use geodesic::{compounded_gradient_norm, geodesic_gradient, CompoundedGradient, GEODESIC_ANGLE_MARGIN};
pub use gram_schmidt::{gs_condition_lower_bound, gs_jacobian, Jacobian9x6, GS_JACOBIAN_TOL};
pub use svd::{
    check_spectrum, svd_backward, svd_backward_with, svd_frame_differential, svd_jacobian, svd_jacobian_spectrum,
    svd_jacobian_spectrum_with, svd_jacobian_with, Jacobian9x9, PairSubspace, SpectrumGuard, SvdFrameDifferential,
    JACOBIAN_DEGENERACY_TOL,
};

use crate::linalg::DenseMatrix;
use crate::scalar::Real;

/// Singular-value summary of a Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport<T> {
    /// Nonzero singular values, descending.
    pub nonzero_singular_values: Vec<T>,
    pub rank: usize,
    pub null_space_dim: usize,
    pub spectral_norm: T,
    /// Largest over smallest nonzero singular value.
    pub condition_number: T,
}

impl<T: Real> SpectrumReport<T> {
    /// Builds a report from nonzero values (any order) and the input dimension.
    pub fn from_nonzero(mut values: Vec<T>, input_dim: usize) -> Self {
        values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        let rank = values.len();
        let spectral_norm = values.first().copied().unwrap_or_else(T::zero);
        let condition_number = match values.last() {
            Some(&min) if min > T::zero() => spectral_norm / min,
            _ => T::infinity(),
        };
        Self {
            nonzero_singular_values: values,
            rank,
            null_space_dim: input_dim - rank,
            spectral_norm,
            condition_number,
        }
    }

    /// Numerical spectrum of `j`; values at or below `rel_tol · σ_max` count as zero.
    pub fn numerical(j: &DenseMatrix<T>, rel_tol: T) -> Self {
        let sv = j.singular_values();
        let max = sv.first().copied().unwrap_or_else(T::zero);
        let nonzero = sv.into_iter().filter(|&x| x > rel_tol * max).collect();
        Self::from_nonzero(nonzero, j.cols())
    }
}
