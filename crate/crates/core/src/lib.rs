//! Orthogonalization onto SO(3) with exact Jacobians, the closed-form
//! spectral predictions built on them, and seeded Monte-Carlo harnesses
//! that check those predictions.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the bottom of this file name the common instantiations.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod jacobians;
pub mod linalg;
pub mod sampling;
pub mod scalar;
pub mod so3;
pub mod svd;

pub use error::{Result, RotjacError};
pub use jacobians::{
    compounded_gradient_norm, finite_difference_jacobian, geodesic_gradient, gs_condition_lower_bound, gs_jacobian,
    svd_backward, svd_jacobian, svd_jacobian_spectrum, CompoundedGradient, Jacobian9x6, Jacobian9x9, SpectrumGuard,
    SpectrumReport,
};
pub use linalg::{DenseMatrix, Mat3, Vec3};
pub use sampling::{perturbed_matrix, random_rotation, RngStream};
pub use scalar::Real;
pub use so3::{
    frobenius_loss, geodesic_distance, gram_schmidt, singular_value_gap, svdo_plus, tangent_normal_split,
    RotationMatrix, SixDParams,
};
pub use svd::{svd3, SvdFactors};

pub type Vec3d = Vec3<f64>;
pub type Mat3d = Mat3<f64>;
pub type Rotation3d = RotationMatrix<f64>;
pub type SixDParamsd = SixDParams<f64>;
pub type SvdFactorsd = SvdFactors<f64>;
pub type Vec3f = Vec3<f32>;
pub type Mat3f = Mat3<f32>;
pub type Rotation3f = RotationMatrix<f32>;
pub type SixDParamsf = SixDParams<f32>;
pub type SvdFactorsf = SvdFactors<f32>;
