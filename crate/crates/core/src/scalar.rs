//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar: `f32` or `f64`.
///
/// Tolerances that the algorithms compare against are exposed here so each
/// precision can pick values that are attainable for it.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance on `‖RᵀR − I‖_F` and `|det R − 1|` when validating rotations.
    fn rotation_tol() -> Self;

    /// Relative threshold below which a Jacobi rotation is skipped.
    fn jacobi_tol() -> Self;

    /// Converts an `f64` literal. Infallible for the supported precisions.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn rotation_tol() -> Self {
        1e-9
    }

    fn jacobi_tol() -> Self {
        1e-14
    }
}

impl Real for f32 {
    fn rotation_tol() -> Self {
        1e-4
    }

    fn jacobi_tol() -> Self {
        1e-7
    }
}
