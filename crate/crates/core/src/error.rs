use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RotjacError {
    #[error("SVD did not converge within {sweeps} Jacobi sweeps")]
    NumericalFailure { sweeps: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The Jacobian of the projection is undefined or numerically meaningless here.
    #[error("near-degenerate spectrum: {reason} (singular values {s:?})")]
    NearDegenerateSpectrum { reason: String, s: [f64; 3] },

    /// The geodesic gradient diverges at θ = 0 and θ = π.
    #[error("geodesic angle {theta} is within the gradient singularity margin")]
    AngleSingularity { theta: f64 },

    #[error("argument outside the domain: {0}")]
    DomainError(String),

    /// Too many Monte-Carlo draws hit a degeneracy to trust the statistics.
    #[error("{experiment}: {skipped} of {total} samples skipped, above the 1% limit")]
    SkipFractionExceeded { experiment: String, skipped: usize, total: usize },

    #[error("matrix is not a rotation (‖RᵀR − I‖_F = {orthogonality_error:e}, det = {det})")]
    NotARotation { orthogonality_error: f64, det: f64 },
}

pub type Result<T, E = RotjacError> = std::result::Result<T, E>;
