//! Closed-form predictions: gradient information retention, expected
//! condition number under noise, first-order projection errors, and
//! gradient-descent contraction rates. Nothing here samples.

use crate::error::{Result, RotjacError};
use crate::linalg::DenseMatrix;
use crate::scalar::Real;

/// Fraction of isotropic gradient energy that survives `g ↦ Jᵀg`:
/// `tr(JJᵀ)` divided by the dimension of `g` (the row count of `J`).
pub fn gradient_info_retention<T: Real, J: AsRef<DenseMatrix<T>>>(j: &J) -> T {
    let j = j.as_ref();
    j.frobenius_norm_squared() / T::from_usize(j.rows()).expect("row count representable")
}

/// `E[λ_max]` of the 3×3 GOE, `(3/2)√(3/π) ≈ 1.466`.
pub fn c3<T: Real>() -> T {
    T::lit(1.5) * (T::lit(3.0) / T::PI()).sqrt()
}

/// Noise level at which the first-order κ prediction diverges, `2/c₃`.
pub fn kappa_divergence_sigma<T: Real>() -> T {
    T::lit(2.0) / c3::<T>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaPrediction<T> {
    pub sigma: T,
    pub formula_value: T,
    pub divergence_sigma: T,
}

/// First-order expected condition number of the projection Jacobian at
/// `M = I + σN`: `(2 + σc₃)/(2 − σc₃)`.
pub fn expected_kappa_formula<T: Real>(sigma: T) -> Result<KappaPrediction<T>> {
    let divergence_sigma = kappa_divergence_sigma::<T>();
    if !(sigma >= T::zero() && sigma < divergence_sigma) {
        return Err(RotjacError::DomainError(format!(
            "sigma = {sigma} outside [0, {divergence_sigma}) where the expected-κ formula is finite"
        )));
    }
    let two = T::lit(2.0);
    let x = sigma * c3::<T>();
    Ok(KappaPrediction { sigma, formula_value: (two + x) / (two - x), divergence_sigma })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionErrorPrediction<T> {
    pub svd_mse: T,
    pub gs_mse: T,
    pub raw_mse: T,
}

/// Leading-order mean squared errors `(3σ², 6σ², 9σ²)` of the SVD
/// projection, Gram-Schmidt, and the raw matrix at `M = R* + σN`.
pub fn projection_error_prediction<T: Real>(sigma: T) -> ProjectionErrorPrediction<T> {
    let v = sigma * sigma;
    ProjectionErrorPrediction { svd_mse: T::lit(3.0) * v, gs_mse: T::lit(6.0) * v, raw_mse: T::lit(9.0) * v }
}

/// Local gradient-descent rates for `‖svdo_plus(M) − R*‖²` near its
/// minimum, with singular values `s` and step `eta`.
///
/// `eigenvalues` are those of `JᵀJ` on its row space, `4/(sᵢ+sⱼ)²` for the
/// pairs (1,2), (1,3), (2,3). The loss Hessian there is `2JᵀJ`, so a step
/// contracts pair `(i, j)` by `|1 − 2η·4/(sᵢ+sⱼ)²|`, the same convention
/// under which the direct loss `‖M − R*‖²` contracts by `|1 − 2η|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePrediction<T> {
    pub s: [T; 3],
    pub eta: T,
    /// Pairs (1,2), (1,3), (2,3); ascending because `s` is descending.
    pub eigenvalues: [T; 3],
    /// Largest step for which every pair contracts: `(s2 + s3)²/4`.
    pub max_step_size: T,
    /// `|1 − 2ηλ|` per pair, same order as `eigenvalues`.
    pub contraction_factors: [T; 3],
    /// Largest contraction factor over the pairs.
    pub slowest_rate: T,
    /// `|1 − 2η|`.
    pub direct_rate: T,
    /// Small-step iteration multiple of the SVD loss over the direct loss
    /// along the slowest pair: `(s1 + s2)²/4`.
    pub iteration_ratio: T,
}

impl<T: Real> ConvergencePrediction<T> {
    /// Slowest contraction factor at another step size.
    pub fn slowest_rate_at(&self, eta: T) -> T {
        self.eigenvalues.iter().map(|&l| contraction(eta, l)).fold(T::zero(), T::max)
    }

    pub fn direct_rate_at(eta: T) -> T {
        (T::one() - T::lit(2.0) * eta).abs()
    }
}

fn contraction<T: Real>(eta: T, lambda: T) -> T {
    (T::one() - T::lit(2.0) * eta * lambda).abs()
}

pub fn convergence_prediction<T: Real>(s: [T; 3], eta: T) -> Result<ConvergencePrediction<T>> {
    let [s1, s2, s3] = s;
    if !(s3 > T::zero()) {
        return Err(RotjacError::DomainError(format!("smallest singular value {s3} must be positive")));
    }
    if !(s1 >= s2 && s2 >= s3) {
        return Err(RotjacError::DomainError("singular values must be sorted descending".into()));
    }
    if !(eta > T::zero()) {
        return Err(RotjacError::DomainError(format!("step size {eta} must be positive")));
    }
    let four = T::lit(4.0);
    let lam = |a: T, b: T| four / ((a + b) * (a + b));
    let eigenvalues = [lam(s1, s2), lam(s1, s3), lam(s2, s3)];
    let contraction_factors = eigenvalues.map(|l| contraction(eta, l));
    Ok(ConvergencePrediction {
        s,
        eta,
        eigenvalues,
        max_step_size: (s2 + s3) * (s2 + s3) / four,
        contraction_factors,
        slowest_rate: contraction_factors.iter().copied().fold(T::zero(), T::max),
        direct_rate: ConvergencePrediction::direct_rate_at(eta),
        iteration_ratio: (s1 + s2) * (s1 + s2) / four,
    })
}

/// Smallest `k ≥ 1` with `rate^k ≤ 1/factor`, or `None` when `rate ≥ 1`.
pub fn iterations_to_reduce<T: Real>(rate: T, factor: T) -> Option<u64> {
    if !(rate < T::one()) {
        return None;
    }
    if rate == T::zero() {
        return Some(1);
    }
    let k = (factor.ln() / -rate.ln()).ceil();
    Some(k.to_u64().unwrap_or(u64::MAX).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobians::{svd_jacobian, svd_jacobian_spectrum, svd_jacobian_with, SpectrumGuard};
    use crate::linalg::Mat3;

    #[test]
    fn retention_values() {
        assert_eq!(gradient_info_retention(&DenseMatrix::<f64>::identity(9)), 1.0);
        let j = svd_jacobian_with(&Mat3::<f64>::identity(), SpectrumGuard::GapOnly).unwrap();
        assert!((gradient_info_retention(&j) - 1.0 / 3.0).abs() < 1e-12);
        let j = svd_jacobian(&Mat3::diag([3.0, 2.0, 1.0])).unwrap();
        let want: f64 = (4.0 / 25.0 + 4.0 / 16.0 + 4.0 / 9.0) / 9.0;
        assert!((gradient_info_retention(&j) - want).abs() < 1e-12);
    }

    #[test]
    fn kappa_formula() {
        assert_eq!(expected_kappa_formula(0.0).unwrap().formula_value, 1.0);
        assert!((expected_kappa_formula(0.1f64).unwrap().formula_value - 1.158).abs() < 5e-4);
        assert!((expected_kappa_formula(0.3f64).unwrap().formula_value - 1.564).abs() < 5e-4);
        let p = expected_kappa_formula(0.5f64).unwrap();
        assert!((p.divergence_sigma - 1.364).abs() < 1e-3);
        assert!(matches!(expected_kappa_formula(1.4), Err(RotjacError::DomainError(_))));
        assert!(matches!(expected_kappa_formula(-0.1), Err(RotjacError::DomainError(_))));
        for i in 1..=10 {
            let s = i as f64 * 0.01;
            let f = expected_kappa_formula(s).unwrap().formula_value;
            assert!((f - (1.0 + s * c3::<f64>())).abs() <= s * s * c3::<f64>().powi(2));
        }
    }

    #[test]
    fn projection_predictions() {
        let p = projection_error_prediction(0.05f64);
        assert!((p.svd_mse - 0.0075).abs() < 1e-15);
        assert!((p.gs_mse - 0.015).abs() < 1e-15);
        assert!((p.raw_mse - 0.0225).abs() < 1e-15);
        assert!((p.svd_mse / p.raw_mse - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn convergence_rates() {
        let p = convergence_prediction([3.0f64, 1.0, 0.1], 0.3).unwrap();
        assert_eq!(p.eigenvalues[0], 0.25);
        assert!((p.contraction_factors[0] - 0.85).abs() < 1e-15);
        assert!((p.max_step_size - 0.3025).abs() < 1e-15);
        assert_eq!(iterations_to_reduce(p.contraction_factors[0], 100.0), Some(29));
        assert!((p.iteration_ratio - 4.0).abs() < 1e-15);

        // Unit singular values: both losses share the Hessian 2I.
        let p = convergence_prediction([1.0f64, 1.0, 1.0], 0.1).unwrap();
        assert!((p.slowest_rate - p.direct_rate).abs() < 1e-15);
        assert_eq!(ConvergencePrediction::<f64>::direct_rate_at(0.5), 0.0);
        assert_eq!(iterations_to_reduce(0.0, 100.0), Some(1));
        assert_eq!(iterations_to_reduce(1.0, 100.0), None);
        assert!(convergence_prediction([1.0, 0.5, 0.0], 0.1).is_err());
    }

    #[test]
    fn eigenvalues_match_squared_spectrum() {
        let s = [2.5, 1.2, 0.4];
        let p = convergence_prediction(s, 0.1).unwrap();
        let rep = svd_jacobian_spectrum(&Mat3::diag(s)).unwrap();
        let mut sq: Vec<f64> = rep.nonzero_singular_values.iter().map(|x| x * x).collect();
        sq.reverse();
        for (a, b) in p.eigenvalues.iter().zip(sq) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
