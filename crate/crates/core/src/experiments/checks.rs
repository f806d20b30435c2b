use crate::error::Result;
use crate::jacobians::geodesic_gradient;
use crate::jacobians::{
    check_spectrum, finite_difference_jacobian, gs_jacobian, svd_jacobian, svd_jacobian_spectrum, SpectrumGuard,
};
use crate::linalg::{DenseMatrix, Mat3, Vec3};
use crate::sampling::random_rotation;
use crate::sampling::RngStream;
use crate::so3::{
    gap_from_factors, geodesic_distance, geodesic_loss_ambient, gram_schmidt, svdo_plus, RotationMatrix, SixDParams,
};
use crate::svd::svd3;

use super::{pairwise_sum, parallel_map, ExperimentReport, RecordTable, SummaryStats};

/// Central-difference step used by the Jacobian checks.
pub const FD_STEP: f64 = 1e-6;
/// Minimum gap δ(M) of the sampled test matrices.
pub const MIN_CHECK_GAP: f64 = 0.1;
/// Minimum `s3` of the sampled test matrices, keeping every difference
/// stencil on one side of `det M = 0`, where the projection jumps.
pub const MIN_CHECK_S3: f64 = 0.01;
/// Minimum `‖t1‖` and `‖r₂″‖` of the sampled Gram-Schmidt inputs.
pub const MIN_CHECK_GS_NORM: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianTrial {
    pub trial: usize,
    pub det_sign: i8,
    pub delta: f64,
    /// Max entrywise `|J − J_FD|` for the SVD projection.
    pub svd_fd_dev: f64,
    /// Max `|σ_k(J) − predicted_k|` over all nine singular values.
    pub spectrum_dev: f64,
    pub gs_fd_dev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobianCheck {
    pub trials: Vec<JacobianTrial>,
}

impl JacobianCheck {
    fn max_of(&self, f: impl Fn(&JacobianTrial) -> f64) -> f64 {
        self.trials.iter().map(f).fold(0.0, f64::max)
    }

    pub fn svd_max_dev(&self) -> f64 {
        self.max_of(|t| t.svd_fd_dev)
    }

    pub fn gs_max_dev(&self) -> f64 {
        self.max_of(|t| t.gs_fd_dev)
    }

    pub fn spectrum_max_dev(&self) -> f64 {
        self.max_of(|t| t.spectrum_dev)
    }
}

/// Unit-Frobenius Gaussian matrix with `δ ≥ 0.1`, `s3 ≥ 0.01` and the
/// requested determinant sign (the last row is negated to flip it).
pub fn sample_check_matrix(stream: &mut RngStream, positive: bool) -> Result<Mat3<f64>> {
    loop {
        let mut m = stream.gaussian_matrix::<f64>();
        let n = m.frobenius_norm();
        if n == 0.0 {
            continue;
        }
        m = m.scale(1.0 / n);
        if (m.det() > 0.0) != positive {
            m = Mat3::diag([1.0, 1.0, -1.0]) * m;
        }
        let f = svd3(&m)?;
        if gap_from_factors(&f) >= MIN_CHECK_GAP
            && f.s[2] >= MIN_CHECK_S3
            && check_spectrum(&f, SpectrumGuard::Strict).is_ok()
        {
            return Ok(m);
        }
    }
}

pub fn sample_check_params(stream: &mut RngStream) -> SixDParams<f64> {
    loop {
        let mut v = || Vec3::new(stream.standard_normal(), stream.standard_normal(), stream.standard_normal());
        let p = SixDParams::new(v(), v());
        if p.t1.norm() >= MIN_CHECK_GS_NORM && p.residual().norm() >= MIN_CHECK_GS_NORM {
            return p;
        }
    }
}

fn flat_svdo(x: &[f64]) -> Result<Vec<f64>> {
    Ok(svdo_plus(&Mat3::from_slice(x))?.matrix().as_row_major().to_vec())
}

fn flat_gs(x: &[f64]) -> Result<Vec<f64>> {
    Ok(gram_schmidt(&SixDParams::from_flat(x))?.matrix().as_row_major().to_vec())
}

fn one_trial(seed: u64, trial: usize) -> Result<JacobianTrial> {
    let mut stream = RngStream::for_key(&[seed, 0, trial as u64]);
    let m = sample_check_matrix(&mut stream, trial.is_multiple_of(2))?;
    let f = svd3(&m)?;
    let j = svd_jacobian(&m)?;
    let fd = finite_difference_jacobian(flat_svdo, m.as_row_major(), FD_STEP)?;
    let spectrum = svd_jacobian_spectrum(&m)?;
    let mut predicted = spectrum.nonzero_singular_values.clone();
    predicted.resize(9, 0.0);
    let measured = j.as_dense().singular_values();
    let spectrum_dev = measured.iter().zip(&predicted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let mut gs_stream = RngStream::for_key(&[seed, 1, trial as u64]);
    let p = sample_check_params(&mut gs_stream);
    let gj = gs_jacobian(&p)?;
    let gfd = finite_difference_jacobian(flat_gs, &p.to_flat(), FD_STEP)?;

    Ok(JacobianTrial {
        trial,
        det_sign: f.det_sign,
        delta: gap_from_factors(&f),
        svd_fd_dev: j.as_dense().max_abs_diff(&fd),
        spectrum_dev,
        gs_fd_dev: gj.as_dense().max_abs_diff(&gfd),
    })
}

/// Analytic-versus-finite-difference comparison for both projection
/// Jacobians, plus the closed-form spectrum, over random inputs. Even
/// trials use `det M > 0`, odd trials `det M < 0`.
pub fn jacobian_check(trials: usize, seed: u64, parallelism: usize) -> Result<JacobianCheck> {
    let results = parallel_map(parallelism.max(1), trials, |i| one_trial(seed, i));
    Ok(JacobianCheck { trials: results.into_iter().collect::<Result<_>>()? })
}

impl ExperimentReport for JacobianCheck {
    fn records(&self) -> RecordTable {
        let mut t = RecordTable::new(&["trial", "det_sign", "delta", "svd_fd_dev", "spectrum_dev", "gs_fd_dev"]);
        for r in &self.trials {
            t.push(vec![
                r.trial.into(),
                Value::Real(f64::from(r.det_sign)),
                r.delta.into(),
                r.svd_fd_dev.into(),
                r.spectrum_dev.into(),
                r.gs_fd_dev.into(),
            ]);
        }
        t
    }

    fn summary(&self) -> Vec<SummaryStats> {
        vec![
            SummaryStats::single("svd_fd_max_dev", None, self.svd_max_dev()),
            SummaryStats::single("gs_fd_max_dev", None, self.gs_max_dev()),
            SummaryStats::single("spectrum_max_dev", None, self.spectrum_max_dev()),
        ]
    }
}

use super::Value;

/// Geodesic-gradient check at one angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicTrial {
    pub theta: f64,
    /// `‖geodesic_gradient‖_F`.
    pub norm: f64,
    /// `√3/(2 sin θ)`.
    pub formula: f64,
    /// Max entrywise deviation from central differences, when checked.
    pub fd_dev: Option<f64>,
}

/// Angles between which the finite-difference comparison is meaningful
/// at step 1e-6; closer to 0 or π the truncation error of the arccos
/// stencil grows like `h²/sin⁵θ`.
pub const GEODESIC_FD_RANGE: (f64, f64) = (0.1, 3.0);

/// Gradient of the geodesic loss at a random pair `(R* exp(θ[k]ₓ), R*)`.
pub fn geodesic_gradient_trial(theta: f64, seed: u64, index: usize) -> Result<GeodesicTrial> {
    let mut s = RngStream::for_key(&[seed, 2, index as u64]);
    let r_star = random_rotation::<f64>(&mut s);
    let axis = Vec3::new(s.standard_normal(), s.standard_normal(), s.standard_normal());
    let r = r_star.compose(&RotationMatrix::from_axis_angle(axis, theta));
    let g = geodesic_gradient(&r, &r_star)?;
    let measured = geodesic_distance(&r, &r_star);
    let (lo, hi) = GEODESIC_FD_RANGE;
    let fd_dev = if (lo..=hi).contains(&theta) {
        let fd = finite_difference_jacobian(
            |x: &[f64]| Ok::<_, crate::error::RotjacError>(vec![geodesic_loss_ambient(&Mat3::from_slice(x), &r_star)]),
            r.matrix().as_row_major(),
            FD_STEP,
        )?;
        Some((0..9).map(|k| (fd[(0, k)] - g.as_row_major()[k]).abs()).fold(0.0, f64::max))
    } else {
        None
    };
    Ok(GeodesicTrial { theta, norm: g.frobenius_norm(), formula: 3f64.sqrt() / (2.0 * measured.sin()), fd_dev })
}

/// Monte-Carlo gradient information retention: `Σ‖Jᵀg‖² / Σ‖g‖²` over
/// standard Gaussian `g`, with a paired-ratio standard error.
pub fn gir_monte_carlo(j: &DenseMatrix<f64>, samples: usize, seed: u64, parallelism: usize) -> SummaryStats {
    let pairs = parallel_map(parallelism.max(1), samples, |i| {
        let mut s = RngStream::for_key(&[seed, 0, i as u64]);
        let g: Vec<f64> = (0..j.rows()).map(|_| s.standard_normal()).collect();
        let back = j.transpose_mul_vec(&g);
        (
            pairwise_sum(&back.iter().map(|x| x * x).collect::<Vec<_>>()),
            pairwise_sum(&g.iter().map(|x| x * x).collect::<Vec<_>>()),
        )
    });
    let num: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let den: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    SummaryStats::ratio("gir_monte_carlo", None, &num, &den)
}
