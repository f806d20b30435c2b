use crate::error::Result;
use crate::jacobians::{gs_jacobian, svd_backward};
use crate::sampling::{perturbed_matrix, random_rotation};
use crate::so3::{gram_schmidt, singular_value_gap, svdo_plus};

use super::{
    collect_results, enforce_skip_limit, gs_params, ExperimentConfig, ExperimentReport, RecordTable, SummaryStats,
};

/// Gradients with respect to the (1,1) input parameter at one draw.
/// Gradients are `None` where a Jacobian was rejected as degenerate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterSample {
    pub sigma: f64,
    pub index: usize,
    /// `M₁₁ − R*₁₁`.
    pub error: f64,
    /// `t1ₓ − R*₁₁`; equals `error` unless the Gram-Schmidt input has its own noise.
    pub gs_error: f64,
    pub grad_direct: f64,
    pub grad_svd: Option<f64>,
    pub grad_gs: Option<f64>,
    /// Singular value gap δ(M).
    pub delta: f64,
}

impl ScatterSample {
    pub fn degenerate(&self) -> bool {
        self.grad_svd.is_none() || self.grad_gs.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterRow {
    pub sigma: f64,
    /// Fraction of draws whose gradient sign differs from the error sign.
    pub svd_sign_disagreement: SummaryStats,
    pub gs_sign_disagreement: SummaryStats,
    pub degenerate: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientScatter {
    pub rows: Vec<ScatterRow>,
    pub samples: Vec<ScatterSample>,
}

fn disagrees(grad: f64, err: f64) -> bool {
    grad.signum() != err.signum()
}

/// Gradient of each loss with respect to the (1,1) input versus the (1,1)
/// error: direct `‖M − R*‖²`, through the SVD projection, and through
/// Gram-Schmidt.
pub fn gradient_scatter(cfg: &ExperimentConfig) -> Result<GradientScatter> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    for (j, &sigma) in cfg.sigmas.iter().enumerate() {
        let batch = collect_results(cfg.map_samples(j, |mut stream, index| {
            let r_star = random_rotation::<f64>(&mut stream);
            let m = perturbed_matrix(&r_star, sigma, &mut stream);
            let p = gs_params(cfg.gs_input, &m, &r_star, sigma, &mut stream);
            let truth = *r_star.matrix();
            let error = m[(0, 0)] - truth[(0, 0)];
            let r = svdo_plus(&m)?;
            let grad_svd = svd_backward(&m, &(*r.matrix() - truth).scale(2.0)).ok().map(|g| g[(0, 0)]);
            let grad_gs = match (gram_schmidt(&p), gs_jacobian(&p)) {
                (Ok(g), Ok(jac)) => Some(jac.apply_transpose(&(*g.matrix() - truth).scale(2.0))[0]),
                _ => None,
            };
            Ok(ScatterSample {
                sigma,
                index,
                error,
                gs_error: p.t1.x - truth[(0, 0)],
                grad_direct: 2.0 * error,
                grad_svd,
                grad_gs,
                delta: singular_value_gap(&m)?,
            })
        }))?;
        let ok: Vec<&ScatterSample> = batch.iter().filter(|s| !s.degenerate()).collect();
        let degenerate = batch.len() - ok.len();
        enforce_skip_limit("gradient-scatter", degenerate, batch.len())?;
        let svd_hits = ok.iter().filter(|s| disagrees(s.grad_svd.unwrap_or(0.0), s.error)).count();
        let gs_hits = ok.iter().filter(|s| disagrees(s.grad_gs.unwrap_or(0.0), s.gs_error)).count();
        rows.push(ScatterRow {
            sigma,
            svd_sign_disagreement: SummaryStats::proportion("svd_sign_disagreement", Some(sigma), svd_hits, ok.len()),
            gs_sign_disagreement: SummaryStats::proportion("gs_sign_disagreement", Some(sigma), gs_hits, ok.len()),
            degenerate,
        });
        samples.extend(batch);
    }
    Ok(GradientScatter { rows, samples })
}

impl ExperimentReport for GradientScatter {
    fn records(&self) -> RecordTable {
        let mut t = RecordTable::new(&[
            "sigma",
            "sample_index",
            "error",
            "gs_error",
            "grad_direct",
            "grad_svd",
            "grad_gs",
            "delta",
            "degenerate",
        ]);
        for s in &self.samples {
            t.push(vec![
                s.sigma.into(),
                s.index.into(),
                s.error.into(),
                s.gs_error.into(),
                s.grad_direct.into(),
                s.grad_svd.into(),
                s.grad_gs.into(),
                s.delta.into(),
                s.degenerate().into(),
            ]);
        }
        t
    }

    fn summary(&self) -> Vec<SummaryStats> {
        self.rows.iter().flat_map(|r| [r.svd_sign_disagreement.clone(), r.gs_sign_disagreement.clone()]).collect()
    }
}
