use crate::analysis::projection_error_prediction;
use crate::error::Result;
use crate::sampling::{perturbed_matrix, random_rotation};
use crate::so3::{frobenius_loss, gram_schmidt, svdo_plus};

use super::{
    collect_results, enforce_skip_limit, gs_params, ExperimentConfig, ExperimentReport, RecordTable, SummaryStats,
};

/// Squared Frobenius errors of one draw; `gs_err` is `None` when
/// Gram-Schmidt was undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionSample {
    pub sigma: f64,
    pub index: usize,
    pub svd_err: f64,
    pub gs_err: Option<f64>,
    pub raw_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionRow {
    pub sigma: f64,
    pub svd_mse: SummaryStats,
    pub gs_mse: SummaryStats,
    pub raw_mse: SummaryStats,
    pub gs_over_svd: SummaryStats,
    pub svd_over_raw: SummaryStats,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionError {
    pub rows: Vec<ProjectionRow>,
    pub samples: Vec<ProjectionSample>,
}

/// Mean squared distance to `R*` of the SVD projection, Gram-Schmidt, and
/// the raw matrix, for `M = R* + σN` with Haar-random `R*`.
pub fn projection_error(cfg: &ExperimentConfig) -> Result<ProjectionError> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    for (j, &sigma) in cfg.sigmas.iter().enumerate() {
        let batch = collect_results(cfg.map_samples(j, |mut stream, index| {
            let r_star = random_rotation::<f64>(&mut stream);
            let m = perturbed_matrix(&r_star, sigma, &mut stream);
            let svd_err = frobenius_loss(svdo_plus(&m)?.matrix(), &r_star);
            let p = gs_params(cfg.gs_input, &m, &r_star, sigma, &mut stream);
            let gs_err = gram_schmidt(&p).ok().map(|r| frobenius_loss(r.matrix(), &r_star));
            Ok(ProjectionSample { sigma, index, svd_err, gs_err, raw_err: frobenius_loss(&m, &r_star) })
        }))?;
        let kept: Vec<&ProjectionSample> = batch.iter().filter(|s| s.gs_err.is_some()).collect();
        let skipped = batch.len() - kept.len();
        enforce_skip_limit("projection-error", skipped, batch.len())?;
        let svd: Vec<f64> = kept.iter().map(|s| s.svd_err).collect();
        let gs: Vec<f64> = kept.iter().filter_map(|s| s.gs_err).collect();
        let raw: Vec<f64> = kept.iter().map(|s| s.raw_err).collect();
        let pred = projection_error_prediction(sigma);
        let s = Some(sigma);
        rows.push(ProjectionRow {
            sigma,
            svd_mse: SummaryStats::from_samples("svd_mse", s, &svd).with_prediction(pred.svd_mse),
            gs_mse: SummaryStats::from_samples("gs_mse", s, &gs).with_prediction(pred.gs_mse),
            raw_mse: SummaryStats::from_samples("raw_mse", s, &raw).with_prediction(pred.raw_mse),
            gs_over_svd: SummaryStats::ratio("gs_over_svd", s, &gs, &svd).with_prediction(2.0),
            svd_over_raw: SummaryStats::ratio("svd_over_raw", s, &svd, &raw).with_prediction(1.0 / 3.0),
            skipped,
        });
        samples.extend(batch);
    }
    Ok(ProjectionError { rows, samples })
}

impl ExperimentReport for ProjectionError {
    fn records(&self) -> RecordTable {
        let mut t = RecordTable::new(&["sigma", "sample_index", "svd_sq_error", "gs_sq_error", "raw_sq_error"]);
        for s in &self.samples {
            t.push(vec![s.sigma.into(), s.index.into(), s.svd_err.into(), s.gs_err.into(), s.raw_err.into()]);
        }
        t
    }

    fn summary(&self) -> Vec<SummaryStats> {
        self.rows
            .iter()
            .flat_map(|r| [&r.svd_mse, &r.gs_mse, &r.raw_mse, &r.gs_over_svd, &r.svd_over_raw].map(Clone::clone))
            .collect()
    }
}
