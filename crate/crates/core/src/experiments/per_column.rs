use crate::error::Result;
use crate::sampling::{perturbed_matrix, random_rotation};
use crate::so3::{gram_schmidt, svdo_plus};

use super::{
    collect_results, enforce_skip_limit, gs_params, ExperimentConfig, ExperimentReport, RecordTable, SummaryStats,
};

/// Squared per-column errors of one sample: (Gram-Schmidt, SVD).
type ColumnErrors = ([f64; 3], [f64; 3]);

#[derive(Debug, Clone, PartialEq)]
pub struct PerColumnRow {
    pub sigma: f64,
    /// RMS of `‖column_k(GS(M)) − column_k(R*)‖`, k = 1, 2, 3.
    pub gs: [SummaryStats; 3],
    pub svd: [SummaryStats; 3],
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerColumnError {
    pub rows: Vec<PerColumnRow>,
}

/// Per-column RMS error of Gram-Schmidt and the SVD projection.
pub fn per_column_error(cfg: &ExperimentConfig) -> Result<PerColumnError> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for (j, &sigma) in cfg.sigmas.iter().enumerate() {
        let draws = collect_results(cfg.map_samples(j, |mut stream, _| {
            let r_star = random_rotation::<f64>(&mut stream);
            let m = perturbed_matrix(&r_star, sigma, &mut stream);
            let svd = *svdo_plus(&m)?.matrix();
            let p = gs_params(cfg.gs_input, &m, &r_star, sigma, &mut stream);
            let truth = r_star.matrix();
            let col_sq = |r: &crate::linalg::Mat3<f64>| [0, 1, 2].map(|k| (r.col(k) - truth.col(k)).norm_squared());
            Ok(gram_schmidt(&p).ok().map(|g| (col_sq(g.matrix()), col_sq(&svd))))
        }))?;
        let kept: Vec<_> = draws.iter().flatten().collect();
        let skipped = draws.len() - kept.len();
        enforce_skip_limit("per-column", skipped, draws.len())?;
        let column = |pick: fn(&ColumnErrors) -> [f64; 3], name: &str, k: usize| {
            let sq: Vec<f64> = kept.iter().map(|d| pick(d)[k]).collect();
            SummaryStats::rms(&format!("{name}_rms_col{}", k + 1), Some(sigma), &sq)
        };
        rows.push(PerColumnRow {
            sigma,
            gs: [0, 1, 2].map(|k| column(|d| d.0, "gs", k)),
            svd: [0, 1, 2].map(|k| column(|d| d.1, "svd", k)),
            skipped,
        });
    }
    Ok(PerColumnError { rows })
}

impl ExperimentReport for PerColumnError {
    fn records(&self) -> RecordTable {
        let mut t = RecordTable::new(&["sigma", "projector", "column", "rms", "std_error", "samples"]);
        for r in &self.rows {
            for (name, stats) in [("gs", &r.gs), ("svd", &r.svd)] {
                for (k, s) in stats.iter().enumerate() {
                    t.push(vec![
                        r.sigma.into(),
                        name.into(),
                        (k + 1).into(),
                        s.mean.into(),
                        s.std_error.into(),
                        s.n.into(),
                    ]);
                }
            }
        }
        t
    }

    fn summary(&self) -> Vec<SummaryStats> {
        self.rows.iter().flat_map(|r| r.gs.iter().chain(r.svd.iter()).cloned()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gs_first_column_is_most_accurate() {
        let r = &per_column_error(&ExperimentConfig::new(vec![0.5], 4000, 8)).unwrap().rows[0];
        assert!(r.gs[0].mean < r.gs[2].mean);
        for k in 0..3 {
            assert!(r.svd[k].mean < r.gs[k].mean);
        }
    }
}
