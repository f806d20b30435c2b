use crate::error::Result;
use crate::sampling::{perturbed_matrix, random_rotation};
use crate::so3::{geodesic_distance, gram_schmidt, svdo_plus, SixDParams};

use super::{
    collect_results, enforce_skip_limit, quantile, ExperimentConfig, ExperimentReport, RecordTable, SummaryStats,
};

/// One-degree bins over [0°, 180°].
pub const HISTOGRAM_BINS: usize = 180;

#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateRow {
    pub sigma: f64,
    pub svd: SummaryStats,
    pub gs: SummaryStats,
    pub svd_max: f64,
    /// Gram-Schmidt inconsistency quantiles at 10, 25, 50, 75, 90%.
    pub gs_quantiles: [f64; 5],
    pub svd_histogram: Vec<u64>,
    pub gs_histogram: Vec<u64>,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateDependence {
    pub rows: Vec<CoordinateRow>,
}

pub const QUANTILE_LEVELS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

fn histogram(angles: &[f64]) -> Vec<u64> {
    let mut h = vec![0u64; HISTOGRAM_BINS];
    for a in angles {
        let bin = (a.to_degrees().floor() as usize).min(HISTOGRAM_BINS - 1);
        h[bin] += 1;
    }
    h
}

/// Inconsistency angle `d(g(M R2) R2ᵀ, g(M))` in radians for the SVD
/// projection and Gram-Schmidt, with a fresh Haar `R2` per draw.
pub fn coordinate_dependence(cfg: &ExperimentConfig) -> Result<CoordinateDependence> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for (j, &sigma) in cfg.sigmas.iter().enumerate() {
        let draws = collect_results(cfg.map_samples(j, |mut stream, _| {
            let r_star = random_rotation::<f64>(&mut stream);
            let m = perturbed_matrix(&r_star, sigma, &mut stream);
            let r2 = random_rotation::<f64>(&mut stream);
            let mr2 = m * *r2.matrix();
            let svd = geodesic_distance(&svdo_plus(&mr2)?.compose(&r2.transpose()), &svdo_plus(&m)?);
            let gs = match (gram_schmidt(&SixDParams::from_columns(&mr2)), gram_schmidt(&SixDParams::from_columns(&m)))
            {
                (Ok(a), Ok(b)) => Some(geodesic_distance(&a.compose(&r2.transpose()), &b)),
                _ => None,
            };
            Ok((svd, gs))
        }))?;
        let kept: Vec<(f64, f64)> = draws.iter().filter_map(|&(s, g)| g.map(|g| (s, g))).collect();
        let skipped = draws.len() - kept.len();
        enforce_skip_limit("coordinate-dependence", skipped, draws.len())?;
        let svd: Vec<f64> = kept.iter().map(|p| p.0).collect();
        let gs: Vec<f64> = kept.iter().map(|p| p.1).collect();
        rows.push(CoordinateRow {
            sigma,
            svd: SummaryStats::from_samples("svd_inconsistency_rad", Some(sigma), &svd),
            gs: SummaryStats::from_samples("gs_inconsistency_rad", Some(sigma), &gs),
            svd_max: svd.iter().copied().fold(0.0, f64::max),
            gs_quantiles: QUANTILE_LEVELS.map(|q| quantile(&gs, q)),
            svd_histogram: histogram(&svd),
            gs_histogram: histogram(&gs),
            skipped,
        });
    }
    Ok(CoordinateDependence { rows })
}

impl ExperimentReport for CoordinateDependence {
    /// Histogram rows, one per (σ, 1° bin).
    fn records(&self) -> RecordTable {
        let mut t = RecordTable::new(&["sigma", "bin_start_deg", "bin_end_deg", "svd_count", "gs_count"]);
        for r in &self.rows {
            for b in 0..HISTOGRAM_BINS {
                t.push(vec![
                    r.sigma.into(),
                    (b as f64).into(),
                    ((b + 1) as f64).into(),
                    r.svd_histogram[b].into(),
                    r.gs_histogram[b].into(),
                ]);
            }
        }
        t
    }

    fn summary(&self) -> Vec<SummaryStats> {
        let mut out = Vec::new();
        for r in &self.rows {
            let s = Some(r.sigma);
            out.push(r.svd.clone());
            out.push(r.gs.clone());
            out.push(SummaryStats::single("svd_inconsistency_max_rad", s, r.svd_max));
            for (q, v) in QUANTILE_LEVELS.iter().zip(r.gs_quantiles) {
                out.push(SummaryStats::single(&format!("gs_inconsistency_q{:02}_rad", (q * 100.0) as u32), s, v));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat3;
    use crate::sampling::RngStream;

    #[test]
    fn svd_is_coordinate_free_and_gs_is_not() {
        let r = &coordinate_dependence(&ExperimentConfig::new(vec![0.5], 500, 2)).unwrap().rows[0];
        assert!(r.svd_max < 1e-8);
        assert!(r.gs_quantiles[2] > 0.1);
        assert_eq!(r.svd_histogram[0], 500);
    }

    #[test]
    fn identity_frame_change_is_exact() {
        let mut s = RngStream::from_seed(4);
        let r_star = random_rotation::<f64>(&mut s);
        let m = perturbed_matrix(&r_star, 0.5, &mut s);
        let mi = m * Mat3::identity();
        assert_eq!(mi, m);
        let i = crate::so3::RotationMatrix::identity();
        assert_eq!(geodesic_distance(&svdo_plus(&mi).unwrap().compose(&i), &svdo_plus(&m).unwrap()), 0.0);
        let g = gram_schmidt(&SixDParams::from_columns(&m)).unwrap();
        assert_eq!(geodesic_distance(&g.compose(&i), &g), 0.0);
    }
}
