//! Seeded Monte-Carlo harnesses that measure what the closed forms in
//! [`crate::analysis`] predict.
//!
//! Sample `i` of sub-experiment `j` (usually the index into the σ list)
//! draws from `RngStream::for_key(&[master_seed, j, i])`, so results do not
//! depend on thread count or scheduling. Per-sample results are collected in
//! index order and reduced by a fixed pairwise tree.

mod checks;
mod convergence;
mod coordinate;
mod geodesic_map;
mod kappa;
mod per_column;
mod projection;
mod scatter;
mod stats;

pub use checks::{
    geodesic_gradient_trial, gir_monte_carlo, jacobian_check, sample_check_matrix, sample_check_params, GeodesicTrial,
    JacobianCheck, JacobianTrial, FD_STEP, GEODESIC_FD_RANGE,
};
pub use convergence::{convergence_race, ConvergenceConfig, ConvergenceRace, RaceOutcome, RaceStep};
pub use coordinate::{coordinate_dependence, CoordinateDependence, CoordinateRow, HISTOGRAM_BINS};
pub use geodesic_map::{geodesic_singularity_map, GeodesicMap, GeodesicPoint, DEFAULT_S3_GRID, DEFAULT_THETA_GRID};
pub use kappa::{kappa_table, KappaRow, KappaTable};
pub use per_column::{per_column_error, PerColumnError, PerColumnRow};
pub use projection::{projection_error, ProjectionError, ProjectionRow, ProjectionSample};
pub use scatter::{gradient_scatter, GradientScatter, ScatterRow, ScatterSample};
pub use stats::{pairwise_sum, quantile, SummaryStats};

use rayon::prelude::*;

use crate::error::{Result, RotjacError};
use crate::linalg::{Mat3, Vec3};
use crate::sampling::RngStream;
use crate::so3::{RotationMatrix, SixDParams};

/// How Gram-Schmidt inputs are formed from a noisy prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GsInputMode {
    /// First two columns of the same perturbed 3×3 matrix the SVD sees.
    #[default]
    ExtractedColumns,
    /// First two columns of `R*` plus six fresh noise draws, independent of
    /// the 3×3 noise.
    SixEntryNoise,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub sigmas: Vec<f64>,
    pub samples: usize,
    pub master_seed: u64,
    /// Worker threads; results are identical for every value.
    pub parallelism: usize,
    pub gs_input: GsInputMode,
}

impl ExperimentConfig {
    pub fn new(sigmas: Vec<f64>, samples: usize, master_seed: u64) -> Self {
        Self { sigmas, samples, master_seed, parallelism: 1, gs_input: GsInputMode::default() }
    }

    pub fn with_parallelism(mut self, parallelism: usize) -> Self {
        self.parallelism = parallelism;
        self
    }

    pub fn with_gs_input(mut self, mode: GsInputMode) -> Self {
        self.gs_input = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(RotjacError::DomainError("samples must be at least 1".into()));
        }
        if self.parallelism == 0 {
            return Err(RotjacError::DomainError("parallelism must be at least 1".into()));
        }
        if self.sigmas.is_empty() {
            return Err(RotjacError::DomainError("at least one sigma is required".into()));
        }
        if let Some(s) = self.sigmas.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(RotjacError::DomainError(format!("sigma {s} must be finite and nonnegative")));
        }
        Ok(())
    }

    pub(crate) fn stream(&self, sub: usize, sample: usize) -> RngStream {
        RngStream::for_key(&[self.master_seed, sub as u64, sample as u64])
    }

    /// Evaluates `f(sub, i)` for every sample of sub-experiment `sub`, in
    /// index order.
    pub(crate) fn map_samples<R, F>(&self, sub: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(RngStream, usize) -> R + Sync + Send,
    {
        parallel_map(self.parallelism, self.samples, |i| f(self.stream(sub, i), i))
    }
}

/// `(0..n).map(f)` on a pool of `threads` workers, results in index order.
pub(crate) fn parallel_map<R, F>(threads: usize, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    if threads <= 1 {
        return (0..n).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}

/// Fails when more than 1% of `total` draws were skipped.
pub fn enforce_skip_limit(experiment: &str, skipped: usize, total: usize) -> Result<()> {
    if skipped * 100 > total {
        return Err(RotjacError::SkipFractionExceeded { experiment: experiment.into(), skipped, total });
    }
    Ok(())
}

/// One cell of a record table.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Int(u64),
    Flag(bool),
    Text(String),
    /// No value, e.g. a gradient at a flagged degenerate sample.
    Missing,
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as u64)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Flag(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.into())
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(x: Option<T>) -> Self {
        x.map_or(Value::Missing, Into::into)
    }
}

/// Named columns and rows of values, in emission order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RecordTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl RecordTable {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// What every harness exposes for emission.
pub trait ExperimentReport {
    fn records(&self) -> RecordTable;
    fn summary(&self) -> Vec<SummaryStats>;
}

pub(crate) fn six_entry_params(r_star: &RotationMatrix<f64>, sigma: f64, stream: &mut RngStream) -> SixDParams<f64> {
    let m = r_star.matrix();
    let mut noisy = |c: usize| {
        let col = m.col(c);
        let n = Vec3::new(stream.standard_normal(), stream.standard_normal(), stream.standard_normal());
        col + n.scale(sigma)
    };
    let t1 = noisy(0);
    let t2 = noisy(1);
    SixDParams::new(t1, t2)
}

/// Gram-Schmidt inputs for the configured mode; call after drawing `m`.
pub(crate) fn gs_params(
    mode: GsInputMode,
    m: &Mat3<f64>,
    r_star: &RotationMatrix<f64>,
    sigma: f64,
    stream: &mut RngStream,
) -> SixDParams<f64> {
    match mode {
        GsInputMode::ExtractedColumns => SixDParams::from_columns(m),
        GsInputMode::SixEntryNoise => six_entry_params(r_star, sigma, stream),
    }
}

/// First error in index order, or the unwrapped values.
pub(crate) fn collect_results<R>(items: Vec<Result<R>>) -> Result<Vec<R>> {
    items.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_preserves_order() {
        let a = parallel_map(1, 1000, |i| i * i);
        let b = parallel_map(7, 1000, |i| i * i);
        assert_eq!(a, b);
    }

    #[test]
    fn skip_limit() {
        assert!(enforce_skip_limit("x", 10, 1000).is_ok());
        assert!(matches!(enforce_skip_limit("x", 11, 1000), Err(RotjacError::SkipFractionExceeded { .. })));
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::new(vec![0.1], 10, 1).validate().is_ok());
        assert!(ExperimentConfig::new(vec![], 10, 1).validate().is_err());
        assert!(ExperimentConfig::new(vec![-0.1], 10, 1).validate().is_err());
        assert!(ExperimentConfig::new(vec![0.1], 0, 1).validate().is_err());
        assert!(ExperimentConfig::new(vec![0.1], 1, 1).with_parallelism(0).validate().is_err());
    }
}
