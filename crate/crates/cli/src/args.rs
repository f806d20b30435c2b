use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "rotjac", version, about = "Jacobian checks and Monte-Carlo experiments for projections onto SO(3)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare analytic Jacobians with central finite differences.
    JacobianCheck(JacobianCheckArgs),
    /// Closed-form Jacobian spectrum of the SVD projection at one matrix.
    Spectrum(SpectrumArgs),
    /// Gradient information retention, closed form and Monte-Carlo.
    Gir(GirArgs),
    /// Expected Jacobian condition number under isotropic noise.
    KappaTable(SampledArgs),
    /// Mean squared projection error of SVD, Gram-Schmidt and the raw matrix.
    ProjectionError(SampledArgs),
    /// Frame-change inconsistency of SVD and Gram-Schmidt.
    CoordinateDependence(SampledArgs),
    /// Per-column RMS error of SVD and Gram-Schmidt.
    PerColumn(SampledArgs),
    /// Gradients with respect to the (1,1) input versus the (1,1) error.
    GradientScatter(SampledArgs),
    /// Gradient descent through the SVD projection versus direct regression.
    Convergence(ConvergenceArgs),
    /// Geodesic-loss gradient through the SVD projection on a (θ, s3) grid.
    GeodesicMap(GeodesicMapArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::JacobianCheck(_) => "jacobian-check",
            Command::Spectrum(_) => "spectrum",
            Command::Gir(_) => "gir",
            Command::KappaTable(_) => "kappa-table",
            Command::ProjectionError(_) => "projection-error",
            Command::CoordinateDependence(_) => "coordinate-dependence",
            Command::PerColumn(_) => "per-column",
            Command::GradientScatter(_) => "gradient-scatter",
            Command::Convergence(_) => "convergence",
            Command::GeodesicMap(_) => "geodesic-map",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::JacobianCheck(a) => &a.common,
            Command::Spectrum(a) => &a.common,
            Command::Gir(a) => &a.common,
            Command::KappaTable(a)
            | Command::ProjectionError(a)
            | Command::CoordinateDependence(a)
            | Command::PerColumn(a)
            | Command::GradientScatter(a) => &a.common,
            Command::Convergence(a) => &a.common,
            Command::GeodesicMap(a) => &a.common,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum GsInput {
    /// First two columns of the noisy 3×3 matrix.
    #[default]
    Extracted,
    /// Independent noise on the six Gram-Schmidt entries.
    SixEntry,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Master seed; falls back to ROTJAC_SEED, then to a random seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: available cores). Output does not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub parallelism: Option<u64>,
    /// Record file; a CSV run also writes `<out>.manifest.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Also render an SVG figure here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct JacobianCheckArgs {
    /// Random matrices (and as many Gram-Schmidt inputs) to check.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Nine comma-separated reals, row-major.
    #[arg(long, value_parser = parse_matrix, allow_hyphen_values = true)]
    pub matrix: [f64; 9],
    /// Accept repeated singular values (only the gap δ(M) is checked).
    #[arg(long)]
    pub gap_only: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GirArgs {
    /// Nine comma-separated reals, row-major (default: identity).
    #[arg(long, value_parser = parse_matrix, allow_hyphen_values = true)]
    pub matrix: Option<[f64; 9]>,
    /// Gaussian gradients for the Monte-Carlo estimate.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SampledArgs {
    /// Single noise level.
    #[arg(long, conflicts_with = "sigmas")]
    pub sigma: Option<f64>,
    /// Comma-separated noise levels (default depends on the command).
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,
    /// Samples per noise level (default depends on the command).
    #[arg(long)]
    pub samples: Option<usize>,
    /// How Gram-Schmidt inputs are formed from the noisy prediction.
    #[arg(long, value_enum, default_value_t)]
    pub gs_input: GsInput,
    #[command(flatten)]
    pub common: Common,
}

impl SampledArgs {
    pub fn sigmas_or(&self, default: &[f64]) -> Vec<f64> {
        match (&self.sigma, &self.sigmas) {
            (Some(s), _) => vec![*s],
            (None, Some(list)) => list.clone(),
            (None, None) => default.to_vec(),
        }
    }
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    /// Initial singular values, descending.
    #[arg(long, value_parser = parse_triple, default_value = "3,1,0.1")]
    pub s0: [f64; 3],
    /// Step size through the SVD projection.
    #[arg(long, default_value_t = 0.3)]
    pub eta: f64,
    /// Step size of direct regression.
    #[arg(long, default_value_t = 0.49)]
    pub eta_direct: f64,
    /// Required shrink factor of each error component.
    #[arg(long, default_value_t = 100.0)]
    pub target: f64,
    /// Initial rotation error, as a rotation vector in the right singular frame.
    #[arg(long, value_parser = parse_triple, default_value = "1e-6,1e-6,1e-6", allow_hyphen_values = true)]
    pub offset: [f64; 3],
    /// Give up after this many steps.
    #[arg(long, default_value_t = 10_000)]
    pub max_iterations: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GeodesicMapArgs {
    /// Comma-separated rotation angles θ in radians.
    #[arg(long, value_delimiter = ',')]
    pub theta_grid: Option<Vec<f64>>,
    /// Comma-separated smallest singular values s3.
    #[arg(long, value_delimiter = ',')]
    pub s3_grid: Option<Vec<f64>>,
    #[command(flatten)]
    pub common: Common,
}

fn parse_reals<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got {}", parts.len()));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        let x: f64 = p.parse().map_err(|e| format!("{p:?}: {e}"))?;
        if !x.is_finite() {
            return Err(format!("{p:?} is not finite"));
        }
        *o = x;
    }
    Ok(out)
}

pub fn parse_matrix(s: &str) -> Result<[f64; 9], String> {
    parse_reals::<9>(s)
}

pub fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    parse_reals::<3>(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_literal() {
        assert_eq!(parse_matrix("3,0,0,0,2,0,0,0,1").unwrap(), [3.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(parse_matrix("1,2,3").is_err());
        assert!(parse_matrix("1,2,3,4,5,6,7,8,x").is_err());
        assert!(parse_triple("1, -2, NaN").is_err());
    }

    #[test]
    fn unknown_flags_are_rejected() {
        assert!(Cli::try_parse_from(["rotjac", "spectrum", "--matrix", "1,0,0,0,1,0,0,0,1", "--bogus"]).is_err());
        assert!(Cli::try_parse_from(["rotjac", "kappa-table", "--sigma", "0.1", "--sigmas", "0.1,0.2"]).is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
