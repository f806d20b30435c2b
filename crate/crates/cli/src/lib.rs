//! The `rotjac` command-line tool: argument parsing, experiment dispatch,
//! CSV/JSON/SVG output and exit codes.

pub mod args;
pub mod commands;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use rotjac_core::RotjacError;

use crate::args::{Cli, Command, Format};
use crate::commands::Outcome;
use crate::output::{Assertion, Manifest, Status};

/// Exit code for invalid arguments or inputs outside a formula's domain.
pub const EXIT_USAGE: i32 = 1;
/// Exit code for numerical or I/O failures.
pub const EXIT_FAILURE: i32 = 2;
/// Exit code when a built-in assertion fails.
pub const EXIT_ASSERTION: i32 = 3;

pub const SEED_ENV: &str = "ROTJAC_SEED";

#[derive(Debug)]
enum RunError {
    Usage(String),
    Core(RotjacError),
    Io(PathBuf, io::Error),
}

impl RunError {
    fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) | RunError::Core(RotjacError::DomainError(_)) => EXIT_USAGE,
            RunError::Core(_) | RunError::Io(..) => EXIT_FAILURE,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(m) => f.write_str(m),
            RunError::Core(e) => write!(f, "{e}"),
            RunError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl From<RotjacError> for RunError {
    fn from(e: RotjacError) -> Self {
        RunError::Core(e)
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_to(args, &mut io::stdout().lock())
}

/// [`run`] with the report written to `stdout` instead of the process's.
pub fn run_to<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(&cli.command, stdout) {
        Ok(passed) if passed => 0,
        Ok(_) => EXIT_ASSERTION,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn resolve_seed(explicit: Option<u64>) -> Result<(u64, &'static str), RunError> {
    if let Some(s) = explicit {
        return Ok((s, "flag"));
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(|s| (s, "environment"))
            .map_err(|_| RunError::Usage(format!("{SEED_ENV}={v:?} is not an unsigned 64-bit integer"))),
        Err(_) => Ok((rand::random(), "random")),
    }
}

fn now_unix() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.parse().ok()) {
        return t;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn dispatch(cmd: &Command, seed: u64, parallelism: usize) -> rotjac_core::Result<Outcome> {
    match cmd {
        Command::JacobianCheck(a) => commands::jacobian_check(a, seed, parallelism),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Gir(a) => commands::gir(a, seed, parallelism),
        Command::KappaTable(a) => commands::kappa_table(a, seed, parallelism),
        Command::ProjectionError(a) => commands::projection_error(a, seed, parallelism),
        Command::CoordinateDependence(a) => commands::coordinate_dependence(a, seed, parallelism),
        Command::PerColumn(a) => commands::per_column(a, seed, parallelism),
        Command::GradientScatter(a) => commands::gradient_scatter(a, seed, parallelism),
        Command::Convergence(a) => commands::convergence(a, seed),
        Command::GeodesicMap(a) => commands::geodesic_map(a, seed),
    }
}

/// Six decimals, or scientific notation for values that would print as zero.
fn short(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:.3e}")
    } else {
        format!("{x:.6}")
    }
}

fn print_outcome(out: &Outcome, w: &mut dyn Write) {
    for line in &out.report {
        let _ = writeln!(w, "{line}");
    }
    for s in &out.summary {
        let sigma = s.sigma.map_or(String::new(), |x| format!(" σ={x}"));
        let _ = write!(w, "{}{sigma}: {} ± {:.2e} (n={})", s.metric, short(s.mean), s.std_error, s.n);
        if let Some(p) = s.prediction {
            let _ = write!(w, ", predicted {}", short(p));
        }
        if let Some(r) = s.rel_err {
            let _ = write!(w, ", rel err {r:.4}");
        }
        let _ = writeln!(w);
    }
    for a in &out.assertions {
        let tag = match a.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NotApplicable => "N/A ",
        };
        let _ = writeln!(w, "[{tag}] {}: {}", a.name, a.detail);
    }
}

fn manifest_path(out: &std::path::Path) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn execute(cmd: &Command, stdout: &mut dyn Write) -> Result<bool, RunError> {
    let common = cmd.common();
    let (seed, seed_source) = resolve_seed(common.seed)?;
    eprintln!("rotjac {}: master seed {seed} ({seed_source})", cmd.name());
    let parallelism = common.parallelism.map_or_else(default_parallelism, |p| p as usize);
    let started = now_unix();
    let outcome = dispatch(cmd, seed, parallelism)?;
    let finished = now_unix();
    print_outcome(&outcome, stdout);
    let passed = outcome.assertions.iter().all(|a: &Assertion| a.status != Status::Fail);

    if let Some(path) = &common.out {
        let manifest = Manifest {
            tool: "rotjac",
            version: env!("CARGO_PKG_VERSION"),
            command: cmd.name(),
            config: &outcome.config,
            master_seed: seed,
            seed_source,
            started_unix: started,
            finished_unix: finished,
            summary: &outcome.summary,
            assertions: &outcome.assertions,
            passed,
        };
        let io_err = |p: &std::path::Path| {
            let p = p.to_path_buf();
            move |e| RunError::Io(p, e)
        };
        match common.format {
            Format::Csv => {
                output::write_csv(&outcome.records, path).map_err(io_err(path))?;
                let mp = manifest_path(path);
                output::write_manifest(&manifest, &mp).map_err(io_err(&mp))?;
            }
            Format::Json => output::write_json(&outcome.records, &manifest, path).map_err(io_err(path))?,
        }
    }
    if let Some(path) = &common.svg {
        match &outcome.plot {
            Some(plot) => svg::render_svg(plot, path).map_err(|e| RunError::Io(path.clone(), e))?,
            None => eprintln!("note: {} has no figure; --svg ignored", cmd.name()),
        }
    }
    Ok(passed)
}
