//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if
//! any criterion fails. Runs with `cargo test -p rotjac-validation --test acceptance`.

use std::time::{Duration, Instant};

use rotjac_core::experiments::{self as ex, ConvergenceConfig, ExperimentConfig};
use rotjac_core::jacobians::{svd_jacobian_with, SpectrumGuard};
use rotjac_core::{
    gram_schmidt, gs_jacobian, svd3, svd_jacobian, Mat3d, RngStream, Rotation3d, RotjacError, SixDParamsd, Vec3d,
};

const SEED: u64 = 20_240_601;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn jacobian_exactness() -> Verdict {
    let start = Instant::now();
    let check = ex::jacobian_check(1000, SEED, threads()).expect("jacobian check runs");
    let took = start.elapsed();
    let (svd, gs) = (check.svd_max_dev(), check.gs_max_dev());
    let mixed = check.trials.iter().any(|t| t.det_sign > 0) && check.trials.iter().any(|t| t.det_sign < 0);
    let min_gap = check.trials.iter().map(|t| t.delta).fold(f64::INFINITY, f64::min);
    verdict(
        svd < 1e-5 && gs < 1e-5 && mixed && min_gap >= 0.1 && took < Duration::from_secs(10),
        format!(
            "svd max dev {svd:.2e}, gs max dev {gs:.2e}, min δ {min_gap:.3}, both det signs: {mixed}, {}",
            secs(took)
        ),
    )
}

/// Largest deviation between the numerical singular values of the assembled
/// Jacobian at `m` and `{2/(sᵢ+sⱼ)} ∪ {0}⁶` built from the unsigned `s`.
fn unsigned_formula_dev(m: &Mat3d) -> f64 {
    let s = svd3(m).expect("svd").s;
    let mut want = vec![2.0 / (s[0] + s[1]), 2.0 / (s[0] + s[2]), 2.0 / (s[1] + s[2])];
    want.sort_by(|a, b| b.total_cmp(a));
    want.resize(9, 0.0);
    let got = numerical_spectrum(m);
    got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn numerical_spectrum(m: &Mat3d) -> Vec<f64> {
    svd_jacobian(m).expect("jacobian").as_dense().singular_values()
}

fn spectrum() -> Verdict {
    let (mut pos, mut neg, mut paired) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..1000u64 {
        let mut stream = RngStream::for_key(&[SEED, 3, i]);
        let m = ex::sample_check_matrix(&mut stream, i % 2 == 0).expect("sample");
        let dev = unsigned_formula_dev(&m);
        if m.det() > 0.0 {
            pos = pos.max(dev);
        } else {
            neg = neg.max(dev);
        }
        let flipped = m * Mat3d::diag([1.0, 1.0, -1.0]);
        let (a, b) = (numerical_spectrum(&m), numerical_spectrum(&flipped));
        paired = paired.max(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
    }
    verdict(
        pos < 1e-9 && neg < 1e-9 && paired < 1e-9,
        format!("max dev from {{2/(si+sj)}}: det>0 {pos:.2e}, det<0 {neg:.2e}; (M, M·diag(1,1,-1)) spectra differ by up to {paired:.2e}"),
    )
}

fn gir() -> Verdict {
    let mut stream = RngStream::for_key(&[SEED, 4, 0]);
    let r: Rotation3d = rotjac_core::random_rotation(&mut stream);
    let j = svd_jacobian_with(r.matrix(), SpectrumGuard::GapOnly).expect("jacobian");
    let exact = rotjac_core::analysis::gradient_info_retention(&j);
    let mc = ex::gir_monte_carlo(j.as_dense(), 100_000, SEED, threads());
    let rel = (mc.mean - exact).abs() / exact;
    verdict(
        (exact - 1.0 / 3.0).abs() < 1e-9 && rel < 0.01,
        format!("analytic {exact:.12}, Monte-Carlo {:.5} ± {:.1e} (relative error {rel:.4})", mc.mean, mc.std_error),
    )
}

fn kappa() -> Verdict {
    let start = Instant::now();
    let cfg = ExperimentConfig::new(vec![0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0], 50_000, SEED).with_parallelism(threads());
    let table = ex::kappa_table(&cfg).expect("kappa table");
    let took = start.elapsed();
    let row = |s: f64| table.rows.iter().find(|r| r.sigma == s).expect("sigma row");
    let mut pass = took < Duration::from_secs(60);
    let mut parts = Vec::new();
    for (s, limit) in [(0.05, 0.01), (0.1, 0.01), (0.2, 0.006), (0.3, 0.01)] {
        let rel = row(s).kappa.rel_err.unwrap_or(f64::NAN);
        pass &= rel <= limit;
        parts.push(format!("σ={s}: {:.4} (rel {rel:.4})", row(s).kappa.mean));
    }
    for (s, reference) in [(0.5, 1.947), (0.7, 2.160)] {
        let rel = (row(s).kappa.mean - reference).abs() / reference;
        pass &= rel <= 0.03;
        parts.push(format!("σ={s}: {:.4} vs {reference}", row(s).kappa.mean));
    }
    parts.push(secs(took));
    verdict(pass, parts.join(", "))
}

fn projection() -> Verdict {
    let cfg = ExperimentConfig::new(vec![0.01, 0.05, 0.1], 5_000, SEED).with_parallelism(threads());
    let res = ex::projection_error(&cfg).expect("projection error");
    let row = |s: f64| res.rows.iter().find(|r| r.sigma == s).expect("sigma row");
    let svd_raw = row(0.01).svd_over_raw.mean;
    let mut pass = (0.31..=0.36).contains(&svd_raw);
    let mut parts = vec![format!("svd/raw at 0.01: {svd_raw:.4}")];
    for s in [0.01, 0.05, 0.1] {
        let g = row(s).gs_over_svd.mean;
        pass &= (1.9..=2.1).contains(&g);
        parts.push(format!("gs/svd at {s}: {g:.4}"));
    }
    verdict(pass, parts.join(", "))
}

fn coordinate() -> Verdict {
    let cfg = ExperimentConfig::new(vec![0.5], 10_000, SEED).with_parallelism(threads());
    let res = ex::coordinate_dependence(&cfg).expect("coordinate dependence");
    let r = &res.rows[0];
    let median = r.gs_quantiles[2];
    verdict(r.svd_max < 1e-8 && median > 0.1, format!("svd max {:.2e} rad, gs median {median:.4} rad", r.svd_max))
}

fn per_column() -> Verdict {
    let cfg = ExperimentConfig::new(vec![0.5], 50_000, SEED).with_parallelism(threads());
    let res = ex::per_column_error(&cfg).expect("per-column error");
    let r = &res.rows[0];
    let gap = |i: usize, j: usize| {
        (r.gs[j].mean - r.gs[i].mean) / (r.gs[i].std_error.powi(2) + r.gs[j].std_error.powi(2)).sqrt()
    };
    let (g12, g23) = (gap(0, 1), gap(1, 2));
    let svd = r.svd.each_ref().map(|s| s.mean);
    let gs = r.gs.each_ref().map(|s| s.mean);
    let pairwise = (0..3).all(|i| (0..3).all(|j| (svd[i] - svd[j]).abs() <= 0.02 * svd[i].min(svd[j])));
    let below = (0..3).all(|k| svd[k] < gs[k]);
    verdict(
        g12 > 3.0 && g23 > 3.0 && pairwise && below,
        format!("gs {gs:.4?} (gaps {g12:.1}, {g23:.1} SE), svd {svd:.4?}"),
    )
}

fn convergence() -> Verdict {
    let race = ex::convergence_race(&ConvergenceConfig::new([3.0, 1.0, 0.1], 0.3, 0.49, 100.0, SEED)).expect("race");
    let slowest = race.svd_outcome.iterations();
    let direct = race.direct_outcome.iterations();
    let pass = slowest.is_some_and(|n| (57..=61).contains(&n))
        && direct.is_some_and(|n| n <= 3)
        && race.direct_half_step_loss < 1e-20;
    verdict(
        pass,
        format!(
            "svd slowest component {slowest:?} iterations (want 59 ± 2; per pair (12, 13, 23) {:?}), direct {direct:?}, half-step loss {:.1e}",
            race.pair_iterations, race.direct_half_step_loss
        ),
    )
}

fn geodesic() -> Verdict {
    let mut norm = 0.0f64;
    let mut fd = 0.0f64;
    let mut fd_checked = 0;
    for (i, theta) in [0.01, 0.1, 1.0, 3.0].into_iter().enumerate() {
        let t = ex::geodesic_gradient_trial(theta, SEED, i).expect("trial");
        norm = norm.max((t.norm - t.formula).abs() / t.formula);
        if let Some(d) = t.fd_dev {
            fd = fd.max(d);
            fd_checked += 1;
        }
    }
    let map = ex::geodesic_singularity_map(&ex::DEFAULT_THETA_GRID, &ex::DEFAULT_S3_GRID).expect("map");
    let excess = map.max_bound_excess();
    verdict(
        norm < 1e-9 && fd < 1e-5 && excess <= 1e-9,
        format!(
            "norm rel dev {norm:.2e}, fd dev {fd:.2e} ({fd_checked} angles in the FD range), max norm − bound {excess:.3e} over {} points",
            map.points.len()
        ),
    )
}

fn degeneracy() -> Verdict {
    let mut stream = RngStream::for_key(&[SEED, 5, 0]);
    let (a, b): (Rotation3d, Rotation3d) =
        (rotjac_core::random_rotation(&mut stream), rotjac_core::random_rotation(&mut stream));
    let near = [
        Mat3d::diag([2.0, 2.0, 1.0]),
        Mat3d::diag([2.0, 2.0 + 5e-11, 0.5]),
        *a.matrix() * Mat3d::diag([1.5, 1.5 - 1e-11, 0.3]) * b.matrix().transpose(),
    ];
    let svd_ok = near.iter().all(|m| matches!(svd_jacobian(m), Err(RotjacError::NearDegenerateSpectrum { .. })));
    let t1 = Vec3d::new(1.0, 2.0, 3.0);
    let parallel = [SixDParamsd::new(t1, t1.scale(2.0)), SixDParamsd::new(t1, t1.scale(-0.5))];
    let gs_ok = parallel.iter().all(|p| {
        matches!(gram_schmidt(p), Err(RotjacError::DegenerateInput(_)))
            && matches!(gs_jacobian(p), Err(RotjacError::DegenerateInput(_)))
    });
    verdict(svd_ok && gs_ok, format!("svd near-degenerate rejected: {svd_ok}, parallel GS rejected: {gs_ok}"))
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().expect("tempdir");
    let run = |threads: &str| {
        let out = dir.path().join(format!("p{threads}.csv"));
        let args = ["rotjac", "projection-error", "--seed", "42", "--parallelism", threads, "--out"];
        let code =
            rotjac::run_to(args.iter().map(Into::into).chain([out.clone().into_os_string()]), &mut std::io::sink());
        (code, std::fs::read(&out).unwrap_or_default())
    };
    let (c1, a) = run("1");
    let (c8, b) = run("8");
    verdict(
        c1 == 0 && c8 == 0 && !a.is_empty() && a == b,
        format!("exit codes {c1}/{c8}, {} and {} bytes, identical: {}", a.len(), b.len(), a == b),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("Jacobian exactness", jacobian_exactness),
        ("Jacobian spectrum", spectrum),
        ("gradient information retention", gir),
        ("expected-κ table", kappa),
        ("projection error", projection),
        ("coordinate independence", coordinate),
        ("per-column error", per_column),
        ("convergence race", convergence),
        ("geodesic gradient", geodesic),
        ("degeneracy handling", degeneracy),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let v = f();
        failed += usize::from(!v.pass);
        println!("criterion {:>2} {} {name}: {}", k + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
