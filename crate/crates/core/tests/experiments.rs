use rotjac_core::experiments::{
    enforce_skip_limit, kappa_table, projection_error, ExperimentConfig, ExperimentReport, GsInputMode,
};
use rotjac_core::RotjacError;

#[test]
fn results_do_not_depend_on_thread_count() {
    let base = ExperimentConfig::new(vec![0.05, 0.3], 400, 11);
    let a = kappa_table(&base.clone().with_parallelism(1)).unwrap();
    let b = kappa_table(&base.with_parallelism(7)).unwrap();
    assert_eq!(format!("{:?}", a.records().rows), format!("{:?}", b.records().rows));
}

#[test]
fn seeds_change_results() {
    let a = projection_error(&ExperimentConfig::new(vec![0.1], 200, 1)).unwrap();
    let b = projection_error(&ExperimentConfig::new(vec![0.1], 200, 2)).unwrap();
    assert_ne!(a.rows[0].svd_mse.mean, b.rows[0].svd_mse.mean);
}

#[test]
fn six_entry_noise_roughly_matches_extracted_columns() {
    let cfg = ExperimentConfig::new(vec![0.02], 4000, 5);
    let a = projection_error(&cfg.clone()).unwrap();
    let b = projection_error(&cfg.with_gs_input(GsInputMode::SixEntryNoise)).unwrap();
    let (x, y) = (a.rows[0].gs_mse.mean, b.rows[0].gs_mse.mean);
    assert!((x - y).abs() / x < 0.1, "{x} vs {y}");
}

#[test]
fn zero_noise_gives_zero_error() {
    let res = projection_error(&ExperimentConfig::new(vec![0.0], 50, 3)).unwrap();
    assert!(res.rows[0].svd_mse.mean < 1e-28);
    assert!(res.rows[0].gs_mse.mean < 1e-28);
}

#[test]
fn invalid_configs_are_domain_errors() {
    for cfg in [
        ExperimentConfig::new(vec![], 10, 0),
        ExperimentConfig::new(vec![0.1], 0, 0),
        ExperimentConfig::new(vec![-0.1], 10, 0),
        ExperimentConfig::new(vec![f64::NAN], 10, 0),
    ] {
        assert!(matches!(projection_error(&cfg), Err(RotjacError::DomainError(_))));
    }
}

#[test]
fn skip_limit() {
    assert!(enforce_skip_limit("x", 10, 1000).is_ok());
    assert!(matches!(enforce_skip_limit("x", 11, 1000), Err(RotjacError::SkipFractionExceeded { skipped: 11, .. })));
}

#[test]
fn records_have_one_cell_per_column() {
    let res = projection_error(&ExperimentConfig::new(vec![0.01, 0.1], 30, 4)).unwrap();
    let t = res.records();
    assert_eq!(t.len(), 60);
    assert!(t.rows.iter().all(|r| r.len() == t.columns.len()));
}
