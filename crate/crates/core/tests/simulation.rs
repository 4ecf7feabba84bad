use mable_ph::simulation::{aggregate, mse_report, run_replicate, Method, SimDesign};
use mable_ph::FitConfig;

#[test]
fn standard_errors_track_replicate_spread() {
    let design = SimDesign { n: 100, replicates: 100, seed: 17, ..SimDesign::default() };
    let report = mse_report(&design, &FitConfig::default()).unwrap();
    let full = report.summary(Method::MableFull);
    assert_eq!(full.failures, 0);
    for j in 0..2 {
        let ratio = full.mean_se[j] / full.sd[j];
        assert!((0.5..=2.0).contains(&ratio), "coefficient {}: se {} sd {}", j + 1, full.mean_se[j], full.sd[j]);
    }
}

#[test]
fn parametric_fit_wins_at_small_n() {
    let design = SimDesign { n: 30, replicates: 1000, ..SimDesign::default() };
    let report = mse_report(&design, &FitConfig::default()).unwrap();
    let full = report.summary(Method::MableFull);
    let para = report.summary(Method::Parametric);
    for j in 0..2 {
        assert!(full.mse[j] >= para.mse[j], "coefficient {}: B2 {} vs P {}", j + 1, full.mse[j], para.mse[j]);
    }
}

#[test]
fn serial_and_parallel_replicates_agree() {
    let design = SimDesign { n: 40, replicates: 6, seed: 99, ..SimDesign::default() };
    let cfg = FitConfig::default();
    let serial: Vec<_> = (0..design.replicates).map(|r| run_replicate(&design, r, &cfg).unwrap()).collect();
    // Debug output compares NaN fields (no standard errors for P) bytewise.
    let a = format!("{:?}", aggregate(&design, &serial));
    let b = format!("{:?}", mse_report(&design, &cfg).unwrap());
    assert_eq!(a, b);
}
