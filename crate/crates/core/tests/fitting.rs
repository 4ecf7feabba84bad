mod common;

use approx::assert_abs_diff_eq;
use common::{cdf, gentleman_geyer, random_instance, random_weights, InstanceSpec, GG_MAX};
use mable_ph::degree::{profile_loglik_grid, DegreeGrid, GridMode};
use mable_ph::likelihood::{grad_gamma, loglik_total, PreparedData};
use mable_ph::optimizer::{
    fit_no_covariate, mable_fit_with, newton_gamma, solve_p_observed, two_sample_fit, uniform_weights, FitOptions,
};
use mable_ph::simulation::{simulate_weibull_ph, SimDesign};
use mable_ph::{mable_fit, BernsteinPHModel, Dataset, FitConfig, Observation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> FitConfig {
    FitConfig::default()
}

fn on_simplex(p: &[f64]) -> bool {
    p.iter().all(|&v| v >= 0.0) && (p.iter().sum::<f64>() - 1.0).abs() <= 1e-12
}

fn weibull_sample(replicate: usize) -> Dataset {
    simulate_weibull_ph(&SimDesign { n: 100, ..SimDesign::default() }, replicate).unwrap()
}

#[test]
fn gentleman_geyer_attains_known_maximum() {
    let ds = gentleman_geyer();
    for m in 2..=6 {
        let fit = mable_fit(&ds, m, None, &cfg()).unwrap();
        assert_abs_diff_eq!(fit.loglik(), GG_MAX, epsilon = 1e-4);
        assert_abs_diff_eq!(cdf(&fit.model, 1.0), 1.0 / 3.0, epsilon = 1e-3);
        assert_abs_diff_eq!(cdf(&fit.model, 2.0), 2.0 / 3.0, epsilon = 1e-3);
        assert!(fit.report.kkt_residual < 1e-6);
        assert!(fit.model.gamma.is_empty());
    }
}

#[test]
fn gentleman_geyer_starts_agree_in_survival() {
    let ds = gentleman_geyer();
    let starts = [
        (1..=7).map(|k| k as f64 / 28.0).collect::<Vec<_>>(),
        vec![1.0 / 7.0; 7],
        [1., 2., 3., 4., 3., 2., 1.].iter().map(|k| k / 16.0).collect(),
    ];
    let fits: Vec<_> = starts
        .iter()
        .map(|p0| {
            let options = FitOptions { p_init: Some(p0.clone()), ..FitOptions::default() };
            mable_fit_with(&ds, 6, &options, &cfg()).unwrap()
        })
        .collect();
    for fit in &fits {
        assert_abs_diff_eq!(fit.loglik(), GG_MAX, epsilon = 1e-4);
    }
    let grid: Vec<f64> = (0..=300).map(|k| 3.0 * k as f64 / 300.0).collect();
    for a in &fits {
        for b in &fits {
            let sup = grid
                .iter()
                .map(|&t| (a.model.baseline_survival(t).unwrap() - b.model.baseline_survival(t).unwrap()).abs())
                .fold(0.0, f64::max);
            assert!(sup < 2e-2, "sup-norm gap {sup}");
        }
    }
}

#[test]
fn gentleman_geyer_grid_is_flat_from_degree_two() {
    let table = profile_loglik_grid(&gentleman_geyer(), DegreeGrid::from_bounds(1, 6).unwrap(), &cfg(), &GridMode::Full)
        .unwrap();
    for (m, ll) in table.degrees.iter().zip(&table.loglik) {
        if *m >= 2 {
            assert_abs_diff_eq!(ll.unwrap(), GG_MAX, epsilon = 1e-3);
        }
    }
}

#[test]
fn no_covariate_fit_has_empty_gamma() {
    let fit = fit_no_covariate(&gentleman_geyer(), 3, &cfg()).unwrap();
    assert!(fit.model.gamma.is_empty() && fit.report.gamma_hat.is_empty());
    assert!(fit_no_covariate(&weibull_sample(0), 3, &cfg()).is_err());
}

#[test]
fn degree_zero_exact_data_puts_all_mass_on_one_component() {
    let obs = [0.2, 0.5, 0.9].iter().map(|&t| Observation::exact(t, vec![]).unwrap()).collect();
    let fit = mable_fit(&Dataset::new(obs, Some(1.0)).unwrap(), 0, None, &cfg()).unwrap();
    assert_eq!(fit.model.p, vec![1.0]);
    assert_eq!(fit.report.kkt_residual, 0.0);
}

#[test]
fn full_and_profile_modes_agree_at_the_full_estimate() {
    let ds = weibull_sample(3);
    for m in [3, 5] {
        let full = mable_fit(&ds, m, None, &cfg()).unwrap();
        let grid = DegreeGrid::from_bounds(m, m + 2).unwrap();
        let table = profile_loglik_grid(&ds, grid, &cfg(), &GridMode::Profile(full.model.gamma.clone())).unwrap();
        assert_abs_diff_eq!(table.loglik[0].unwrap(), full.loglik(), epsilon = 1e-6);
    }
}

#[test]
fn solver_meets_kkt_and_stays_on_simplex() {
    let spec = InstanceSpec { max_n: 40, max_m: 12, max_d: 3, empirical_baseline: true };
    for seed in 0..100 {
        let inst = random_instance(seed, &spec);
        let prepared = PreparedData::for_model(&inst.model, &inst.dataset).unwrap();
        let mut all_on_simplex = true;
        let sol = solve_p_observed(&prepared, &uniform_weights(prepared.width()), &cfg(), |p| {
            all_on_simplex &= on_simplex(p);
        })
        .unwrap();
        assert!(sol.kkt_residual < 1e-6, "seed {seed}: residual {}", sol.kkt_residual);
        assert!(all_on_simplex && on_simplex(&sol.p), "seed {seed} left the simplex");
    }
}

#[test]
fn fixed_point_iteration_never_decreases_loglik() {
    let spec = InstanceSpec { max_n: 40, max_m: 10, max_d: 2, empirical_baseline: true };
    let plain = FitConfig { newton_polish: false, max_fixed_point_iters: 300, ..cfg() };
    for seed in 0..50 {
        let inst = random_instance(1000 + seed, &spec);
        let prepared = PreparedData::for_model(&inst.model, &inst.dataset).unwrap();
        let mut trace = Vec::new();
        let _ = solve_p_observed(&prepared, &inst.model.p, &plain, |p| trace.push(prepared.loglik(p).unwrap()));
        for w in trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-10 * w[0].abs(), "seed {seed}: {} -> {}", w[0], w[1]);
        }
    }
}

#[test]
fn covariate_translation_moves_only_the_baseline() {
    let ds = weibull_sample(5);
    let shift = [3.0, -2.0];
    let moved = ds.map_covariates(|x| vec![x[0] + shift[0], x[1] + shift[1]]).unwrap();
    let a = mable_fit(&ds, 5, None, &cfg()).unwrap();
    let b = mable_fit(&moved, 5, None, &cfg()).unwrap();
    assert_abs_diff_eq!(a.loglik(), b.loglik(), epsilon = 1e-6);
    for j in 0..2 {
        assert_abs_diff_eq!(a.model.gamma[j], b.model.gamma[j], epsilon = 1e-6);
        assert_abs_diff_eq!(b.model.x0[j] - a.model.x0[j], shift[j], epsilon = 1e-12);
    }
}

#[test]
fn newton_is_idle_at_the_optimum() {
    let ds = weibull_sample(2);
    let fit = mable_fit(&ds, 4, None, &cfg()).unwrap();
    let prepared = PreparedData::for_model(&fit.model, &ds).unwrap();
    let sol = newton_gamma(&prepared, &fit.model.p, &fit.model.gamma, &cfg()).unwrap();
    for (a, b) in sol.gamma.iter().zip(&fit.model.gamma) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-10);
    }
}

#[test]
fn single_newton_step_on_one_exact_observation() {
    // l(g) = g + log f0(y) + (e^g - 1) log S0(y), maximised at g* = -log(-log S0(y)).
    let y = 0.4;
    let ds = Dataset::new(vec![Observation::exact(y, vec![1.0]).unwrap()], Some(1.0)).unwrap();
    let mut prepared = PreparedData::new(&ds, 3, false).unwrap();
    prepared.set_coefficients(&[0.0], &[0.0]).unwrap();
    let p = vec![0.1, 0.2, 0.3, 0.4];
    let model = BernsteinPHModel::new(3, false, p.clone(), vec![0.0], vec![0.0], 1.0).unwrap();
    let target = -(-model.baseline_survival(y).unwrap().ln()).ln();
    let one_step = FitConfig { max_newton_iters: 1, ..cfg() };
    let start = [target + 1e-4];
    let last = match newton_gamma(&prepared, &p, &start, &one_step) {
        Ok(sol) => sol.gamma,
        Err(mable_ph::Error::NotConverged { last, .. }) => last,
        Err(e) => panic!("{e}"),
    };
    assert_abs_diff_eq!(last[0], target, epsilon = 1e-6);
}

#[test]
fn newton_with_fixed_weights_recovers_truth() {
    // Concavity in gamma: the fixed-weight Newton solve from zero lands on the
    // joint estimate; single samples can sit far out, so coverage is counted.
    let mut covered = 0;
    for replicate in 0..10 {
        let ds = weibull_sample(replicate);
        let fit = mable_fit(&ds, 6, None, &cfg()).unwrap();
        let prepared = PreparedData::for_model(&fit.model, &ds).unwrap();
        let sol = newton_gamma(&prepared, &fit.model.p, &[0.0, 0.0], &cfg()).unwrap();
        for (a, b) in sol.gamma.iter().zip(&fit.model.gamma) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
        let se = fit.report.standard_errors.unwrap();
        if [0.5, -0.5].iter().enumerate().all(|(j, truth)| (sol.gamma[j] - truth).abs() < 3.0 * se[j]) {
            covered += 1;
        }
    }
    assert!(covered >= 8, "only {covered} of 10 replicates within 3 SE");
}

#[test]
fn symmetric_current_status_is_stationary() {
    let mut obs = Vec::new();
    for group in [0.0, 1.0] {
        for (c, dead) in [(0.2, false), (0.4, true), (0.5, false), (0.6, true), (0.8, true), (0.3, false)] {
            let o = if dead {
                Observation::interval(0.0, c, vec![group])
            } else {
                Observation::interval(c, None, vec![group])
            };
            obs.push(o.unwrap());
        }
    }
    let ds = Dataset::new(obs, Some(1.0)).unwrap();
    let fit = mable_fit(&ds, 3, None, &cfg()).unwrap();
    assert!(grad_gamma(&fit.model, &ds).unwrap().amax() < 1e-6);
    let h = 1e-6;
    let at = |g: f64| loglik_total(&BernsteinPHModel { gamma: vec![g], ..fit.model.clone() }, &ds).unwrap();
    let fd = (at(fit.model.gamma[0] + h) - at(fit.model.gamma[0] - h)) / (2.0 * h);
    assert!(fd.abs() < 1e-5, "finite-difference score {fd}");
}

fn two_group_sample(seed: u64, rate1: f64, n: usize) -> Vec<Observation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let group = (k % 2) as f64;
            let rate = if group == 1.0 { rate1 } else { 1.0 };
            let t = -(1.0 - rng.random::<f64>()).ln() / rate;
            let a = rng.random_range(0.0..1.5);
            let b = a + rng.random_range(0.1..1.0);
            if t < a {
                Observation::interval(0.0, a, vec![group])
            } else if t <= b {
                Observation::interval(a, b, vec![group])
            } else {
                Observation::interval(b, None, vec![group])
            }
            .unwrap()
        })
        .collect()
}

#[test]
fn identical_groups_give_null_effect() {
    let ds = Dataset::new(two_group_sample(7, 1.0, 200), None).unwrap();
    let fit = two_sample_fit(&ds, 5, &cfg()).unwrap();
    assert!(fit.gamma().abs() < 3.0 * fit.standard_error().unwrap());
}

#[test]
fn swapping_groups_negates_the_effect() {
    let obs = two_group_sample(8, 2.0, 200);
    let swapped: Vec<Observation> =
        obs.iter().map(|o| Observation { event: o.event, x: vec![1.0 - o.x[0]] }).collect();
    let a = two_sample_fit(&Dataset::new(obs, None).unwrap(), 5, &cfg()).unwrap();
    let b = two_sample_fit(&Dataset::new(swapped, None).unwrap(), 5, &cfg()).unwrap();
    assert_abs_diff_eq!(a.gamma(), -b.gamma(), epsilon = 1e-6);
    assert_abs_diff_eq!(a.loglik(), b.loglik(), epsilon = 1e-8);
    for t in [0.3, 0.8, 1.5] {
        assert_abs_diff_eq!(a.survival(t, 0).unwrap(), b.survival(t, 1).unwrap(), epsilon = 1e-6);
        assert_abs_diff_eq!(a.survival(t, 1).unwrap(), b.survival(t, 0).unwrap(), epsilon = 1e-6);
    }
}

#[test]
fn two_sample_recovers_hazard_ratio() {
    let ds = Dataset::new(two_group_sample(9, 2.0, 300), None).unwrap();
    let fit = two_sample_fit(&ds, 6, &cfg()).unwrap();
    let se = fit.standard_error().unwrap();
    assert!((fit.gamma() - 2f64.ln()).abs() < 3.0 * se, "gamma {} se {se}", fit.gamma());
}

#[test]
fn gamma_init_reaches_the_same_optimum() {
    let ds = weibull_sample(4);
    let cold = mable_fit(&ds, 5, None, &cfg()).unwrap();
    let warm = mable_fit(&ds, 5, Some(&cold.model.gamma), &cfg()).unwrap();
    assert_abs_diff_eq!(cold.loglik(), warm.loglik(), epsilon = 1e-8);
}

#[test]
fn random_start_weights_are_accepted() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ds = weibull_sample(6);
    let width = 7 + usize::from(ds.default_tail());
    let p0 = random_weights(&mut rng, width);
    let options = FitOptions { p_init: Some(p0), ..FitOptions::default() };
    let fit = mable_fit_with(&ds, 6, &options, &cfg()).unwrap();
    assert!(fit.report.converged);
}
