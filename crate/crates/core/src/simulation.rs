//! Monte-Carlo study of Weibull proportional hazards data under interval
//! censoring, comparing the Bernstein fits with a parametric Weibull fit.

use log::{debug, warn};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::degree::{profile_loglik_grid, DegreeGrid, GridMode};
use crate::error::{Error, Result};
use crate::model::{BernsteinPHModel, Dataset, Event, Observation};
use crate::optimizer::FitConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct SimDesign {
    pub n: usize,
    pub theta: f64,
    pub sigma: f64,
    pub gamma_true: Vec<f64>,
    /// Probability that a subject's event time is censored.
    pub censor_prob: f64,
    /// Inspection times per censored subject.
    pub inspections: usize,
    pub replicates: usize,
    pub seed: u64,
    /// Right end of the reporting window for survival curves.
    pub horizon: f64,
}

impl Default for SimDesign {
    fn default() -> Self {
        Self {
            n: 100,
            theta: 2.0,
            sigma: 2.0,
            gamma_true: vec![0.5, -0.5],
            censor_prob: 0.7,
            inspections: 4,
            replicates: 300,
            seed: 1,
            horizon: 7.0,
        }
    }
}

impl SimDesign {
    pub fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(Error::Domain(format!("sample size {} is below 10", self.n)));
        }
        if !(self.censor_prob > 0.0 && self.censor_prob < 1.0) {
            return Err(Error::Domain("censoring probability must lie in (0, 1)".into()));
        }
        if !(self.theta > 0.0 && self.sigma > 0.0 && self.horizon > 0.0) {
            return Err(Error::Domain("shape, scale and horizon must be positive".into()));
        }
        if self.gamma_true.len() != 2 {
            return Err(Error::Domain("the design has two covariates".into()));
        }
        if self.inspections == 0 {
            return Err(Error::Domain("at least one inspection time is needed".into()));
        }
        Ok(())
    }

    /// 95% quantile of the Weibull law at `x = 0`.
    pub fn q95(&self) -> f64 {
        self.sigma * (-(0.05f64.ln())).powf(1.0 / self.theta)
    }

    /// True `S(t | x = 0)`.
    pub fn true_survival(&self, t: f64) -> f64 {
        (-(t / self.sigma).powf(self.theta)).exp()
    }

    /// The 100-point reporting grid on `[0, horizon]`.
    pub fn curve_grid(&self) -> Vec<f64> {
        (0..CURVE_POINTS).map(|k| self.horizon * k as f64 / (CURVE_POINTS - 1) as f64).collect()
    }
}

pub const CURVE_POINTS: usize = 100;

fn replicate_rng(seed: u64, replicate: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate as u64);
    rng
}

/// Draws one dataset; identical for identical `(design.seed, replicate)`.
pub fn simulate_weibull_ph(design: &SimDesign, replicate: usize) -> Result<Dataset> {
    design.validate()?;
    let mut rng = replicate_rng(design.seed, replicate);
    let window = 2.0 * design.q95();
    let mut obs = Vec::with_capacity(design.n);
    let mut inspections = vec![0.0; design.inspections];
    for _ in 0..design.n {
        let x1 = rng.random_range(-1.0..=1.0);
        let x2 = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let lin = design.gamma_true[0] * x1 + design.gamma_true[1] * x2;
        let u: f64 = 1.0 - rng.random::<f64>();
        let t = design.sigma * (-lin / design.theta).exp() * (-u.ln()).powf(1.0 / design.theta);
        let x = vec![x1, x2];
        if rng.random_bool(design.censor_prob) {
            for v in inspections.iter_mut() {
                *v = rng.random::<f64>() * window;
            }
            inspections.sort_by(f64::total_cmp);
            let lower = inspections.iter().rev().find(|&&c| c < t).copied().unwrap_or(0.0);
            let upper = inspections.iter().find(|&&c| c >= t).copied();
            obs.push(Observation::interval(lower, upper, x)?);
        } else {
            obs.push(Observation::exact(t, x)?);
        }
    }
    Dataset::new(obs, None)
}

/// Parametric Weibull proportional hazards fit.
#[derive(Debug, Clone, PartialEq)]
pub struct WeibullFit {
    pub theta: f64,
    pub sigma: f64,
    pub gamma: Vec<f64>,
    pub loglik: f64,
    pub iterations: usize,
}

impl WeibullFit {
    pub fn survival(&self, t: f64, x: &[f64]) -> f64 {
        let lin: f64 = self.gamma.iter().zip(x).map(|(g, v)| g * v).sum();
        (-(t / self.sigma).powf(self.theta) * lin.exp()).exp()
    }
}

/// Cumulative hazard `H = (t/σ)^θ e^{γᵀx}` and its gradient in
/// `(log θ, log σ, γ)`.
fn cumulative_hazard(t: f64, phi: &[f64], x: &[f64], lin: f64, grad: &mut [f64]) -> f64 {
    let theta = phi[0].exp();
    let log_ratio = t.ln() - phi[1];
    let h = (theta * log_ratio + lin).exp();
    grad[0] = h * theta * log_ratio;
    grad[1] = -theta * h;
    for (g, v) in grad[2..].iter_mut().zip(x) {
        *g = h * v;
    }
    h
}

/// Log-likelihood and gradient of the Weibull model at
/// `φ = (log θ, log σ, γ)` on the original time scale.
pub fn weibull_loglik_grad(dataset: &Dataset, phi: &[f64]) -> (f64, Vec<f64>) {
    let k = phi.len();
    let mut total = 0.0;
    let mut grad = vec![0.0; k];
    let mut d1 = vec![0.0; k];
    let mut d2 = vec![0.0; k];
    for obs in dataset.raw() {
        let lin: f64 = phi[2..].iter().zip(&obs.x).map(|(g, v)| g * v).sum();
        match obs.event {
            Event::Exact(t) => {
                let theta = phi[0].exp();
                let log_ratio = t.ln() - phi[1];
                let log_h = theta * log_ratio + lin;
                let h = log_h.exp();
                total += phi[0] - t.ln() + log_h - h;
                let w = 1.0 - h;
                grad[0] += 1.0 + w * theta * log_ratio;
                grad[1] -= w * theta;
                for (g, v) in grad[2..].iter_mut().zip(&obs.x) {
                    *g += w * v;
                }
            }
            Event::Interval { lower, upper } => {
                let h1 = if lower > 0.0 {
                    cumulative_hazard(lower, phi, &obs.x, lin, &mut d1)
                } else {
                    d1.iter_mut().for_each(|v| *v = 0.0);
                    0.0
                };
                match upper {
                    None => {
                        total -= h1;
                        for (g, d) in grad.iter_mut().zip(&d1) {
                            *g -= d;
                        }
                    }
                    Some(u) => {
                        let h2 = cumulative_hazard(u, phi, &obs.x, lin, &mut d2);
                        let gap = h2 - h1;
                        total += -h1 + (-(-gap).exp_m1()).ln();
                        let w = 1.0 / gap.exp_m1();
                        for ((g, a), b) in grad.iter_mut().zip(&d1).zip(&d2) {
                            *g += -a + w * (b - a);
                        }
                    }
                }
            }
        }
    }
    (total, grad)
}

fn representative_time(obs: &Observation) -> Option<f64> {
    match obs.event {
        Event::Exact(t) => Some(t),
        Event::Interval { lower, upper: Some(u) } => Some(0.5 * (lower + u)),
        Event::Interval { lower, upper: None } if lower > 0.0 => Some(lower),
        _ => None,
    }
}

fn fd_hessian(dataset: &Dataset, phi: &[f64]) -> DMatrix<f64> {
    let k = phi.len();
    let mut h = DMatrix::zeros(k, k);
    let mut work = phi.to_vec();
    for j in 0..k {
        let step = 1e-5 * phi[j].abs().max(1.0);
        work[j] = phi[j] + step;
        let (_, gp) = weibull_loglik_grad(dataset, &work);
        work[j] = phi[j] - step;
        let (_, gm) = weibull_loglik_grad(dataset, &work);
        work[j] = phi[j];
        for i in 0..k {
            h[(i, j)] = (gp[i] - gm[i]) / (2.0 * step);
        }
    }
    (&h + h.transpose()) * 0.5
}

const PMLE_MAX_ITERS: usize = 200;

/// Maximum likelihood for the Weibull PH model by Levenberg-damped Newton
/// steps on `(log θ, log σ, γ)`.
pub fn weibull_pmle(dataset: &Dataset) -> Result<WeibullFit> {
    let d = dataset.dim();
    if dataset.is_empty() {
        return Err(Error::Data("cannot fit an empty dataset".into()));
    }
    for j in 0..d {
        let first = dataset.raw()[0].x[j];
        if dataset.raw().iter().all(|o| o.x[j] == first) {
            return Err(Error::Unidentifiable(j));
        }
    }
    let times: Vec<f64> = dataset.raw().iter().filter_map(representative_time).collect();
    let scale0 = if times.is_empty() { 1.0 } else { times.iter().sum::<f64>() / times.len() as f64 };
    let mut phi = vec![0.0; d + 2];
    phi[1] = scale0.ln();
    let tol = 1e-8 * (dataset.len() as f64).max(1.0);
    let (mut ll, mut grad) = weibull_loglik_grad(dataset, &phi);
    if !ll.is_finite() {
        return Err(Error::Singular("Weibull log-likelihood is not finite at the start".into()));
    }
    let mut mu = 0.0;
    for iteration in 0..PMLE_MAX_ITERS {
        let gnorm = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));
        if gnorm < tol {
            return Ok(WeibullFit { theta: phi[0].exp(), sigma: phi[1].exp(), gamma: phi[2..].to_vec(), loglik: ll, iterations: iteration });
        }
        let neg_h = -fd_hessian(dataset, &phi);
        let g = DVector::from_vec(grad.clone());
        let scale = neg_h.diagonal().amax().max(1e-8);
        let mut accepted = false;
        for _ in 0..40 {
            let damped = &neg_h + DMatrix::identity(d + 2, d + 2) * (mu * scale);
            let Some(chol) = damped.cholesky() else {
                mu = (mu * 10.0).max(1e-8);
                continue;
            };
            let step = chol.solve(&g);
            let cand: Vec<f64> = phi.iter().zip(step.iter()).map(|(a, s)| a + s).collect();
            let (ll_new, grad_new) = weibull_loglik_grad(dataset, &cand);
            if ll_new.is_finite() && ll_new >= ll {
                let gain = ll_new - ll;
                phi = cand;
                ll = ll_new;
                grad = grad_new;
                mu *= 0.1;
                if mu < 1e-12 {
                    mu = 0.0;
                }
                accepted = true;
                if gain == 0.0 {
                    return Ok(WeibullFit { theta: phi[0].exp(), sigma: phi[1].exp(), gamma: phi[2..].to_vec(), loglik: ll, iterations: iteration + 1 });
                }
                break;
            }
            mu = (mu * 10.0).max(1e-8);
        }
        if !accepted {
            break;
        }
    }
    let residual = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));
    Err(Error::NotConverged { what: "Weibull maximum likelihood", iterations: PMLE_MAX_ITERS, residual, last: phi })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Bernstein fit at the degree chosen from the profile with γ held fixed.
    MableProfile,
    /// Bernstein fit at the degree chosen from full fits.
    MableFull,
    /// Parametric Weibull fit.
    Parametric,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::MableProfile, Method::MableFull, Method::Parametric];

    pub fn label(self) -> &'static str {
        match self {
            Method::MableProfile => "B1",
            Method::MableFull => "B2",
            Method::Parametric => "P",
        }
    }
}

/// Running mean of squared errors.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanAccumulator {
    pub count: usize,
    pub mean: f64,
}

impl MeanAccumulator {
    pub fn push(&mut self, value: f64) {
        self.count += 1;
        self.mean += (value - self.mean) / self.count as f64;
    }
}

/// Two-pass counterpart of [`MeanAccumulator`]: sum then divide.
pub fn mean_squared_error(estimates: &[f64], truth: f64) -> f64 {
    estimates.iter().map(|e| (e - truth).powi(2)).sum::<f64>() / estimates.len() as f64
}

/// One replicate's estimates per method, in [`Method::ALL`] order.
#[derive(Debug, Clone, Default)]
pub struct ReplicateOutcome {
    pub gamma: [Option<Vec<f64>>; 3],
    pub curve: [Option<Vec<f64>>; 3],
    pub standard_errors: [Option<Vec<f64>>; 3],
    pub degree_full: Option<usize>,
    pub degree_profile: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub successes: usize,
    pub failures: usize,
    pub mse: Vec<f64>,
    /// Standard deviation of the estimates across replicates.
    pub sd: Vec<f64>,
    /// Average reported standard error, where available.
    pub mean_se: Vec<f64>,
    pub curve_mse: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub design: SimDesign,
    pub times: Vec<f64>,
    pub methods: Vec<MethodSummary>,
    pub mean_degree_full: f64,
    pub mean_degree_profile: f64,
}

impl SimulationReport {
    pub fn summary(&self, method: Method) -> &MethodSummary {
        self.methods.iter().find(|s| s.method == method).expect("every method is summarised")
    }

    /// CSV with columns `method,n,coefficient,mse`.
    pub fn coefficient_csv(&self) -> String {
        let mut s = String::from("method,n,coefficient,mse\n");
        for m in &self.methods {
            for (j, v) in m.mse.iter().enumerate() {
                s.push_str(&format!("{},{},gamma{},{}\n", m.method.label(), self.design.n, j + 1, v));
            }
        }
        s
    }

    /// CSV with columns `t,method,mse`.
    pub fn curve_csv(&self) -> String {
        let mut s = String::from("t,method,mse\n");
        for m in &self.methods {
            for (t, v) in self.times.iter().zip(&m.curve_mse) {
                s.push_str(&format!("{t},{},{v}\n", m.method.label()));
            }
        }
        s
    }
}

/// Survival curve `S(t | x = 0)` of a fitted Bernstein model on `times`.
fn mable_curve(model: &BernsteinPHModel, times: &[f64]) -> Result<Vec<f64>> {
    let zero = vec![0.0; model.dim()];
    times.iter().map(|&t| model.conditional_survival(t, &zero)).collect()
}

/// Degree grid used per replicate: `{2, ..., min(20, n/3)}`.
pub fn replicate_grid(n: usize) -> Result<DegreeGrid> {
    DegreeGrid::from_bounds(2, (n / 3).clamp(4, 20))
}

/// Fits all methods to one simulated dataset.
pub fn run_replicate(design: &SimDesign, replicate: usize, config: &FitConfig) -> Result<ReplicateOutcome> {
    let dataset = simulate_weibull_ph(design, replicate)?;
    let times = design.curve_grid();
    let mut out = ReplicateOutcome::default();
    let grid = replicate_grid(design.n)?;

    let full = profile_loglik_grid(&dataset, grid, config, &GridMode::Full)?;
    if let Some(fit) = full.chosen_fit() {
        out.degree_full = Some(fit.model.m);
        out.gamma[1] = Some(fit.model.gamma.clone());
        out.standard_errors[1] = fit.report.standard_errors.clone();
        out.curve[1] = mable_curve(&fit.model, &times).ok();
    }
    if let Some(first) = full.fits[0].as_ref() {
        let mode = GridMode::Profile(first.model.gamma.clone());
        match profile_loglik_grid(&dataset, grid, config, &mode) {
            Ok(profile) => {
                if let Some(idx) = profile.chosen {
                    out.degree_profile = Some(profile.degrees[idx]);
                    if let Some(fit) = full.fits[idx].as_ref() {
                        out.gamma[0] = Some(fit.model.gamma.clone());
                        out.standard_errors[0] = fit.report.standard_errors.clone();
                        out.curve[0] = mable_curve(&fit.model, &times).ok();
                    }
                }
            }
            Err(e) => debug!("replicate {replicate}: profile grid failed: {e}"),
        }
    }
    match weibull_pmle(&dataset) {
        Ok(fit) => {
            out.gamma[2] = Some(fit.gamma.clone());
            out.curve[2] = Some(times.iter().map(|&t| fit.survival(t, &[0.0, 0.0])).collect());
        }
        Err(e) => debug!("replicate {replicate}: parametric fit failed: {e}"),
    }
    Ok(out)
}

/// Runs every replicate (in parallel) and aggregates the estimates in
/// replicate order.
pub fn mse_report(design: &SimDesign, config: &FitConfig) -> Result<SimulationReport> {
    design.validate()?;
    config.validate()?;
    let outcomes: Vec<ReplicateOutcome> = (0..design.replicates)
        .into_par_iter()
        .map(|r| {
            run_replicate(design, r, config).unwrap_or_else(|e| {
                warn!("replicate {r} failed: {e}");
                ReplicateOutcome::default()
            })
        })
        .collect();
    Ok(aggregate(design, &outcomes))
}

pub fn aggregate(design: &SimDesign, outcomes: &[ReplicateOutcome]) -> SimulationReport {
    let times = design.curve_grid();
    let truth: Vec<f64> = times.iter().map(|&t| design.true_survival(t)).collect();
    let d = design.gamma_true.len();
    let methods = Method::ALL
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let mut mse = vec![MeanAccumulator::default(); d];
            let mut first = vec![MeanAccumulator::default(); d];
            let mut second = vec![MeanAccumulator::default(); d];
            let mut se = vec![MeanAccumulator::default(); d];
            let mut curve = vec![MeanAccumulator::default(); times.len()];
            let mut failures = 0;
            for o in outcomes {
                let (Some(g), Some(c)) = (&o.gamma[k], &o.curve[k]) else {
                    failures += 1;
                    continue;
                };
                for j in 0..d {
                    mse[j].push((g[j] - design.gamma_true[j]).powi(2));
                    first[j].push(g[j]);
                    second[j].push(g[j] * g[j]);
                }
                if let Some(s) = &o.standard_errors[k] {
                    for j in 0..d {
                        se[j].push(s[j]);
                    }
                }
                for ((acc, v), s) in curve.iter_mut().zip(c).zip(&truth) {
                    acc.push((v - s).powi(2));
                }
            }
            let sd = (0..d).map(|j| (second[j].mean - first[j].mean.powi(2)).max(0.0).sqrt()).collect();
            MethodSummary {
                method,
                successes: outcomes.len() - failures,
                failures,
                mse: mse.iter().map(|a| a.mean).collect(),
                sd,
                mean_se: se.iter().map(|a| if a.count > 0 { a.mean } else { f64::NAN }).collect(),
                curve_mse: curve.iter().map(|a| a.mean).collect(),
            }
        })
        .collect();
    let mean_of = |f: fn(&ReplicateOutcome) -> Option<usize>| {
        let mut acc = MeanAccumulator::default();
        outcomes.iter().filter_map(f).for_each(|m| acc.push(m as f64));
        acc.mean
    };
    SimulationReport {
        design: design.clone(),
        times,
        methods,
        mean_degree_full: mean_of(|o| o.degree_full),
        mean_degree_profile: mean_of(|o| o.degree_profile),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn big_design(n: usize) -> SimDesign {
        SimDesign { n, replicates: 1, ..SimDesign::default() }
    }

    #[test]
    fn marginal_median_without_covariate_effect() {
        let design = SimDesign { gamma_true: vec![0.0, 0.0], censor_prob: 0.01, ..big_design(100_000) };
        let ds = simulate_weibull_ph(&design, 0).unwrap();
        let mut times: Vec<f64> = ds
            .raw()
            .iter()
            .filter_map(|o| match o.event {
                Event::Exact(t) => Some(t),
                _ => None,
            })
            .collect();
        times.sort_by(f64::total_cmp);
        let median = times[times.len() / 2];
        let oracle = 2.0 * 2f64.ln().sqrt();
        assert!((median / oracle - 1.0).abs() < 0.01, "{median} vs {oracle}");
    }

    #[test]
    fn censoring_fraction() {
        let ds = simulate_weibull_ph(&big_design(100_000), 3).unwrap();
        let censored = ds.raw().iter().filter(|o| !matches!(o.event, Event::Exact(_))).count();
        let frac = censored as f64 / ds.len() as f64;
        assert!((frac - 0.70).abs() < 0.01, "{frac}");
    }

    #[test]
    fn intervals_bracket_with_inspections() {
        let design = SimDesign { inspections: 4, ..big_design(2000) };
        let ds = simulate_weibull_ph(&design, 1).unwrap();
        let window = 2.0 * design.q95();
        for o in ds.raw() {
            if let Event::Interval { lower, upper } = o.event {
                assert!((0.0..window).contains(&lower));
                if let Some(u) = upper {
                    assert!(u > lower && u <= window);
                }
            }
        }
        assert!(ds.has_right_censoring());
    }

    #[test]
    fn replicates_are_reproducible_and_distinct() {
        let d = big_design(50);
        let a = crate::io::write_observations(simulate_weibull_ph(&d, 7).unwrap().raw());
        let b = crate::io::write_observations(simulate_weibull_ph(&d, 7).unwrap().raw());
        let c = crate::io::write_observations(simulate_weibull_ph(&d, 8).unwrap().raw());
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn weibull_gradient_matches_differences() {
        let ds = simulate_weibull_ph(&big_design(60), 2).unwrap();
        let phi = [0.3, 0.5, 0.2, -0.4];
        let (_, g) = weibull_loglik_grad(&ds, &phi);
        for j in 0..phi.len() {
            let h = 1e-6;
            let mut up = phi;
            let mut down = phi;
            up[j] += h;
            down[j] -= h;
            let fd = (weibull_loglik_grad(&ds, &up).0 - weibull_loglik_grad(&ds, &down).0) / (2.0 * h);
            assert!((fd - g[j]).abs() < 1e-5 * g[j].abs().max(1.0), "{j}: {fd} vs {}", g[j]);
        }
    }

    #[test]
    fn weibull_consistency_uncensored() {
        let design = SimDesign { censor_prob: 1e-9, ..big_design(10_000) };
        let ds = simulate_weibull_ph(&design, 0).unwrap();
        let fit = weibull_pmle(&ds).unwrap();
        assert!((fit.theta / 2.0 - 1.0).abs() < 0.02, "{fit:?}");
        assert!((fit.sigma / 2.0 - 1.0).abs() < 0.02, "{fit:?}");
        assert!((fit.gamma[0] - 0.5).abs() < 0.05 && (fit.gamma[1] + 0.5).abs() < 0.05);
    }

    #[test]
    fn constant_covariate_is_unidentifiable() {
        let ds = simulate_weibull_ph(&big_design(30), 0).unwrap();
        let flat = ds.map_covariates(|x| vec![x[0], 1.0]).unwrap();
        assert_eq!(weibull_pmle(&flat).unwrap_err(), Error::Unidentifiable(1));
    }

    #[test]
    fn running_and_two_pass_means_agree() {
        let est: Vec<f64> = (0..997).map(|k| 0.5 + ((k * 7919) % 101) as f64 / 300.0 - 0.16).collect();
        let mut acc = MeanAccumulator::default();
        for e in &est {
            acc.push((e - 0.5).powi(2));
        }
        assert_abs_diff_eq!(acc.mean, mean_squared_error(&est, 0.5), epsilon = 1e-10);
    }

    #[test]
    fn exact_estimates_give_zero_error() {
        let design = SimDesign { replicates: 4, ..SimDesign::default() };
        let times = design.curve_grid();
        let curve: Vec<f64> = times.iter().map(|&t| design.true_survival(t)).collect();
        let perfect = ReplicateOutcome {
            gamma: [Some(vec![0.5, -0.5]), Some(vec![0.5, -0.5]), Some(vec![0.5, -0.5])],
            curve: [Some(curve.clone()), Some(curve.clone()), Some(curve)],
            ..ReplicateOutcome::default()
        };
        let report = aggregate(&design, &vec![perfect; 4]);
        for m in &report.methods {
            assert_eq!(m.failures, 0);
            assert!(m.mse.iter().chain(&m.curve_mse).all(|&v| v == 0.0));
        }
    }

    #[test]
    fn grid_bounds() {
        assert_eq!(replicate_grid(100).unwrap(), DegreeGrid { m0: 2, k: 18 });
        assert_eq!(replicate_grid(30).unwrap(), DegreeGrid { m0: 2, k: 8 });
        assert_eq!(replicate_grid(10).unwrap(), DegreeGrid { m0: 2, k: 2 });
    }
}
