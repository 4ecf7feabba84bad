//! Maximum approximate Bernstein likelihood fitting.
//!
//! The weights `p` are updated by the multiplicative fixed-point map
//! `p_j <- p_j Ψ̄_j(γ, p)`, the coefficients `γ` by damped Newton–Raphson,
//! and the two blocks alternate with the baseline covariate re-chosen as the
//! empirical minimiser of `γᵀx` after every Newton step.

use log::debug;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::likelihood::{information_from_hessian, PreparedData};
use crate::model::{BernsteinPHModel, Dataset};

/// Tolerances and iteration caps.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub p_tol: f64,
    pub loglik_tol: f64,
    pub gamma_tol: f64,
    pub max_fixed_point_iters: usize,
    pub max_newton_iters: usize,
    pub max_outer_iters: usize,
    pub interior_eps: f64,
    pub kkt_tol: f64,
    /// Interleave active-set Newton steps on the simplex with the
    /// fixed-point map once the iterates have settled.
    pub newton_polish: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            p_tol: 1e-7,
            loglik_tol: 1e-8,
            gamma_tol: 1e-8,
            max_fixed_point_iters: 5000,
            max_newton_iters: 100,
            max_outer_iters: 200,
            interior_eps: 1e-4,
            kkt_tol: 1e-6,
            newton_polish: true,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.p_tol, self.loglik_tol, self.gamma_tol, self.interior_eps, self.kkt_tol];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        if self.interior_eps >= 1.0 {
            return Err(Error::Domain("interior_eps must be below 1".into()));
        }
        if self.max_fixed_point_iters == 0 || self.max_newton_iters == 0 || self.max_outer_iters == 0 {
            return Err(Error::Domain("iteration caps must be positive".into()));
        }
        Ok(())
    }
}

/// Diagnostics of one fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// Log-likelihood after the initial weight solve and after every outer
    /// iteration.
    pub loglik_trace: Vec<f64>,
    pub kkt_residual: f64,
    pub converged: bool,
    pub outer_iters: usize,
    pub fixed_point_iters: usize,
    pub newton_iters: usize,
    pub gamma_hat: Vec<f64>,
    pub p_hat: Vec<f64>,
    pub x0_hat: Vec<f64>,
    pub baseline_index: Option<usize>,
    pub standard_errors: Option<Vec<f64>>,
}

impl FitReport {
    pub fn loglik(&self) -> f64 {
        self.loglik_trace.last().copied().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone)]
pub struct Fit {
    pub model: BernsteinPHModel,
    pub report: FitReport,
}

impl Fit {
    pub fn loglik(&self) -> f64 {
        self.report.loglik()
    }
}

/// Optional starting values for [`mable_fit_with`].
#[derive(Debug, Clone, Default)]
pub struct FitOptions {
    /// Overrides the dataset's default tail choice.
    pub has_tail: Option<bool>,
    pub gamma_init: Option<Vec<f64>>,
    /// Starting weights at the baseline implied by `gamma_init`.
    pub p_init: Option<Vec<f64>>,
}

/// Covariate vector attaining `min_i γᵀx_i` (first index on ties).
pub fn empirical_baseline(gamma: &[f64], dataset: &Dataset) -> (Vec<f64>, usize) {
    let mut best = (f64::INFINITY, 0usize);
    for (k, obs) in dataset.raw().iter().enumerate() {
        let v: f64 = gamma.iter().zip(&obs.x).map(|(g, x)| g * x).sum();
        if v < best.0 {
            best = (v, k);
        }
    }
    let x = dataset.raw().get(best.1).map_or_else(|| vec![0.0; gamma.len()], |o| o.x.clone());
    (x, best.1)
}

// Two covariate vectors whose linear predictors agree to rounding.
fn near_tie(gamma: &[f64], a: &[f64], b: &[f64]) -> bool {
    let va = dot(gamma, a);
    let vb = dot(gamma, b);
    (va - vb).abs() <= 1e-9 * (1.0 + va.abs().max(vb.abs()))
}

pub fn uniform_weights(width: usize) -> Vec<f64> {
    vec![1.0 / width as f64; width]
}

/// `(p + ε u) / (1 + ε)` when some component has left the interior.
pub fn project_interior(p: &mut [f64], eps: f64) {
    if p.iter().all(|&v| v > 1e-12) {
        return;
    }
    let u = 1.0 / p.len() as f64;
    for v in p.iter_mut() {
        *v = (v.max(0.0) + eps * u) / (1.0 + eps);
    }
    normalize(p);
}

fn normalize(p: &mut [f64]) {
    let total: f64 = p.iter().sum();
    for v in p.iter_mut() {
        *v /= total;
    }
}

/// Applies `p_j <- p_j Ψ̄_j` given `ΣΨ_j` and renormalises.
fn apply_fixed_point(p: &mut [f64], psi: &[f64], lambda: f64) -> Result<()> {
    for (j, (v, s)) in p.iter_mut().zip(psi).enumerate() {
        let factor = s / lambda;
        if factor < -1e-10 {
            return Err(Error::NegativeFactor { index: j, value: factor });
        }
        *v *= factor.max(0.0);
    }
    let total: f64 = p.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Singular("fixed-point update lost all mass".into()));
    }
    normalize(p);
    Ok(())
}

/// One fixed-point update at the coefficients and baseline installed in
/// `prepared`.
pub fn fixed_point_step(prepared: &PreparedData, p: &[f64]) -> Result<Vec<f64>> {
    let mut psi = vec![0.0; prepared.width()];
    prepared.psi_sum(p, &mut psi)?;
    let mut next = p.to_vec();
    apply_fixed_point(&mut next, &psi, prepared.lambda())?;
    Ok(next)
}

fn kkt_from_psi(psi: &[f64], lambda: f64, p: &[f64], p_tol: f64) -> f64 {
    psi.iter()
        .zip(p)
        .map(|(&s, &pj)| {
            let gap = s - lambda;
            if pj > p_tol {
                gap.abs()
            } else {
                gap.max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

/// Violation of `λ_n(γ) >= ΣΨ_j` with equality on the support of `p`.
pub fn kkt_residual(prepared: &PreparedData, p: &[f64], p_tol: f64) -> Result<f64> {
    let mut psi = vec![0.0; prepared.width()];
    prepared.psi_sum(p, &mut psi)?;
    Ok(kkt_from_psi(&psi, prepared.lambda(), p, p_tol))
}

/// Result of the weight solve at fixed `γ`.
#[derive(Debug, Clone)]
pub struct WeightSolution {
    pub p: Vec<f64>,
    pub loglik: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    /// Log-likelihood of every iterate, starting with `p0`.
    pub trace: Vec<f64>,
}

/// Fixed-point steps taken before the first Newton step, and between a
/// rejected Newton step and the next attempt.
const POLISH_WARMUP: usize = 10;
const POLISH_COOLDOWN: usize = 10;
const ROUNDING_SLACK: f64 = 1e-13;
/// Newton steps keep every coordinate at or above `p_tol * FLOOR_FRACTION`:
/// at an exact zero the log-likelihood can have a one-sided slope that
/// differs from its limit just inside the simplex.
const FLOOR_FRACTION: f64 = 1e-4;

/// One Newton step for `max ℓ(p)` subject to `Σp = 1` on the free
/// coordinates (support of `p` plus coordinates whose KKT inequality is
/// violated), limited by a ratio test to stay in the simplex and halved until
/// the log-likelihood does not decrease.
fn polish_step(prepared: &PreparedData, p: &[f64], ll: f64, psi: &[f64], config: &FitConfig) -> Result<Option<(Vec<f64>, f64)>> {
    let lambda = prepared.lambda();
    let floor = config.p_tol * FLOOR_FRACTION;
    let residual = kkt_from_psi(psi, lambda, p, config.p_tol);
    let mut free: Vec<usize> =
        (0..p.len()).filter(|&j| p[j] > config.p_tol || psi[j] - lambda > 0.5 * config.kkt_tol).collect();
    let mut psi_new = vec![0.0; p.len()];
    let h = prepared.hessian_p(p)?;
    while free.len() >= 2 {
        let k = free.len();
        let a = DMatrix::from_fn(k, k, |r, c| -h[(free[r], free[c])]);
        let scale = a.diagonal().amax();
        if !(scale > 0.0 && scale.is_finite()) {
            return Ok(None);
        }
        let mut mu = 1e-12 * scale;
        let chol = loop {
            let damped = &a + DMatrix::identity(k, k) * mu;
            if let Some(c) = damped.cholesky() {
                break c;
            }
            mu *= 100.0;
            if mu > scale {
                return Ok(None);
            }
        };
        let g = DVector::from_fn(k, |r, _| psi[free[r]]);
        let ones = DVector::from_element(k, 1.0);
        let ag = chol.solve(&g);
        let a1 = chol.solve(&ones);
        let nu = ones.dot(&ag) / ones.dot(&a1);
        let step = ag - a1 * nu;

        // coordinates already at the floor that the step would push down
        // leave the free set
        let pinned: Vec<usize> = (0..k).filter(|&r| p[free[r]] <= floor && step[r] < 0.0).map(|r| free[r]).collect();
        if !pinned.is_empty() {
            free.retain(|j| !pinned.contains(j));
            continue;
        }
        let (mut alpha, blocking) = (0..k)
            .filter(|&r| step[r] < 0.0)
            .map(|r| ((p[free[r]] - floor) / -step[r], r))
            .fold((1.0, None), |acc, (a, r)| if a < acc.0 { (a, Some(r)) } else { acc });
        if let Some(r) = blocking {
            if alpha < 1e-10 && p[free[r]] <= config.p_tol {
                free.remove(r);
                continue;
            }
        }
        // negligible coordinates whose KKT inequality already holds are
        // lowered to the floor
        let mut base = p.to_vec();
        for (j, v) in base.iter_mut().enumerate() {
            if !free.contains(&j) && psi[j] < lambda && *v <= config.p_tol {
                *v = v.min(floor);
            }
        }
        for _ in 0..20 {
            let mut cand = base.clone();
            for (r, &j) in free.iter().enumerate() {
                cand[j] = (p[j] + alpha * step[r]).max(floor.min(p[j]));
            }
            normalize(&mut cand);
            let ll_new = prepared.psi_sum(&cand, &mut psi_new)?;
            if ll_new > ll {
                return Ok(Some((cand, ll_new)));
            }
            // within rounding of the current value, progress is judged by the
            // KKT residual instead
            let noise = ROUNDING_SLACK * ll.abs().max(1.0);
            if ll_new >= ll - noise && kkt_from_psi(&psi_new, lambda, &cand, config.p_tol) < residual {
                return Ok(Some((cand, ll_new)));
            }
            alpha *= 0.5;
        }
        return Ok(None);
    }
    Ok(None)
}

/// Maximises `ℓ_m(γ, p)` over the simplex at the coefficients and baseline
/// installed in `prepared`, starting from an interior `p0`.
///
/// The fixed-point map does the bulk of the work; with
/// [`FitConfig::newton_polish`] Newton steps on the active set are
/// interleaved once the iterates have settled. Stops when the KKT residual
/// drops below `kkt_tol`.
pub fn solve_p(prepared: &PreparedData, p0: &[f64], config: &FitConfig) -> Result<WeightSolution> {
    solve_p_observed(prepared, p0, config, |_| {})
}

/// [`solve_p`] calling `observe` on every iterate, the start included.
pub fn solve_p_observed(
    prepared: &PreparedData,
    p0: &[f64],
    config: &FitConfig,
    mut observe: impl FnMut(&[f64]),
) -> Result<WeightSolution> {
    let w = prepared.width();
    if p0.len() != w {
        return Err(Error::Domain(format!("expected {w} starting weights, got {}", p0.len())));
    }
    if p0.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Domain("starting weights must be strictly inside the simplex".into()));
    }
    let lambda = prepared.lambda();
    let mut p = p0.to_vec();
    normalize(&mut p);
    let mut psi = vec![0.0; w];
    let mut trace = Vec::new();
    let mut residual = f64::INFINITY;
    let mut next_polish = POLISH_WARMUP;
    for iteration in 0..config.max_fixed_point_iters {
        observe(&p);
        let ll = prepared.psi_sum(&p, &mut psi)?;
        trace.push(ll);
        residual = kkt_from_psi(&psi, lambda, &p, config.p_tol);
        if residual < config.kkt_tol {
            return Ok(WeightSolution { p, loglik: ll, kkt_residual: residual, iterations: iteration, trace });
        }
        if config.newton_polish && iteration >= next_polish {
            match polish_step(prepared, &p, ll, &psi, config)? {
                Some((cand, _)) => {
                    p = cand;
                    continue;
                }
                None => next_polish = iteration + POLISH_COOLDOWN,
            }
        }
        apply_fixed_point(&mut p, &psi, lambda)?;
    }
    Err(Error::NotConverged {
        what: "fixed-point iteration",
        iterations: config.max_fixed_point_iters,
        residual,
        last: p,
    })
}

/// Result of the Newton solve in `γ`.
#[derive(Debug, Clone)]
pub struct NewtonSolution {
    pub gamma: Vec<f64>,
    pub loglik: f64,
    pub iterations: usize,
}

const MAX_HALVINGS: usize = 30;

/// Maximises `ℓ_m(γ, p)` over `γ` at fixed `p` and baseline by Newton steps
/// halved until the log-likelihood does not decrease.
pub fn newton_gamma(prepared: &PreparedData, p: &[f64], gamma0: &[f64], config: &FitConfig) -> Result<NewtonSolution> {
    let objective = prepared.gamma_objective(p)?;
    let mut gamma = gamma0.to_vec();
    for iteration in 0..config.max_newton_iters {
        let derivs = objective.derivatives(&gamma)?;
        if !derivs.loglik.is_finite() {
            return Err(Error::Singular("log-likelihood is not finite at the Newton start".into()));
        }
        if derivs.gradient.amax() < config.gamma_tol {
            return Ok(NewtonSolution { gamma, loglik: derivs.loglik, iterations: iteration });
        }
        let chol = (-derivs.hessian.clone())
            .cholesky()
            .ok_or_else(|| Error::Singular("Hessian in gamma is not negative definite".into()))?;
        let step: DVector<f64> = chol.solve(&derivs.gradient);
        let predicted = derivs.gradient.dot(&step);
        if predicted < 1e-14 * derivs.loglik.abs().max(1.0) {
            return Ok(NewtonSolution { gamma, loglik: derivs.loglik, iterations: iteration });
        }
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let cand: Vec<f64> = gamma.iter().zip(step.iter()).map(|(g, s)| g + scale * s).collect();
            let ll = objective.loglik(&cand);
            if ll.is_finite() && ll >= derivs.loglik {
                accepted = Some(cand);
                break;
            }
            scale *= 0.5;
        }
        match accepted {
            Some(cand) => gamma = cand,
            None => {
                return Err(Error::NotConverged {
                    what: "Newton line search",
                    iterations: iteration,
                    residual: derivs.gradient.amax(),
                    last: gamma,
                })
            }
        }
    }
    let residual = objective.derivatives(&gamma)?.gradient.amax();
    Err(Error::NotConverged { what: "Newton iteration", iterations: config.max_newton_iters, residual, last: gamma })
}

/// Starting weights at a new baseline `x0'`: `p_i ∝ f_m(i/m | x0'; γ, p)`
/// for `i <= m` and `p_{m+1} <- p_{m+1}^exp(γᵀ(x0' - x0))`.
fn rebase_weights(old: &BernsteinPHModel, shift: f64) -> Vec<f64> {
    let m = old.m;
    let eta = shift.exp();
    let tail = if old.has_tail { old.tail_mass().powf(eta) } else { 0.0 };
    let mut p: Vec<f64> = (0..=m)
        .map(|i| {
            let mut u = if m == 0 { 0.5 } else { i as f64 / m as f64 };
            let mut s0 = old.scaled_survival(u);
            if s0 <= 0.0 && eta < 1.0 {
                u = 1.0 - 0.5 / (m.max(1) as f64);
                s0 = old.scaled_survival(u);
            }
            let f0 = old.scaled_density(u);
            let v = eta * s0.powf(eta - 1.0) * f0;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        })
        .collect();
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        for v in p.iter_mut() {
            *v *= (1.0 - tail) / total;
        }
    } else {
        p.iter_mut().for_each(|v| *v = (1.0 - tail) / (m + 1) as f64);
    }
    if old.has_tail {
        p.push(tail);
    }
    p
}

fn solve_or_keep(prepared: &PreparedData, p0: &[f64], config: &FitConfig, ok: &mut bool) -> Result<WeightSolution> {
    match solve_p(prepared, p0, config) {
        Ok(sol) => Ok(sol),
        Err(Error::NotConverged { iterations, residual, last, .. }) => {
            debug!("weight solve stopped at the cap with residual {residual:e}");
            *ok = false;
            let loglik = prepared.loglik(&last)?;
            Ok(WeightSolution { p: last, loglik, kkt_residual: residual, iterations, trace: vec![loglik] })
        }
        Err(e) => Err(e),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Fits degree `m` by alternating weight solves and Newton steps.
pub fn mable_fit(dataset: &Dataset, m: usize, gamma_init: Option<&[f64]>, config: &FitConfig) -> Result<Fit> {
    let options = FitOptions { gamma_init: gamma_init.map(<[f64]>::to_vec), ..FitOptions::default() };
    mable_fit_with(dataset, m, &options, config)
}

pub fn mable_fit_with(dataset: &Dataset, m: usize, options: &FitOptions, config: &FitConfig) -> Result<Fit> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::Data("cannot fit an empty dataset".into()));
    }
    let has_tail = options.has_tail.unwrap_or_else(|| dataset.default_tail());
    let d = dataset.dim();
    if d == 0 {
        return fit_weights_only(dataset, m, has_tail, options.p_init.clone(), config);
    }
    if m == 0 {
        return Err(Error::Domain("degree must be at least 1 when covariates are present".into()));
    }
    let mut gamma = options.gamma_init.clone().unwrap_or_else(|| vec![0.0; d]);
    if gamma.len() != d {
        return Err(Error::Domain(format!("gamma_init has {} entries, data has {d} covariates", gamma.len())));
    }

    let mut prepared = PreparedData::new(dataset, m, has_tail)?;
    let (mut x0, mut base_idx) = empirical_baseline(&gamma, dataset);
    prepared.set_coefficients(&gamma, &x0)?;
    let mut p0 = options.p_init.clone().unwrap_or_else(|| uniform_weights(prepared.width()));
    if p0.len() != prepared.width() {
        return Err(Error::Domain(format!("p_init has {} entries, expected {}", p0.len(), prepared.width())));
    }
    project_interior(&mut p0, config.interior_eps);

    let mut inner_ok = true;
    let sol = solve_or_keep(&prepared, &p0, config, &mut inner_ok)?;
    let mut fixed_point_iters = sol.iterations;
    let mut p = sol.p;
    let mut kkt = sol.kkt_residual;
    let mut trace = vec![sol.loglik];
    let mut newton_iters = 0;
    let mut outer_converged = false;
    let mut outer = 0;
    let mut history = vec![base_idx];
    let mut locked: Option<usize> = None;

    while outer < config.max_outer_iters {
        outer += 1;
        let newton = newton_gamma(&prepared, &p, &gamma, config)?;
        newton_iters += newton.iterations;
        let gamma_new = newton.gamma;

        let (argmin_x0, argmin_idx) = empirical_baseline(&gamma_new, dataset);
        let (cand_x0, cand_idx) = match locked {
            Some(k) if near_tie(&gamma_new, &dataset.raw()[k].x, &argmin_x0) => (dataset.raw()[k].x.clone(), k),
            _ => {
                locked = None;
                (argmin_x0, argmin_idx)
            }
        };
        let diff: Vec<f64> = cand_x0.iter().zip(&x0).map(|(a, b)| a - b).collect();
        let shift = dot(&gamma_new, &diff);
        let mut start = if shift.abs() < 1e-12 {
            p.clone()
        } else {
            let old = BernsteinPHModel {
                m,
                has_tail,
                p: p.clone(),
                gamma: gamma_new.clone(),
                x0: x0.clone(),
                tau: 1.0,
            };
            rebase_weights(&old, shift)
        };
        project_interior(&mut start, config.interior_eps);

        if locked.is_none() && history.len() >= 2 {
            let prev = history[history.len() - 1];
            let before = history[history.len() - 2];
            if cand_idx == before
                && cand_idx != prev
                && near_tie(&gamma_new, &dataset.raw()[prev].x, &dataset.raw()[cand_idx].x)
            {
                let keep = cand_idx.min(prev);
                debug!("baseline oscillates between {prev} and {cand_idx}; keeping {keep}");
                locked = Some(keep);
            }
        }
        history.push(cand_idx);
        x0 = cand_x0;
        base_idx = cand_idx;
        prepared.set_coefficients(&gamma_new, &x0)?;
        let sol = solve_or_keep(&prepared, &start, config, &mut inner_ok)?;
        fixed_point_iters += sol.iterations;
        kkt = sol.kkt_residual;

        let dgamma = gamma_new.iter().zip(&gamma).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let dll = (sol.loglik - trace.last().copied().unwrap_or(f64::NAN)).abs();
        p = sol.p;
        gamma = gamma_new;
        trace.push(sol.loglik);
        if dll < config.loglik_tol && dgamma < config.gamma_tol {
            outer_converged = true;
            break;
        }
    }

    let standard_errors = prepared
        .gamma_objective(&p)
        .and_then(|obj| obj.derivatives(&gamma))
        .and_then(|dv| information_from_hessian(&dv.hessian, dataset.len()))
        .map(|info| info.standard_errors)
        .ok();
    let model = BernsteinPHModel::new(m, has_tail, p.clone(), gamma.clone(), x0.clone(), dataset.tau())?;
    let report = FitReport {
        loglik_trace: trace,
        kkt_residual: kkt,
        converged: outer_converged && inner_ok,
        outer_iters: outer,
        fixed_point_iters,
        newton_iters,
        gamma_hat: gamma,
        p_hat: p,
        x0_hat: x0,
        baseline_index: Some(base_idx),
        standard_errors,
    };
    Ok(Fit { model, report })
}

fn fit_weights_only(dataset: &Dataset, m: usize, has_tail: bool, p_init: Option<Vec<f64>>, config: &FitConfig) -> Result<Fit> {
    let prepared = PreparedData::new(dataset, m, has_tail)?;
    let mut p0 = p_init.unwrap_or_else(|| uniform_weights(prepared.width()));
    if p0.len() != prepared.width() {
        return Err(Error::Domain(format!("p_init has {} entries, expected {}", p0.len(), prepared.width())));
    }
    project_interior(&mut p0, config.interior_eps);
    let mut ok = true;
    let sol = solve_or_keep(&prepared, &p0, config, &mut ok)?;
    let model = BernsteinPHModel::new(m, has_tail, sol.p.clone(), vec![], vec![], dataset.tau())?;
    let report = FitReport {
        loglik_trace: vec![sol.loglik],
        kkt_residual: sol.kkt_residual,
        converged: ok,
        outer_iters: 0,
        fixed_point_iters: sol.iterations,
        newton_iters: 0,
        gamma_hat: vec![],
        p_hat: sol.p,
        x0_hat: vec![],
        baseline_index: None,
        standard_errors: None,
    };
    Ok(Fit { model, report })
}

/// Weights-only fit for data without covariates: the EM iteration
/// `p_j <- (p_j / n) Σ_i Ψ_j(p; z_i)`.
pub fn fit_no_covariate(dataset: &Dataset, m: usize, config: &FitConfig) -> Result<Fit> {
    if dataset.dim() != 0 {
        return Err(Error::Domain("fit_no_covariate needs data without covariates".into()));
    }
    mable_fit_with(dataset, m, &FitOptions::default(), config)
}

/// Two-sample fit reported in the caller's group labelling.
#[derive(Debug, Clone)]
pub struct TwoSampleFit {
    /// Fit in the working orientation, where the coefficient is nonnegative.
    pub fit: Fit,
    /// Whether groups were relabelled `x -> 1 - x` for the working fit.
    pub switched: bool,
}

impl TwoSampleFit {
    /// Log hazard ratio of group 1 versus group 0 in the original labels.
    pub fn gamma(&self) -> f64 {
        let g = self.fit.model.gamma[0];
        if self.switched {
            -g
        } else {
            g
        }
    }

    pub fn standard_error(&self) -> Option<f64> {
        self.fit.report.standard_errors.as_ref().map(|se| se[0])
    }

    /// Survival of group `group ∈ {0, 1}` in the original labels.
    pub fn survival(&self, t: f64, group: u8) -> Result<f64> {
        let working = if self.switched { 1 - group } else { group };
        self.fit.model.conditional_survival(t, &[working as f64])
    }

    pub fn loglik(&self) -> f64 {
        self.fit.loglik()
    }
}

pub fn two_sample_fit(dataset: &Dataset, m: usize, config: &FitConfig) -> Result<TwoSampleFit> {
    if dataset.dim() != 1 || dataset.raw().iter().any(|o| o.x[0] != 0.0 && o.x[0] != 1.0) {
        return Err(Error::Data("two-sample fit needs a single 0/1 covariate".into()));
    }
    let fit = mable_fit(dataset, m, None, config)?;
    if fit.model.gamma[0] >= 0.0 {
        return Ok(TwoSampleFit { fit, switched: false });
    }
    let swapped = dataset.map_covariates(|x| vec![1.0 - x[0]])?;
    let init = [-fit.model.gamma[0]];
    let fit = mable_fit(&swapped, m, Some(&init), config)?;
    Ok(TwoSampleFit { fit, switched: true })
}
