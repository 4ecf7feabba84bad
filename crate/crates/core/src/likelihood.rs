//! Bernstein approximate log-likelihood of the PH model and its derivatives.
//!
//! Everything here works on the rescaled time axis `[0, 1]`. Basis rows are
//! cached once per degree in [`PreparedData`]; the covariate offsets
//! `x̃ = x - x0` and relative risks `η = exp(γᵀx̃)` are refreshed whenever
//! `γ` or the baseline `x0` change.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::bernstein::{beta_density_row, beta_survival_row};
use crate::error::{Error, Result};
use crate::model::{BernsteinPHModel, Dataset, Event, Observation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Exact,
    Interval,
}

/// Cached basis rows and covariate offsets for one degree.
///
/// For an exact time `y` the two rows are `β_m(y)` (tail entry 0) and
/// `B̄_m(y)` (tail entry 1). For an interval they are `B̄_m(y1)` and
/// `B̄_m(y2)`, the latter all zeros when `y2 = ∞`.
#[derive(Debug, Clone)]
pub struct PreparedData {
    m: usize,
    has_tail: bool,
    width: usize,
    kinds: Vec<Kind>,
    rows: Vec<f64>,
    d: usize,
    x: Vec<f64>,
    x0: Vec<f64>,
    gamma: Vec<f64>,
    offsets: Vec<f64>,
    eta: Vec<f64>,
}

fn survival_row_with_tail(m: usize, has_tail: bool, t: Option<f64>) -> Result<Vec<f64>> {
    match t {
        None => Ok(vec![0.0; m + 1 + usize::from(has_tail)]),
        Some(t) => {
            let mut row = beta_survival_row(m, t)?;
            if has_tail {
                row.push(1.0);
            }
            Ok(row)
        }
    }
}

impl PreparedData {
    pub fn new(dataset: &Dataset, m: usize, has_tail: bool) -> Result<Self> {
        let width = m + 1 + usize::from(has_tail);
        let n = dataset.len();
        let d = dataset.dim();
        let mut kinds = Vec::with_capacity(n);
        let mut rows = Vec::with_capacity(2 * n * width);
        let mut x = Vec::with_capacity(n * d);
        for obs in dataset.scaled() {
            match obs.event {
                Event::Exact(y) => {
                    kinds.push(Kind::Exact);
                    let mut beta = beta_density_row(m, y)?;
                    if has_tail {
                        beta.push(0.0);
                    }
                    rows.extend(beta);
                    rows.extend(survival_row_with_tail(m, has_tail, Some(y))?);
                }
                Event::Interval { lower, upper } => {
                    kinds.push(Kind::Interval);
                    rows.extend(survival_row_with_tail(m, has_tail, Some(lower))?);
                    rows.extend(survival_row_with_tail(m, has_tail, upper)?);
                }
            }
            x.extend_from_slice(&obs.x);
        }
        let mut prepared = Self {
            m,
            has_tail,
            width,
            kinds,
            rows,
            d,
            x,
            x0: vec![0.0; d],
            gamma: vec![0.0; d],
            offsets: vec![0.0; n * d],
            eta: vec![1.0; n],
        };
        prepared.refresh();
        Ok(prepared)
    }

    /// Prepares the data and installs the coefficients and baseline of `model`.
    pub fn for_model(model: &BernsteinPHModel, dataset: &Dataset) -> Result<Self> {
        if model.dim() != dataset.dim() {
            return Err(Error::Domain(format!(
                "model has {} covariates, data has {}",
                model.dim(),
                dataset.dim()
            )));
        }
        let mut prepared = Self::new(dataset, model.m, model.has_tail)?;
        prepared.set_coefficients(&model.gamma, &model.x0)?;
        Ok(prepared)
    }

    pub fn set_coefficients(&mut self, gamma: &[f64], x0: &[f64]) -> Result<()> {
        if gamma.len() != self.d || x0.len() != self.d {
            return Err(Error::Domain(format!("expected covariate dimension {}", self.d)));
        }
        self.gamma.copy_from_slice(gamma);
        self.x0.copy_from_slice(x0);
        self.refresh();
        Ok(())
    }

    fn refresh(&mut self) {
        let d = self.d;
        for i in 0..self.len() {
            let mut lin = 0.0;
            for j in 0..d {
                let v = self.x[i * d + j] - self.x0[j];
                self.offsets[i * d + j] = v;
                lin += self.gamma[j] * v;
            }
            self.eta[i] = lin.exp();
        }
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn has_tail(&self) -> bool {
        self.has_tail
    }

    /// Number of weights `m* + 1`.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    /// `λ_n(γ) = Σ_i exp(γᵀx̃_i)`.
    pub fn lambda(&self) -> f64 {
        self.eta.iter().sum()
    }

    pub fn offset(&self, i: usize) -> &[f64] {
        &self.offsets[i * self.d..(i + 1) * self.d]
    }

    pub fn covariate(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    fn row_a(&self, i: usize) -> &[f64] {
        let start = 2 * i * self.width;
        &self.rows[start..start + self.width]
    }

    fn row_b(&self, i: usize) -> &[f64] {
        let start = (2 * i + 1) * self.width;
        &self.rows[start..start + self.width]
    }

    pub fn is_exact(&self, i: usize) -> bool {
        self.kinds[i] == Kind::Exact
    }

    /// Basis rows of observation `i`: `(β(y), B̄(y))` for an exact time,
    /// `(B̄(y1), B̄(y2))` for an interval.
    pub fn rows(&self, i: usize) -> (&[f64], &[f64]) {
        (self.row_a(i), self.row_b(i))
    }

    fn check_weights(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.width {
            return Err(Error::Domain(format!("expected {} weights, got {}", self.width, p.len())));
        }
        Ok(())
    }

    /// Log-likelihood contribution of observation `i`.
    pub fn loglik_obs(&self, i: usize, p: &[f64]) -> f64 {
        let (u, v) = (dot(self.row_a(i), p), dot(self.row_b(i), p));
        let eta = self.eta[i];
        match self.kinds[i] {
            Kind::Exact => exact_log_density(eta.ln(), eta, u, v),
            Kind::Interval => interval_log_prob(eta, u.ln(), v.ln()),
        }
    }

    /// `ℓ_m(γ, p) = Σ_i ℓ_m(γ, p; z_i)`; `-∞` is an ordinary value.
    pub fn loglik(&self, p: &[f64]) -> Result<f64> {
        self.check_weights(p)?;
        Ok((0..self.len()).map(|i| self.loglik_obs(i, p)).sum())
    }

    /// Writes `Σ_i Ψ_j(γ, p; z_i)` into `out` and returns the log-likelihood.
    pub fn psi_sum(&self, p: &[f64], out: &mut [f64]) -> Result<f64> {
        self.check_weights(p)?;
        out.fill(0.0);
        let mut ll = 0.0;
        for i in 0..self.len() {
            let (a, b) = (self.row_a(i), self.row_b(i));
            let (u, v) = (dot(a, p), dot(b, p));
            let eta = self.eta[i];
            let (wa, wb) = match self.kinds[i] {
                Kind::Exact => {
                    ll += exact_log_density(eta.ln(), eta, u, v);
                    exact_psi_weights(eta, u, v, i)?
                }
                Kind::Interval => {
                    let w = interval_weights(eta, u, v, i)?;
                    ll += w.loglik;
                    for j in 0..self.width {
                        out[j] += w.psi(a[j], b[j]);
                    }
                    continue;
                }
            };
            for j in 0..self.width {
                out[j] += wa * a[j] + wb * b[j];
            }
        }
        Ok(ll)
    }

    pub fn grad_p(&self, p: &[f64]) -> Result<Vec<f64>> {
        let mut g = vec![0.0; self.width];
        self.psi_sum(p, &mut g)?;
        Ok(g)
    }

    /// Hessian of the log-likelihood in `p`.
    pub fn hessian_p(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.check_weights(p)?;
        let w = self.width;
        let mut h = DMatrix::<f64>::zeros(w, w);
        let mut psi = vec![0.0; w];
        for i in 0..self.len() {
            let (a, b) = (self.row_a(i), self.row_b(i));
            let (u, v) = (dot(a, p), dot(b, p));
            let eta = self.eta[i];
            match self.kinds[i] {
                Kind::Exact => {
                    if u <= 0.0 {
                        return Err(singular(i, "density vanishes at an exact time"));
                    }
                    let ca = 1.0 / (u * u);
                    let cb = if eta == 1.0 {
                        0.0
                    } else if v > 0.0 {
                        (eta - 1.0) / (v * v)
                    } else {
                        return Err(singular(i, "survival vanishes at an exact time"));
                    };
                    rank_one(&mut h, a, -ca);
                    rank_one(&mut h, b, -cb);
                }
                Kind::Interval => {
                    let iw = interval_weights(eta, u, v, i)?;
                    for j in 0..w {
                        psi[j] = iw.psi(a[j], b[j]);
                    }
                    let scale = eta * (eta - 1.0);
                    if scale != 0.0 {
                        rank_one(&mut h, a, scale * iw.curv_a);
                        rank_one(&mut h, b, -scale * iw.curv_b);
                    }
                    rank_one(&mut h, &psi, -1.0);
                }
            }
        }
        Ok(h)
    }

    /// Baseline log-survival (and log-density) values at `p`, the only way
    /// the `γ`-derivatives depend on `p`.
    pub fn baseline_logs(&self, p: &[f64]) -> Result<Vec<[f64; 2]>> {
        self.check_weights(p)?;
        Ok((0..self.len())
            .map(|i| [dot(self.row_a(i), p).ln(), dot(self.row_b(i), p).ln()])
            .collect())
    }

    /// Log-likelihood as a function of `γ` at fixed `p` and baseline.
    pub fn gamma_objective(&self, p: &[f64]) -> Result<GammaObjective<'_>> {
        Ok(GammaObjective { data: self, logs: self.baseline_logs(p)? })
    }
}

/// Log-likelihood in `γ` with the baseline values frozen.
#[derive(Debug, Clone)]
pub struct GammaObjective<'a> {
    data: &'a PreparedData,
    logs: Vec<[f64; 2]>,
}

/// Value, gradient and Hessian of the log-likelihood in `γ`.
#[derive(Debug, Clone)]
pub struct GammaDerivatives {
    pub loglik: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

impl GammaObjective<'_> {
    fn linear(&self, i: usize, gamma: &[f64]) -> f64 {
        self.data.offset(i).iter().zip(gamma).map(|(x, g)| x * g).sum()
    }

    pub fn loglik(&self, gamma: &[f64]) -> f64 {
        (0..self.data.len())
            .map(|i| {
                let lin = self.linear(i, gamma);
                let eta = lin.exp();
                let [l1, l2] = self.logs[i];
                match self.data.kinds[i] {
                    Kind::Exact => exact_log_density_from_logs(lin, eta, l1, l2),
                    Kind::Interval => interval_log_prob(eta, l1, l2),
                }
            })
            .sum()
    }

    /// Per-observation `(ℓ_i, ∂ℓ_i/∂(γᵀx̃), ∂²ℓ_i/∂(γᵀx̃)²)`.
    fn scalar_terms(&self, i: usize, gamma: &[f64]) -> Result<(f64, f64, f64)> {
        let lin = self.linear(i, gamma);
        let eta = lin.exp();
        let [l1, l2] = self.logs[i];
        match self.data.kinds[i] {
            Kind::Exact => {
                let ll = exact_log_density_from_logs(lin, eta, l1, l2);
                if l2 == f64::NEG_INFINITY {
                    return Err(singular(i, "survival vanishes at an exact time"));
                }
                Ok((ll, 1.0 + eta * l2, eta * l2))
            }
            Kind::Interval => {
                if l1 == f64::NEG_INFINITY {
                    return Err(singular(i, "interval lies beyond the support"));
                }
                let ll = interval_log_prob(eta, l1, l2);
                if l2 == f64::NEG_INFINITY {
                    return Ok((ll, eta * l1, eta * l1));
                }
                let gap = l1 - l2;
                let denom = (eta * gap).exp_m1();
                if !(denom > 0.0) {
                    return Err(singular(i, "interval has zero probability"));
                }
                let q = 1.0 / denom;
                let g = eta * (l1 + q * gap);
                let h = eta * (l1 * (1.0 + eta * l1) + q * gap * (1.0 + eta * (l1 + l2))) - g * g;
                Ok((ll, g, h))
            }
        }
    }

    pub fn derivatives(&self, gamma: &[f64]) -> Result<GammaDerivatives> {
        let d = self.data.d;
        if gamma.len() != d {
            return Err(Error::Domain(format!("expected {d} coefficients")));
        }
        let mut loglik = 0.0;
        let mut gradient = DVector::zeros(d);
        let mut hessian = DMatrix::zeros(d, d);
        for i in 0..self.data.len() {
            let (ll, g, h) = self.scalar_terms(i, gamma)?;
            loglik += ll;
            let xt = self.data.offset(i);
            for r in 0..d {
                gradient[r] += g * xt[r];
                for c in 0..d {
                    hessian[(r, c)] += h * xt[r] * xt[c];
                }
            }
        }
        Ok(GammaDerivatives { loglik, gradient, hessian })
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rank_one(h: &mut DMatrix<f64>, v: &[f64], c: f64) {
    if c == 0.0 {
        return;
    }
    let w = v.len();
    for k in 0..w {
        let vk = c * v[k];
        if vk == 0.0 {
            continue;
        }
        for j in 0..w {
            h[(j, k)] += v[j] * vk;
        }
    }
}

fn singular(i: usize, what: &str) -> Error {
    Error::Singular(format!("observation {i}: {what}"))
}

/// `γᵀx̃ + log f + (η - 1) log S` for an exact time.
fn exact_log_density(lin: f64, eta: f64, f: f64, s: f64) -> f64 {
    exact_log_density_from_logs(lin, eta, f.ln(), s.ln())
}

fn exact_log_density_from_logs(lin: f64, eta: f64, ln_f: f64, ln_s: f64) -> f64 {
    if ln_f == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let tail = if eta == 1.0 { 0.0 } else { (eta - 1.0) * ln_s };
    lin + ln_f + tail
}

/// `log[S1^η - S2^η]` evaluated as `η log S1 + log1p(-exp(η (log S2 - log S1)))`.
pub(crate) fn interval_log_prob(eta: f64, ln_s1: f64, ln_s2: f64) -> f64 {
    if ln_s1 == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if ln_s2 == f64::NEG_INFINITY {
        return eta * ln_s1;
    }
    eta * ln_s1 + (-(eta * (ln_s2 - ln_s1)).exp()).ln_1p()
}

fn exact_psi_weights(eta: f64, f: f64, s: f64, i: usize) -> Result<(f64, f64)> {
    if f <= 0.0 {
        return Err(singular(i, "density vanishes at an exact time"));
    }
    let wb = if eta == 1.0 {
        0.0
    } else if s > 0.0 {
        (eta - 1.0) / s
    } else {
        return Err(singular(i, "survival vanishes at an exact time"));
    };
    Ok((1.0 / f, wb))
}

/// Scalar weights of an interval-censored contribution: the coefficients
/// of `Ψ` and the curvature coefficients `S1^(η-2) / D`, `S2^(η-2) / D`
/// with `D = S1^η - S2^η`.
struct IntervalWeights {
    loglik: f64,
    /// `Ψ = diff·(B̄(y1) - B̄(y2)) + rest·B̄(y2)`; both coefficients are
    /// nonnegative when `η >= 1`, so no cancellation occurs for short
    /// intervals.
    diff: f64,
    rest: f64,
    curv_a: f64,
    curv_b: f64,
}

impl IntervalWeights {
    fn psi(&self, a: f64, b: f64) -> f64 {
        self.diff * (a - b) + self.rest * b
    }
}

fn interval_weights(eta: f64, s1: f64, s2: f64, i: usize) -> Result<IntervalWeights> {
    if s1 <= 0.0 {
        return Err(singular(i, "interval lies beyond the support"));
    }
    let (ln1, ln2) = (s1.ln(), s2.ln());
    let gap = ln2 - ln1;
    let e = eta * gap;
    let r = e.exp();
    let omr = -e.exp_m1();
    if !(omr > 0.0) {
        return Err(singular(i, "interval has zero probability"));
    }
    let loglik = eta * ln1 + omr.ln();
    let diff = eta / (s1 * omr);
    let (rest, curv_b) = if s2 > 0.0 {
        // η (1 - (S2/S1)^(η-1)) / (S1 (1 - r))
        (-diff * ((eta - 1.0) * gap).exp_m1(), r / (s2 * s2 * omr))
    } else if eta == 1.0 {
        (0.0, 0.0)
    } else {
        (diff, 0.0)
    };
    Ok(IntervalWeights { loglik, diff, rest, curv_a: 1.0 / (s1 * s1 * omr), curv_b })
}

/// Log-likelihood of one (rescaled) observation, evaluated from the model's
/// own survival and density functions rather than cached rows.
pub fn loglik_obs(model: &BernsteinPHModel, obs: &Observation) -> Result<f64> {
    let lin = model.linear_predictor(&obs.x)?;
    let eta = lin.exp();
    match obs.event {
        Event::Exact(y) => Ok(exact_log_density(lin, eta, model.scaled_density(y), model.scaled_survival(y))),
        Event::Interval { lower, upper } => {
            if let Some(u) = upper {
                if u <= lower {
                    return Err(Error::Data(format!("interval ({lower}, {u}] is empty")));
                }
            }
            let s1 = model.scaled_survival(lower);
            let s2 = upper.map_or(0.0, |u| model.scaled_survival(u));
            Ok(interval_log_prob(eta, s1.ln(), s2.ln()))
        }
    }
}

pub fn loglik_total(model: &BernsteinPHModel, dataset: &Dataset) -> Result<f64> {
    PreparedData::for_model(model, dataset)?.loglik(&model.p)
}

pub fn grad_p(model: &BernsteinPHModel, dataset: &Dataset) -> Result<Vec<f64>> {
    PreparedData::for_model(model, dataset)?.grad_p(&model.p)
}

pub fn hessian_p(model: &BernsteinPHModel, dataset: &Dataset) -> Result<DMatrix<f64>> {
    PreparedData::for_model(model, dataset)?.hessian_p(&model.p)
}

pub fn grad_gamma(model: &BernsteinPHModel, dataset: &Dataset) -> Result<DVector<f64>> {
    let prepared = PreparedData::for_model(model, dataset)?;
    Ok(prepared.gamma_objective(&model.p)?.derivatives(&model.gamma)?.gradient)
}

pub fn hessian_gamma(model: &BernsteinPHModel, dataset: &Dataset) -> Result<DMatrix<f64>> {
    let prepared = PreparedData::for_model(model, dataset)?;
    Ok(prepared.gamma_objective(&model.p)?.derivatives(&model.gamma)?.hessian)
}

/// Estimated information `Î = -(1/n) ∂²ℓ/∂γ∂γᵀ` and standard errors
/// `sqrt(diag((nÎ)^-1))`.
#[derive(Debug, Clone)]
pub struct ObservedInformation {
    pub information: DMatrix<f64>,
    pub standard_errors: Vec<f64>,
}

const MAX_CONDITION: f64 = 1e12;

pub fn observed_information(model: &BernsteinPHModel, dataset: &Dataset) -> Result<ObservedInformation> {
    let n = dataset.len();
    if n == 0 || model.dim() == 0 {
        return Err(Error::Domain("information needs at least one observation and one covariate".into()));
    }
    let h = hessian_gamma(model, dataset)?;
    information_from_hessian(&h, n)
}

pub(crate) fn information_from_hessian(h: &DMatrix<f64>, n: usize) -> Result<ObservedInformation> {
    let neg = -h.clone();
    let eig = SymmetricEigen::new(neg.clone());
    let max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) || max / min > MAX_CONDITION {
        return Err(Error::Singular(format!(
            "information matrix is singular (eigenvalues in [{min:e}, {max:e}])"
        )));
    }
    let inv = neg
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("information matrix is not positive definite".into()))?
        .inverse();
    let standard_errors = (0..inv.nrows()).map(|k| inv[(k, k)].sqrt()).collect();
    Ok(ObservedInformation { information: neg / n as f64, standard_errors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Observation;
    use approx::assert_abs_diff_eq;

    fn gentleman_geyer() -> Dataset {
        let obs = [(0., 1.), (0., 2.), (0., 2.), (1., 3.), (1., 3.), (2., 3.)]
            .iter()
            .map(|&(a, b)| Observation::interval(a, b, vec![]).unwrap())
            .collect();
        Dataset::new(obs, None).unwrap()
    }

    fn model(m: usize, tail: bool, p: Vec<f64>, gamma: Vec<f64>, x0: Vec<f64>) -> BernsteinPHModel {
        BernsteinPHModel::new(m, tail, p, gamma, x0, 1.0).unwrap()
    }

    #[test]
    fn whole_line_interval_has_probability_one() {
        let mdl = model(2, false, vec![0.2, 0.5, 0.3], vec![], vec![]);
        let obs = Observation::interval(0.0, None, vec![]).unwrap();
        assert_eq!(loglik_obs(&mdl, &obs).unwrap(), 0.0);
    }

    #[test]
    fn uniform_interval_probability() {
        let mdl = model(2, false, vec![1.0 / 3.0; 3], vec![0.0], vec![0.0]);
        let obs = Observation::interval(0.0, 1.0 / 3.0, vec![0.4]).unwrap();
        assert_abs_diff_eq!(loglik_obs(&mdl, &obs).unwrap(), (1.0f64 / 3.0).ln(), epsilon = 1e-14);
    }

    #[test]
    fn gentleman_geyer_optimum_value() {
        // F(1/3) = 1/3, F(2/3) = 2/3 holds for the uniform weights at any degree
        let ds = gentleman_geyer();
        for m in 1..=6 {
            let mdl = BernsteinPHModel::new(m, false, vec![1.0 / (m + 1) as f64; m + 1], vec![], vec![], 3.0).unwrap();
            let ll = loglik_total(&mdl, &ds).unwrap();
            assert_abs_diff_eq!(ll, -3.819085, epsilon = 1e-6);
        }
    }

    #[test]
    fn empty_and_single_datasets() {
        let empty = Dataset::new(vec![], None).unwrap();
        let mdl = model(2, false, vec![0.2, 0.5, 0.3], vec![], vec![]);
        assert_eq!(loglik_total(&mdl, &empty).unwrap(), 0.0);
        let one = Observation::exact(0.3, vec![]).unwrap();
        let ds = Dataset::new(vec![one.clone()], Some(1.0)).unwrap();
        assert_abs_diff_eq!(loglik_total(&mdl, &ds).unwrap(), loglik_obs(&mdl, &one).unwrap(), epsilon = 1e-14);
    }

    #[test]
    fn zero_probability_is_negative_infinity() {
        // all mass on component 0 of degree 0 cannot vanish, so use an
        // interval that lies where the survival is flat: y1 = 1 with no tail
        let ds = Dataset::new(vec![Observation::interval(1.0, None, vec![]).unwrap()], Some(1.0)).unwrap();
        let mdl = model(1, false, vec![0.5, 0.5], vec![], vec![]);
        assert_eq!(loglik_total(&mdl, &ds).unwrap(), f64::NEG_INFINITY);
        assert!(matches!(grad_p(&mdl, &ds), Err(Error::Singular(_))));
    }

    #[test]
    fn degree_zero_single_exact_gradient() {
        let ds = Dataset::new(vec![Observation::exact(0.4, vec![]).unwrap()], Some(1.0)).unwrap();
        let mdl = model(0, false, vec![1.0], vec![], vec![]);
        assert_abs_diff_eq!(grad_p(&mdl, &ds).unwrap()[0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_offsets_give_zero_score() {
        let obs = vec![
            Observation::exact(0.3, vec![1.0]).unwrap(),
            Observation::interval(0.2, 0.9, vec![1.0]).unwrap(),
            Observation::interval(0.5, None, vec![1.0]).unwrap(),
        ];
        let ds = Dataset::new(obs, Some(1.0)).unwrap();
        let mdl = model(3, true, vec![0.2, 0.2, 0.2, 0.2, 0.2], vec![0.7], vec![1.0]);
        assert_eq!(grad_gamma(&mdl, &ds).unwrap()[0], 0.0);
    }

    #[test]
    fn single_exact_gamma_curvature() {
        let ds = Dataset::new(vec![Observation::exact(0.4, vec![1.0]).unwrap()], Some(1.0)).unwrap();
        let g = 0.3;
        let mdl = model(2, false, vec![0.3, 0.3, 0.4], vec![g], vec![0.0]);
        let s0 = mdl.baseline_survival(0.4).unwrap();
        let h = hessian_gamma(&mdl, &ds).unwrap();
        assert_abs_diff_eq!(h[(0, 0)], g.exp() * s0.ln(), epsilon = 1e-13);
        assert!(h[(0, 0)] < 0.0);
    }

    #[test]
    fn constant_covariate_has_no_information() {
        let obs = (0..5)
            .map(|k| Observation::interval(0.1 * k as f64, 0.1 * k as f64 + 0.3, vec![2.0]).unwrap())
            .collect();
        let ds = Dataset::new(obs, Some(1.0)).unwrap();
        let mdl = model(2, false, vec![0.3, 0.3, 0.4], vec![0.5], vec![2.0]);
        assert!(matches!(observed_information(&mdl, &ds), Err(Error::Singular(_))));
    }

    #[test]
    fn cached_rows_match_recomputation() {
        let obs = vec![
            Observation::exact(0.37, vec![]).unwrap(),
            Observation::interval(0.1, 0.8, vec![]).unwrap(),
            Observation::interval(0.4, None, vec![]).unwrap(),
        ];
        let ds = Dataset::new(obs, Some(1.0)).unwrap();
        let prep = PreparedData::new(&ds, 9, true).unwrap();
        let (beta, surv) = prep.rows(0);
        for i in 0..=9 {
            let idx = crate::bernstein::BasisIndex::new(9, i).unwrap();
            assert_abs_diff_eq!(beta[i], crate::bernstein::beta_density(idx, 0.37).unwrap(), epsilon = 1e-12);
            assert_abs_diff_eq!(surv[i], crate::bernstein::beta_survival(idx, 0.37).unwrap(), epsilon = 1e-12);
        }
        assert_eq!(beta[10], 0.0);
        assert_eq!(surv[10], 1.0);
        let (_, upper) = prep.rows(2);
        assert!(upper.iter().all(|&v| v == 0.0));
    }
}
