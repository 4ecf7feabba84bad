//! Observations, datasets and the fitted Bernstein proportional-hazards model.

use std::path::Path;

use log::warn;

use crate::bernstein::{beta_density_row, beta_survival_row};
use crate::error::{Error, Result};

/// Observed event time: exact, or censored into `(lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    Exact(f64),
    /// `upper == None` encodes right censoring (`+∞`).
    Interval { lower: f64, upper: Option<f64> },
}

/// One subject: an event and its covariate vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub event: Event,
    pub x: Vec<f64>,
}

impl Observation {
    pub fn exact(t: f64, x: Vec<f64>) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Data(format!("exact time {t} must be finite and nonnegative")));
        }
        Ok(Self { event: Event::Exact(t), x })
    }

    /// Censored observation `(lower, upper]`; `upper = f64::INFINITY` or
    /// `None` means right censored.
    pub fn interval(lower: f64, upper: impl Into<Option<f64>>, x: Vec<f64>) -> Result<Self> {
        let upper = upper.into().filter(|u| u.is_finite());
        if !(lower.is_finite() && lower >= 0.0) {
            return Err(Error::Data(format!("lower bound {lower} must be finite and nonnegative")));
        }
        if let Some(u) = upper {
            if u <= lower {
                return Err(Error::Data(format!("censoring interval ({lower}, {u}] is empty")));
            }
        }
        Ok(Self { event: Event::Interval { lower, upper }, x })
    }

    /// Builds from the `(y1, y2, delta)` encoding used in files.
    pub fn from_triplet(y1: f64, y2: f64, delta: u8, x: Vec<f64>) -> Result<Self> {
        match delta {
            0 => {
                if y1 != y2 {
                    return Err(Error::Data(format!("exact observation needs y1 == y2, got ({y1}, {y2})")));
                }
                Self::exact(y1, x)
            }
            1 => Self::interval(y1, y2, x),
            _ => Err(Error::Data(format!("censoring indicator must be 0 or 1, got {delta}"))),
        }
    }

    pub fn y1(&self) -> f64 {
        match self.event {
            Event::Exact(t) => t,
            Event::Interval { lower, .. } => lower,
        }
    }

    /// Upper end, `f64::INFINITY` when right censored.
    pub fn y2(&self) -> f64 {
        match self.event {
            Event::Exact(t) => t,
            Event::Interval { upper, .. } => upper.unwrap_or(f64::INFINITY),
        }
    }

    pub fn delta(&self) -> u8 {
        match self.event {
            Event::Exact(_) => 0,
            Event::Interval { .. } => 1,
        }
    }

    fn finite_times(&self) -> impl Iterator<Item = f64> {
        let (a, b) = (self.y1(), self.y2());
        [a, b].into_iter().filter(|v| v.is_finite())
    }

    fn scaled(&self, tau: f64) -> Self {
        let event = match self.event {
            Event::Exact(t) => Event::Exact((t / tau).min(1.0)),
            Event::Interval { lower, upper } => Event::Interval {
                lower: (lower / tau).min(1.0),
                upper: upper.map(|u| (u / tau).min(1.0)),
            },
        };
        Self { event, x: self.x.clone() }
    }
}

/// Without a tail the baseline survival is zero at `tau`, so an exact event
/// there has an infinite or zero PH density; the scale is then pushed just past it.
fn exact_at_support_end(observations: &[Observation], tau: f64) -> bool {
    !observations.iter().any(|o| o.y2().is_infinite())
        && observations.iter().any(|o| matches!(o.event, Event::Exact(t) if t >= tau))
}

/// Largest finite observed time, or the caller's known support end.
pub fn choose_tau(observations: &[Observation], known: Option<f64>) -> Result<f64> {
    if let Some(tau) = known {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Data(format!("known tau must be positive and finite, got {tau}")));
        }
        return Ok(tau);
    }
    let tau = observations
        .iter()
        .flat_map(Observation::finite_times)
        .fold(0.0_f64, f64::max);
    if tau <= 0.0 {
        return Err(Error::Data("no positive finite observation time to set the time scale".into()));
    }
    Ok(tau)
}

/// Observations with a common covariate dimension, together with the time
/// scale `tau` and the rescaled copy on `[0, 1]` used by all fitting code.
#[derive(Debug, Clone)]
pub struct Dataset {
    raw: Vec<Observation>,
    scaled: Vec<Observation>,
    tau: f64,
    tau_known: bool,
    dim: usize,
}

impl Dataset {
    pub fn new(observations: Vec<Observation>, known_tau: Option<f64>) -> Result<Self> {
        let dim = observations.first().map_or(0, |o| o.x.len());
        if let Some((k, o)) = observations.iter().enumerate().find(|(_, o)| o.x.len() != dim) {
            return Err(Error::Data(format!(
                "observation {k} has {} covariates, expected {dim}",
                o.x.len()
            )));
        }
        if let Some(k) = observations.iter().position(|o| o.x.iter().any(|v| !v.is_finite())) {
            return Err(Error::Data(format!("observation {k} has a non-finite covariate")));
        }
        let tau = if observations.is_empty() { known_tau.unwrap_or(1.0) } else { choose_tau(&observations, known_tau)? };
        let tau = if known_tau.is_none() && exact_at_support_end(&observations, tau) {
            tau * (1.0 + 1.0 / observations.len() as f64)
        } else {
            tau
        };
        if let Some(k) = observations
            .iter()
            .position(|o| o.finite_times().any(|t| t > tau * (1.0 + 1e-12)))
        {
            return Err(Error::Data(format!("observation {k} has a finite time beyond tau = {tau}")));
        }
        let scaled = observations.iter().map(|o| o.scaled(tau)).collect();
        Ok(Self { raw: observations, scaled, tau, tau_known: known_tau.is_some(), dim })
    }

    /// Reads the CSV observation schema `y1,y2,delta,x1..xd`.
    pub fn from_csv_path(path: &Path, known_tau: Option<f64>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
        Self::from_csv_str(&text, known_tau)
    }

    pub fn from_csv_str(text: &str, known_tau: Option<f64>) -> Result<Self> {
        crate::io::parse_observations(text).and_then(|obs| Self::new(obs, known_tau))
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn tau_known(&self) -> bool {
        self.tau_known
    }

    pub fn raw(&self) -> &[Observation] {
        &self.raw
    }

    pub fn scaled(&self) -> &[Observation] {
        &self.scaled
    }

    pub fn has_right_censoring(&self) -> bool {
        self.raw.iter().any(|o| o.y2().is_infinite())
    }

    /// Tail component is estimated iff some subject is right censored and
    /// `tau` was not supplied as known.
    pub fn default_tail(&self) -> bool {
        self.has_right_censoring() && !self.tau_known
    }

    /// Same data with every covariate vector transformed by `f`.
    pub fn map_covariates(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let obs = self
            .raw
            .iter()
            .map(|o| Observation { event: o.event, x: f(&o.x) })
            .collect();
        Self::new(obs, self.tau_known.then_some(self.tau))
    }
}

/// Fitted (or hypothesised) Bernstein PH model.
///
/// `p` has `m + 2` entries when `has_tail` is set, the last one being the
/// mass beyond `tau`; otherwise `m + 1` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinPHModel {
    pub m: usize,
    pub has_tail: bool,
    pub p: Vec<f64>,
    pub gamma: Vec<f64>,
    pub x0: Vec<f64>,
    pub tau: f64,
}

impl BernsteinPHModel {
    pub fn new(m: usize, has_tail: bool, p: Vec<f64>, gamma: Vec<f64>, x0: Vec<f64>, tau: f64) -> Result<Self> {
        let width = m + 1 + usize::from(has_tail);
        if p.len() != width {
            return Err(Error::Domain(format!("expected {width} weights, got {}", p.len())));
        }
        if p.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::Domain("weights must be nonnegative".into()));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::Domain(format!("weights sum to {total}, expected 1")));
        }
        if has_tail && p[m + 1] >= 1.0 {
            return Err(Error::Domain("tail mass must be below 1".into()));
        }
        if gamma.len() != x0.len() {
            return Err(Error::Domain("gamma and baseline covariate differ in dimension".into()));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!("tau must be positive, got {tau}")));
        }
        Ok(Self { m, has_tail, p, gamma, x0, tau })
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// Number of weights, `m* + 1`.
    pub fn width(&self) -> usize {
        self.p.len()
    }

    pub fn tail_mass(&self) -> f64 {
        if self.has_tail {
            self.p[self.m + 1]
        } else {
            0.0
        }
    }

    /// Rate `α(0)` of the exponential tail glued continuously at `tau`.
    /// Falls back to `(m + 1) / tau` when `p_m = 0`.
    pub fn tail_rate(&self) -> f64 {
        let tail = self.tail_mass();
        let pm = self.p[self.m];
        if tail > 0.0 && pm > 0.0 {
            (self.m + 1) as f64 * pm / (tail * self.tau)
        } else {
            if tail > 0.0 {
                warn!("tail weight positive with p_m = 0; using rate (m + 1) / tau");
            }
            (self.m + 1) as f64 / self.tau
        }
    }

    /// `γᵀ(x - x0)`.
    pub fn linear_predictor(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::Domain(format!("covariate has dimension {}, model has {}", x.len(), self.dim())));
        }
        Ok(self.gamma.iter().zip(x).zip(&self.x0).map(|((g, a), b)| g * (a - b)).sum())
    }

    /// Density of the rescaled baseline on `[0, 1]`.
    pub(crate) fn scaled_density(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let row = beta_density_row(self.m, u).expect("u clamped to unit interval");
        row.iter().zip(&self.p).map(|(b, p)| b * p).sum()
    }

    /// Survival of the rescaled baseline on `[0, 1]`, tail mass included.
    pub(crate) fn scaled_survival(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let row = beta_survival_row(self.m, u).expect("u clamped to unit interval");
        let s: f64 = row.iter().zip(&self.p).map(|(b, p)| b * p).sum();
        (s + self.tail_mass()).clamp(0.0, 1.0)
    }

    /// Baseline density `f_m(t | x0; p)` on the original time scale.
    pub fn baseline_density(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        if t <= self.tau {
            return Ok(self.scaled_density(t / self.tau) / self.tau);
        }
        if !self.has_tail || t.is_infinite() {
            return Ok(0.0);
        }
        let rate = self.tail_rate();
        Ok(self.tail_mass() * rate * (-rate * (t - self.tau)).exp())
    }

    /// Baseline survival `S_m(t | x0; p)`; `t = ∞` gives 0.
    pub fn baseline_survival(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        if t.is_infinite() {
            return Ok(0.0);
        }
        if t <= self.tau {
            return Ok(self.scaled_survival(t / self.tau));
        }
        if !self.has_tail {
            return Ok(0.0);
        }
        Ok(self.tail_mass() * (-self.tail_rate() * (t - self.tau)).exp())
    }

    /// `S(t | x) = S(t | x0)^exp(γᵀ(x - x0))`.
    pub fn conditional_survival(&self, t: f64, x: &[f64]) -> Result<f64> {
        let eta = self.linear_predictor(x)?.exp();
        let s0 = self.baseline_survival(t)?;
        Ok(s0.powf(eta))
    }

    /// `f(t | x) = η S0(t)^(η - 1) f0(t)` with `η = exp(γᵀ(x - x0))`.
    pub fn conditional_density(&self, t: f64, x: &[f64]) -> Result<f64> {
        let eta = self.linear_predictor(x)?.exp();
        let s0 = self.baseline_survival(t)?;
        let f0 = self.baseline_density(t)?;
        if f0 == 0.0 {
            return Ok(0.0);
        }
        if s0 == 0.0 {
            return if eta > 1.0 {
                Ok(0.0)
            } else if eta == 1.0 {
                Ok(f0)
            } else {
                Err(Error::Singular(format!("conditional density at t = {t} is unbounded")))
            };
        }
        Ok(eta * s0.powf(eta - 1.0) * f0)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("time {t} must be nonnegative")));
    }
    Ok(())
}
