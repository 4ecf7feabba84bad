//! Choice of the Bernstein degree by a change-point rule on the profile of
//! maximised log-likelihoods over a grid `m0, m0 + 1, ..., m0 + k`.

use log::warn;

use crate::error::{Error, Result};
use crate::likelihood::PreparedData;
use crate::model::Dataset;
use crate::optimizer::{
    empirical_baseline, mable_fit_with, project_interior, solve_p, uniform_weights, Fit, FitConfig, FitOptions,
};

/// Floor substituted for non-positive likelihood increments inside logs.
pub const INCREMENT_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeGrid {
    pub m0: usize,
    pub k: usize,
}

impl DegreeGrid {
    pub fn new(m0: usize, k: usize) -> Result<Self> {
        if m0 < 1 {
            return Err(Error::Domain("grid must start at degree 1 or above".into()));
        }
        if k < 2 {
            return Err(Error::Domain(format!("grid needs at least 3 degrees, got {}", k + 1)));
        }
        Ok(Self { m0, k })
    }

    /// Grid `{m0, ..., mk}` from its end points.
    pub fn from_bounds(m0: usize, mk: usize) -> Result<Self> {
        if mk < m0 {
            return Err(Error::Domain(format!("grid end {mk} precedes start {m0}")));
        }
        Self::new(m0, mk - m0)
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> {
        self.m0..=self.m0 + self.k
    }

    pub fn len(&self) -> usize {
        self.k + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Default for DegreeGrid {
    fn default() -> Self {
        Self { m0: 2, k: 18 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridMode {
    /// Fit `(γ, p)` at every degree.
    Full,
    /// Hold `γ` at the supplied value and solve only for `p`.
    Profile(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct DegreeTable {
    pub degrees: Vec<usize>,
    /// Maximised log-likelihood per degree; `None` marks a failed cell.
    pub loglik: Vec<Option<f64>>,
    /// Fits per degree (full mode only).
    pub fits: Vec<Option<Fit>>,
    /// Change-point statistic per degree; NaN where undefined.
    pub r: Vec<f64>,
    pub chosen: Option<usize>,
}

impl DegreeTable {
    /// Builds a table from log-likelihoods alone.
    pub fn from_loglik(degrees: Vec<usize>, loglik: Vec<Option<f64>>) -> Self {
        let n = degrees.len();
        Self { degrees, loglik, fits: vec![None; n], r: vec![f64::NAN; n], chosen: None }
    }

    pub fn chosen_degree(&self) -> Option<usize> {
        self.chosen.map(|i| self.degrees[i])
    }

    pub fn chosen_fit(&self) -> Option<&Fit> {
        self.chosen.and_then(|i| self.fits[i].as_ref())
    }

    /// CSV with columns `m,loglik,R`; failed cells have empty fields.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,loglik,R\n");
        for ((m, ll), r) in self.degrees.iter().zip(&self.loglik).zip(&self.r) {
            let ll = ll.map_or(String::new(), |v| v.to_string());
            let r = if r.is_nan() { String::new() } else { r.to_string() };
            s.push_str(&format!("{m},{ll},{r}\n"));
        }
        s
    }
}

/// Weights of degree `m + 1` representing the same polynomial as `p` at
/// degree `m`. A trailing tail component is carried over unchanged.
pub fn elevate_degree(p: &[f64], m: usize, has_tail: bool) -> Vec<f64> {
    let body = &p[..=m];
    let denom = (m + 2) as f64;
    let mut q: Vec<f64> = (0..=m + 1)
        .map(|k| {
            let left = if k <= m { body[k] * (m + 1 - k) as f64 } else { 0.0 };
            let right = if k >= 1 { body[k - 1] * k as f64 } else { 0.0 };
            (left + right) / denom
        })
        .collect();
    if has_tail {
        q.push(p[m + 1]);
    }
    q
}

/// Fits every degree of the grid, warm-starting each degree from the
/// elevated weights of the previous one.
pub fn profile_loglik_grid(dataset: &Dataset, grid: DegreeGrid, config: &FitConfig, mode: &GridMode) -> Result<DegreeTable> {
    profile_loglik_grid_with(dataset, grid, config, mode, None, None)
}

/// As [`profile_loglik_grid`] with an optional tail override and a starting
/// `γ` for the first degree in full mode.
pub fn profile_loglik_grid_with(
    dataset: &Dataset,
    grid: DegreeGrid,
    config: &FitConfig,
    mode: &GridMode,
    has_tail: Option<bool>,
    gamma_init: Option<&[f64]>,
) -> Result<DegreeTable> {
    config.validate()?;
    let has_tail = has_tail.unwrap_or_else(|| dataset.default_tail());
    let degrees: Vec<usize> = grid.degrees().collect();
    let mut loglik = Vec::with_capacity(degrees.len());
    let mut fits = Vec::with_capacity(degrees.len());
    match mode {
        GridMode::Full => {
            let mut gamma = gamma_init.map(<[f64]>::to_vec);
            let mut seed: Option<Vec<f64>> = None;
            for &m in &degrees {
                let options = FitOptions { has_tail: Some(has_tail), gamma_init: gamma.clone(), p_init: seed.take() };
                match mable_fit_with(dataset, m, &options, config) {
                    Ok(fit) => {
                        loglik.push(Some(fit.loglik()));
                        seed = Some(elevate_degree(&fit.model.p, m, has_tail));
                        if dataset.dim() > 0 {
                            gamma = Some(fit.model.gamma.clone());
                        }
                        fits.push(Some(fit));
                    }
                    Err(e) => {
                        warn!("degree {m} fit failed: {e}");
                        loglik.push(None);
                        fits.push(None);
                    }
                }
            }
        }
        GridMode::Profile(gamma) => {
            if gamma.len() != dataset.dim() {
                return Err(Error::Domain(format!(
                    "profile gamma has {} entries, data has {} covariates",
                    gamma.len(),
                    dataset.dim()
                )));
            }
            let (x0, _) = empirical_baseline(gamma, dataset);
            let mut seed: Option<Vec<f64>> = None;
            for &m in &degrees {
                let cell = PreparedData::new(dataset, m, has_tail).and_then(|mut prepared| {
                    prepared.set_coefficients(gamma, &x0)?;
                    let mut p0 = seed.take().unwrap_or_else(|| uniform_weights(prepared.width()));
                    project_interior(&mut p0, config.interior_eps);
                    solve_p(&prepared, &p0, config)
                });
                match cell {
                    Ok(sol) => {
                        loglik.push(Some(sol.loglik));
                        seed = Some(elevate_degree(&sol.p, m, has_tail));
                    }
                    Err(e) => {
                        warn!("degree {m} profile solve failed: {e}");
                        loglik.push(None);
                    }
                }
                fits.push(None);
            }
        }
    }
    let mut table = DegreeTable { degrees, loglik, fits, r: vec![], chosen: None };
    table.r = vec![f64::NAN; table.degrees.len()];
    match changepoint_scores(&table) {
        Ok((r, chosen)) => {
            table.r = r;
            table.chosen = Some(chosen);
        }
        Err(e) => warn!("degree selection undefined: {e}"),
    }
    Ok(table)
}

fn floored_log(increment: f64, steps: f64) -> f64 {
    (increment.max(INCREMENT_FLOOR) / steps).ln()
}

/// Change-point statistics `R(m_i)` and the index of their maximiser.
fn changepoint_scores(table: &DegreeTable) -> Result<(Vec<f64>, usize)> {
    let valid: Vec<(usize, f64)> =
        table.loglik.iter().enumerate().filter_map(|(i, ll)| ll.map(|v| (i, v))).collect();
    if valid.len() < 3 {
        return Err(Error::DegenerateGrid(format!("only {} valid grid cells", valid.len())));
    }
    let (first, l0) = valid[0];
    let (last, lk) = valid[valid.len() - 1];
    if !(lk - l0 > 0.0) {
        return Err(Error::DegenerateGrid("log-likelihood does not increase across the grid".into()));
    }
    let m0 = table.degrees[first] as f64;
    let k = table.degrees[last] as f64 - m0;
    let head = k * floored_log(lk - l0, k);
    let mut r = vec![f64::NAN; table.degrees.len()];
    let mut best: Option<(usize, f64)> = None;
    for &(idx, li) in &valid[1..] {
        let i = table.degrees[idx] as f64 - m0;
        let value = if idx == last {
            0.0
        } else {
            head - i * floored_log(li - l0, i) - (k - i) * floored_log(lk - li, k - i)
        };
        r[idx] = value;
        if best.is_none_or(|(_, b)| value > b) {
            best = Some((idx, value));
        }
    }
    Ok((r, best.map(|(i, _)| i).unwrap_or(last)))
}

/// Index of the selected degree in `table`.
pub fn changepoint_select(table: &DegreeTable) -> Result<usize> {
    changepoint_scores(table).map(|(_, i)| i)
}

/// Fills in `R` and the chosen index; returns the chosen degree.
pub fn select_in_place(table: &mut DegreeTable) -> Result<usize> {
    let (r, chosen) = changepoint_scores(table)?;
    table.r = r;
    table.chosen = Some(chosen);
    Ok(table.degrees[chosen])
}
