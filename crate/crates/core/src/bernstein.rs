//! Beta-density basis of the Bernstein polynomial model.
//!
//! Component `i` of degree `m` is the Beta(i + 1, m - i + 1) density
//! `β_mi(t) = (m + 1) C(m, i) t^i (1 - t)^(m - i)` on `[0, 1]`, and its
//! survival integral is `B̄_mi(t) = 1 - I_t(i + 1, m - i + 1)`, which for
//! integer shapes equals `P(Binomial(m + 1, t) <= i)`.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const CF_MAX_ITER: usize = 500;
const CF_EPS: f64 = 1e-16;
const CF_TINY: f64 = 1e-300;

/// Index `(m, i)` of one beta component, `0 <= i <= m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    m: usize,
    i: usize,
}

impl BasisIndex {
    pub fn new(m: usize, i: usize) -> Result<Self> {
        if i > m {
            return Err(Error::Domain(format!("component index {i} exceeds degree {m}")));
        }
        Ok(Self { m, i })
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn component(&self) -> usize {
        self.i
    }
}

fn check_unit(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, 1]")));
    }
    Ok(())
}

/// `ln C(n, k)` via log-gamma.
pub(crate) fn ln_choose(n: usize, k: usize) -> f64 {
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn choose(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (1..=k).fold(1.0, |c, j| c * (n - k + j) as f64 / j as f64)
}

/// Binomial(n, t) probability mass at k for t strictly inside (0, 1).
fn binomial_pmf_interior(n: usize, k: usize, t: f64) -> f64 {
    if n <= 1000 {
        let v = choose(n, k) * t.powi(k as i32) * (1.0 - t).powi((n - k) as i32);
        if v > 1e-250 {
            return v;
        }
    }
    (ln_choose(n, k) + k as f64 * t.ln() + (n - k) as f64 * (-t).ln_1p()).exp()
}

/// Beta density `β_mi(t)`.
pub fn beta_density(idx: BasisIndex, t: f64) -> Result<f64> {
    check_unit(t)?;
    let BasisIndex { m, i } = idx;
    let scale = (m + 1) as f64;
    if t == 0.0 {
        return Ok(if i == 0 { scale } else { 0.0 });
    }
    if t == 1.0 {
        return Ok(if i == m { scale } else { 0.0 });
    }
    Ok(scale * binomial_pmf_interior(m, i, t))
}

/// All `m + 1` densities `β_m0(t), ..., β_mm(t)`.
pub fn beta_density_row(m: usize, t: f64) -> Result<Vec<f64>> {
    check_unit(t)?;
    let scale = (m + 1) as f64;
    let mut row = vec![0.0; m + 1];
    if t == 0.0 {
        row[0] = scale;
    } else if t == 1.0 {
        row[m] = scale;
    } else {
        for (i, v) in row.iter_mut().enumerate() {
            *v = scale * binomial_pmf_interior(m, i, t);
        }
    }
    Ok(row)
}

/// Survival integral `B̄_mi(t) = ∫_t^1 β_mi(u) du`.
pub fn beta_survival(idx: BasisIndex, t: f64) -> Result<f64> {
    check_unit(t)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    if t == 1.0 {
        return Ok(0.0);
    }
    let a = (idx.i + 1) as f64;
    let b = (idx.m - idx.i + 1) as f64;
    // 1 - I_t(a, b) = I_{1-t}(b, a); evaluate whichever side converges fast.
    let value = if t < a / (a + b) {
        1.0 - incomplete_beta_cf(a, b, t)
    } else {
        incomplete_beta_cf(b, a, 1.0 - t)
    };
    Ok(value.clamp(0.0, 1.0))
}

/// All `m + 1` survival integrals at `t`, built by the forward recurrence
/// `B̄_{m,i+1}(t) = B̄_{m,i}(t) + P(Binomial(m + 1, t) = i + 1)`.
pub fn beta_survival_row(m: usize, t: f64) -> Result<Vec<f64>> {
    check_unit(t)?;
    if t == 0.0 {
        return Ok(vec![1.0; m + 1]);
    }
    if t == 1.0 {
        return Ok(vec![0.0; m + 1]);
    }
    let mut row = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    for i in 0..=m {
        acc += binomial_pmf_interior(m + 1, i, t);
        row.push(acc.min(1.0));
    }
    Ok(row)
}

/// Regularized incomplete beta `I_x(a, b)` by the modified Lentz continued
/// fraction. Accurate when `x < (a + 1) / (a + b + 2)`.
fn incomplete_beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let ln_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    let prefix = (a * x.ln() + b * (-x).ln_1p() - ln_beta).exp() / a;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for k in 1..=CF_MAX_ITER {
        let k = k as f64;
        let k2 = 2.0 * k;
        let even = k * (b - k) * x / ((qam + k2) * (a + k2));
        d = 1.0 + even * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + even / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let odd = -(a + k) * (qab + k) * x / ((a + k2) * (qap + k2));
        d = 1.0 + odd * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + odd / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            break;
        }
    }
    prefix * h
}
