#![allow(dead_code)]

use mable_ph::optimizer::empirical_baseline;
use mable_ph::{BernsteinPHModel, Dataset, Observation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GG_MAX: f64 = -3.819085;

pub fn gentleman_geyer() -> Dataset {
    let obs = [(0., 1.), (0., 2.), (0., 2.), (1., 3.), (1., 3.), (2., 3.)]
        .iter()
        .map(|&(a, b)| Observation::interval(a, b, vec![]).unwrap())
        .collect();
    Dataset::new(obs, None).unwrap()
}

pub fn gg_csv() -> &'static str {
    "y1,y2,delta\n0,1,1\n0,2,1\n0,2,1\n1,3,1\n1,3,1\n2,3,1\n"
}

/// Empirical CDF-type value `F̂(t) = 1 - S(t)` of a covariate-free model.
pub fn cdf(model: &BernsteinPHModel, t: f64) -> f64 {
    1.0 - model.baseline_survival(t).unwrap()
}

/// Random dataset on `[0, 1]` mixing exact, left-, interval- and
/// right-censored observations.
pub struct Instance {
    pub dataset: Dataset,
    pub model: BernsteinPHModel,
}

pub struct InstanceSpec {
    pub max_n: usize,
    pub max_m: usize,
    pub max_d: usize,
    /// Put the baseline at the minimiser of `γᵀx`, so every `η_i ≥ 1`.
    pub empirical_baseline: bool,
}

pub fn random_weights(rng: &mut ChaCha8Rng, width: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..width).map(|_| -rng.random_range(1e-3..1.0f64).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

pub fn random_observation(rng: &mut ChaCha8Rng, d: usize) -> Observation {
    let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let a = rng.random_range(0.05..0.9);
    let b = rng.random_range(a + 0.02..0.98);
    match rng.random_range(0..4) {
        0 => Observation::exact(a, x).unwrap(),
        1 => Observation::interval(0.0, b, x).unwrap(),
        2 => Observation::interval(a, b, x).unwrap(),
        _ => Observation::interval(a, None, x).unwrap(),
    }
}

pub fn random_instance(seed: u64, spec: &InstanceSpec) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(3..=spec.max_n);
    let m = rng.random_range(1..=spec.max_m);
    let d = rng.random_range(1..=spec.max_d);
    let obs: Vec<Observation> = (0..n).map(|_| random_observation(&mut rng, d)).collect();
    let dataset = Dataset::new(obs, Some(1.0)).unwrap();
    let has_tail = rng.random_bool(0.5);
    let p = random_weights(&mut rng, m + 1 + usize::from(has_tail));
    let gamma: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let x0 = if spec.empirical_baseline {
        empirical_baseline(&gamma, &dataset).0
    } else {
        (0..d).map(|_| rng.random_range(-0.5..0.5)).collect()
    };
    let model = BernsteinPHModel::new(m, has_tail, p, gamma, x0, 1.0).unwrap();
    Instance { dataset, model }
}

/// `‖a - b‖∞ ≤ tol · max(‖b‖∞, 1)`.
pub fn close_rel(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = b.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}
