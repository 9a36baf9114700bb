#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use pnml_core::{fit_ridge, Dataset, RidgeConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub struct Instance {
    pub data: Dataset,
    pub x: DVector<f64>,
    pub cfg: RidgeConfig,
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, len: usize) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn gaussian_dataset(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Dataset {
    let features = DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let labels = gaussian_vector(rng, n) * 2.0;
    Dataset::new(features, labels).unwrap()
}

/// Random instances with M in 1..=8, N in 1..=20, cycling lambda over
/// {0, 1e-4, 0.1, 1}. Lambda = 0 draws N >= M and keeps only full-rank designs.
pub fn random_instances(seed: u64, count: usize, sigma2: f64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambdas = [0.0, 1e-4, 0.1, 1.0];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let lambda = lambdas[out.len() % lambdas.len()];
        let m = rng.random_range(1..=8);
        let n = if lambda == 0.0 {
            rng.random_range(m..=20)
        } else {
            rng.random_range(1..=20)
        };
        let data = gaussian_dataset(&mut rng, m, n);
        let cfg = RidgeConfig::new(lambda, sigma2).unwrap();
        if lambda == 0.0 && fit_ridge(&data, &cfg).is_err() {
            continue;
        }
        let x = gaussian_vector(&mut rng, m);
        out.push(Instance { data, x, cfg });
    }
    out
}

/// Random full-rank (N >= M, lambda = 0) instances.
pub fn full_rank_instances(seed: u64, count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let m = rng.random_range(1..=8);
        let n = rng.random_range(m..=20);
        let data = gaussian_dataset(&mut rng, m, n);
        let cfg = RidgeConfig::default();
        if fit_ridge(&data, &cfg).is_err() {
            continue;
        }
        let x = gaussian_vector(&mut rng, m);
        out.push(Instance { data, x, cfg });
    }
    out
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn rel_err_vec(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}
