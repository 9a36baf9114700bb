//! Brute-force check of the closed forms.
//!
//! The normalizer `K` is recomputed by integrating the genie likelihood over a grid of
//! hypothetical labels. Every grid point re-solves the full augmented ridge problem as
//! a stacked least-squares system `[X^T; sqrt(lambda) I] theta ~ [Y; 0]` by SVD, which
//! shares no code with the Cholesky path used by [`crate::pnml`].

use nalgebra::{DMatrix, DVector};

use crate::dataset::Dataset;
use crate::error::{PnmlError, Result};
use crate::exec::Execution;
use crate::pnml::{gaussian_pdf, pnml_predict};
use crate::regression::RidgeConfig;

/// The oracle refuses queries with `h` closer to 1 than this.
pub const MAX_H_GAP: f64 = 1e-6;

/// Composite-Simpson grid over `y_hat +- half_width_sigmas * sigma / (1 - h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    half_width_sigmas: f64,
    points_per_sigma: usize,
}

impl QuadratureSpec {
    pub fn new(half_width_sigmas: f64, points_per_sigma: usize) -> Result<Self> {
        if !(half_width_sigmas >= 8.0 && half_width_sigmas.is_finite()) {
            return Err(PnmlError::InvalidConfig(format!(
                "half_width_sigmas must be >= 8, got {half_width_sigmas}"
            )));
        }
        if points_per_sigma < 16 {
            return Err(PnmlError::InvalidConfig(format!(
                "points_per_sigma must be >= 16, got {points_per_sigma}"
            )));
        }
        Ok(QuadratureSpec {
            half_width_sigmas,
            points_per_sigma,
        })
    }

    pub fn half_width_sigmas(&self) -> f64 {
        self.half_width_sigmas
    }

    pub fn points_per_sigma(&self) -> usize {
        self.points_per_sigma
    }

    /// Number of Simpson intervals; always even.
    pub fn intervals(&self) -> usize {
        let per_side = (self.half_width_sigmas * self.points_per_sigma as f64).ceil() as usize;
        2 * per_side
    }

    /// Number of grid points; always odd.
    pub fn points(&self) -> usize {
        self.intervals() + 1
    }

    pub fn refined(&self) -> Self {
        QuadratureSpec {
            points_per_sigma: 2 * self.points_per_sigma,
            ..*self
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            half_width_sigmas: 12.0,
            points_per_sigma: 64,
        }
    }
}

/// Composite Simpson's rule for samples on an evenly spaced grid with spacing `step`.
///
/// `values.len()` must be odd and at least 3. Terms are accumulated in index order.
pub fn simpson(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    assert!(
        n >= 3 && n % 2 == 1,
        "simpson needs an odd number (>= 3) of samples, got {n}"
    );
    let mut acc = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * step / 3.0
}

/// Evaluate `f` on `points` evenly spaced nodes over `[lo, hi]` and integrate with Simpson.
pub fn integrate<F>(f: F, lo: f64, hi: f64, points: usize, exec: Execution) -> f64
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let step = (hi - lo) / (points - 1) as f64;
    let values = exec.map_range(points, |i| f(lo + step * i as f64));
    simpson(&values, step)
}

/// Genie likelihood `p_{theta_hat(y)}(y | x)` with the ridge system solved from scratch.
pub fn brute_force_genie_density(data: &Dataset, x: &DVector<f64>, y: f64, cfg: &RidgeConfig) -> Result<f64> {
    let theta = stacked_ridge_solve(data, x, y, cfg.lambda())?;
    Ok(gaussian_pdf(y - x.dot(&theta), cfg.sigma2()))
}

fn stacked_ridge_solve(data: &Dataset, x: &DVector<f64>, y: f64, lambda: f64) -> Result<DVector<f64>> {
    if x.len() != data.dim() {
        return Err(PnmlError::DimensionMismatch {
            expected: data.dim(),
            found: x.len(),
        });
    }
    let m = data.dim();
    let n = data.len();
    let ridge_rows = if lambda > 0.0 { m } else { 0 };
    let rows = n + 1 + ridge_rows;
    let root = lambda.sqrt();
    let features = data.features();
    let a = DMatrix::from_fn(rows, m, |r, c| {
        if r < n {
            features[(c, r)]
        } else if r == n {
            x[c]
        } else if r - n - 1 == c {
            root
        } else {
            0.0
        }
    });
    let b = DVector::from_fn(rows, |r, _| {
        if r < n {
            data.labels()[r]
        } else if r == n {
            y
        } else {
            0.0
        }
    });
    let svd = a.svd(true, true);
    let s_max = svd.singular_values.max();
    let eps = s_max * rows.max(m) as f64 * f64::EPSILON;
    svd.solve(&b, eps)
        .map_err(|msg| PnmlError::InvalidConfig(format!("oracle least squares failed: {msg}")))
}

/// Numerical normalizer `K_hat = integral p_{theta_hat(y)}(y | x) dy`.
pub fn numeric_k(data: &Dataset, x: &DVector<f64>, cfg: &RidgeConfig, quad: &QuadratureSpec) -> Result<f64> {
    numeric_k_with(data, x, cfg, quad, Execution::default())
}

pub fn numeric_k_with(
    data: &Dataset,
    x: &DVector<f64>,
    cfg: &RidgeConfig,
    quad: &QuadratureSpec,
    exec: Execution,
) -> Result<f64> {
    let pred = pnml_predict(data, x, cfg)?;
    if pred.h() >= 1.0 - MAX_H_GAP {
        return Err(PnmlError::OracleDiverges { h: pred.h() });
    }
    let half = quad.half_width_sigmas() * pred.std_dev();
    let lo = pred.y_hat() - half;
    let hi = pred.y_hat() + half;
    let step = (hi - lo) / quad.intervals() as f64;
    let values = exec.map_range(quad.points(), |i| {
        brute_force_genie_density(data, x, lo + step * i as f64, cfg)
    });
    let values = values.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(simpson(&values, step))
}

/// Largest relative deviation between the brute-force genie likelihood and the
/// closed form `exp(-(1-h)^2 (y - y_hat)^2 / (2 sigma^2)) / sqrt(2 pi sigma^2)` over `ys`.
pub fn numeric_density_check(data: &Dataset, x: &DVector<f64>, cfg: &RidgeConfig, ys: &[f64]) -> Result<f64> {
    let pred = pnml_predict(data, x, cfg)?;
    if pred.h() >= 1.0 - MAX_H_GAP {
        return Err(PnmlError::OracleDiverges { h: pred.h() });
    }
    let shrink = 1.0 - pred.h();
    let mut worst: f64 = 0.0;
    for &y in ys {
        let brute = brute_force_genie_density(data, x, y, cfg)?;
        let closed = gaussian_pdf(shrink * (y - pred.y_hat()), cfg.sigma2());
        let rel = if closed == 0.0 && brute == 0.0 {
            0.0
        } else {
            (brute - closed).abs() / closed.abs().max(brute.abs())
        };
        worst = worst.max(rel);
    }
    Ok(worst)
}
