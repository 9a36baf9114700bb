//! Batch and recursive ridge least squares, plus the classical leverage and
//! confidence-interval baselines.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::dataset::Dataset;
use crate::error::{PnmlError, Result};
use crate::linalg::{self, GramInverse};

/// Ridge penalty `lambda >= 0` and Gaussian noise variance `sigma2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeConfig {
    lambda: f64,
    sigma2: f64,
}

impl RidgeConfig {
    pub fn new(lambda: f64, sigma2: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(PnmlError::InvalidConfig(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(PnmlError::InvalidConfig(format!(
                "sigma2 must be finite and > 0, got {sigma2}"
            )));
        }
        Ok(RidgeConfig { lambda, sigma2 })
    }

    /// Ridge penalty with the default unit noise variance.
    pub fn with_lambda(lambda: f64) -> Result<Self> {
        RidgeConfig::new(lambda, 1.0)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
}

impl Default for RidgeConfig {
    fn default() -> Self {
        RidgeConfig {
            lambda: 0.0,
            sigma2: 1.0,
        }
    }
}

/// Ridge solution `theta = P X Y` together with `P = (X X^T + lambda I)^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    theta: DVector<f64>,
    p_matrix: DMatrix<f64>,
    lambda: f64,
    n_samples: usize,
}

impl FittedModel {
    /// The model of an empty training set: `theta = 0`, `P = I / lambda`. Requires `lambda > 0`.
    pub fn empty(dim: usize, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(PnmlError::InvalidConfig(format!(
                "an empty model needs lambda > 0, got {lambda}"
            )));
        }
        Ok(FittedModel {
            theta: DVector::zeros(dim),
            p_matrix: DMatrix::identity(dim, dim) / lambda,
            lambda,
            n_samples: 0,
        })
    }

    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    pub fn p_matrix(&self) -> &DMatrix<f64> {
        &self.p_matrix
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(PnmlError::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }
}

/// Solve `(X X^T + lambda I) theta = X Y` by Cholesky.
///
/// With `lambda = 0` the Gram matrix must clear the rank threshold
/// (`eta_min > eta_max * M * 2^-45`), otherwise [`PnmlError::SingularGram`] is returned.
pub fn fit_ridge(data: &Dataset, cfg: &RidgeConfig) -> Result<FittedModel> {
    let g = linalg::gram(data.features(), cfg.lambda());
    let inv = GramInverse::strict(g, cfg.lambda())?;
    let xy = data.features() * data.labels();
    Ok(FittedModel {
        theta: inv.solve(&xy),
        p_matrix: inv.inverse(),
        lambda: cfg.lambda(),
        n_samples: data.len(),
    })
}

/// ERM prediction `x^T theta`.
pub fn predict(model: &FittedModel, x: &DVector<f64>) -> Result<f64> {
    model.check_dim(x)?;
    Ok(x.dot(&model.theta))
}

/// Absorb one sample with the rank-one inverse update
/// `P' = P - P x x^T P / (1 + x^T P x)`, `theta' = theta + P' x (y - x^T theta)`.
pub fn rls_update(model: &FittedModel, x: &DVector<f64>, y: f64) -> Result<FittedModel> {
    model.check_dim(x)?;
    if !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
        return Err(PnmlError::NonFinite {
            value: y,
            location: "recursive update sample".into(),
        });
    }
    let px = &model.p_matrix * x;
    let denom = 1.0 + x.dot(&px);
    if !(denom.is_finite() && denom >= 1.0 - 1e-10) {
        return Err(PnmlError::LostDefiniteness {
            detail: format!("1 + x^T P x = {denom}"),
        });
    }
    let mut p = &model.p_matrix - (&px * px.transpose()) / denom;
    linalg::symmetrize(&mut p);
    if let Some((i, d)) = p.diagonal().iter().enumerate().find(|(_, d)| d.is_nan() || **d <= 0.0) {
        return Err(PnmlError::LostDefiniteness {
            detail: format!("P[{i},{i}] = {d}"),
        });
    }
    let gain = px / denom;
    let innovation = y - x.dot(&model.theta);
    Ok(FittedModel {
        theta: &model.theta + gain * innovation,
        p_matrix: p,
        lambda: model.lambda,
        n_samples: model.n_samples + 1,
    })
}

/// Fit by recursion over the samples in order.
///
/// With `lambda > 0` the recursion starts from the empty model. With `lambda = 0` it
/// starts from a batch fit of the shortest full-rank prefix, since `P` does not exist
/// before `M` independent samples have arrived.
pub fn fit_recursive(data: &Dataset, cfg: &RidgeConfig) -> Result<FittedModel> {
    let (mut model, start) = if cfg.lambda() > 0.0 {
        (FittedModel::empty(data.dim(), cfg.lambda())?, 0)
    } else {
        let mut found = None;
        for n in data.dim()..=data.len() {
            if let Ok(m) = fit_ridge(&data.prefix(n), cfg) {
                found = Some((m, n));
                break;
            }
        }
        match found {
            Some(found) => found,
            // No full-rank prefix: the full set is singular too, report its diagnostic.
            None => return fit_ridge(data, cfg),
        }
    };
    for i in start..data.len() {
        let (x, y) = data.sample(i);
        model = rls_update(&model, &x, y)?;
    }
    Ok(model)
}

/// Leverage `h_ii = x_i^T (X X^T + lambda I)^{-1} x_i` of training sample `i`.
pub fn leverage(data: &Dataset, i: usize, lambda: f64) -> Result<f64> {
    if i >= data.len() {
        return Err(PnmlError::IndexOutOfRange {
            index: i,
            len: data.len(),
        });
    }
    let inv = GramInverse::strict(linalg::gram(data.features(), lambda), lambda)?;
    Ok(inv.quad_form(&data.sample(i).0).clamp(0.0, 1.0))
}

/// Leverages of every training sample.
pub fn leverages(data: &Dataset, lambda: f64) -> Result<Vec<f64>> {
    let inv = GramInverse::strict(linalg::gram(data.features(), lambda), lambda)?;
    Ok((0..data.len())
        .map(|i| inv.quad_form(&data.sample(i).0).clamp(0.0, 1.0))
        .collect())
}

/// Symmetric interval `center +- halfwidth` at nominal `coverage`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub center: f64,
    pub halfwidth: f64,
    pub coverage: f64,
}

impl ConfidenceInterval {
    pub fn lower(&self) -> f64 {
        self.center - self.halfwidth
    }

    pub fn upper(&self) -> f64 {
        self.center + self.halfwidth
    }
}

/// Asymptotic normal interval: halfwidth `z_{(1+c)/2} * sqrt(sigma2_hat * x^T P x)`.
pub fn confidence_interval(
    model: &FittedModel,
    x: &DVector<f64>,
    sigma2_hat: f64,
    coverage: f64,
) -> Result<ConfidenceInterval> {
    if !(coverage > 0.0 && coverage < 1.0) {
        return Err(PnmlError::InvalidConfig(format!(
            "coverage must lie in (0, 1), got {coverage}"
        )));
    }
    if !(sigma2_hat > 0.0 && sigma2_hat.is_finite()) {
        return Err(PnmlError::InvalidConfig(format!(
            "sigma2_hat must be finite and > 0, got {sigma2_hat}"
        )));
    }
    let center = predict(model, x)?;
    let variance = sigma2_hat * (x.transpose() * &model.p_matrix * x)[0].max(0.0);
    let z = Normal::standard().inverse_cdf(0.5 * (1.0 + coverage));
    Ok(ConfidenceInterval {
        center,
        halfwidth: z * variance.sqrt(),
        coverage,
    })
}
