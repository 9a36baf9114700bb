//! The pNML learner for linear (ridge) regression.
//!
//! For a test vector `x` the genie refits the ridge problem on the training set plus
//! `(x, y)` for every hypothetical label `y`. Its likelihood at `y` is a Gaussian in
//! `y - y_hat` with precision scaled by `(1 - h)^2`, where
//! `h = x^T (X X^T + lambda I)^{-1} x` and `X` includes `x` as its last column.
//! Normalizing over `y` gives `K = 1 / (1 - h)`, so the pNML predictive density is
//! `N(y_hat, sigma^2 / (1 - h)^2)` and the regret is `log K`.

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::dataset::Dataset;
use crate::error::{PnmlError, Result};
use crate::linalg::{self, GramInverse};
use crate::regression::{fit_ridge, RidgeConfig};

/// Values of `h` above `1 - NON_LEARNABLE_GAP` are treated as exactly 1.
pub const NON_LEARNABLE_GAP: f64 = 1e-12;

/// Closed-form pNML prediction for one test vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PnmlPrediction {
    y_hat: f64,
    h: f64,
    k_factor: f64,
    regret: f64,
    sigma2: f64,
}

impl PnmlPrediction {
    /// Assemble a prediction from the ERM mean and the raw quadratic form `h`.
    ///
    /// `h` is clamped into `[0, 1]`; anything within `NON_LEARNABLE_GAP` of 1 becomes 1.
    pub fn from_parts(y_hat: f64, h: f64, sigma2: f64) -> Self {
        let h = if h.is_nan() || h > 1.0 - NON_LEARNABLE_GAP {
            1.0
        } else {
            h.max(0.0)
        };
        let k_factor = if h == 1.0 { f64::INFINITY } else { 1.0 / (1.0 - h) };
        PnmlPrediction {
            y_hat,
            h,
            k_factor,
            regret: k_factor.ln(),
            sigma2,
        }
    }

    /// ERM mean, which is also the pNML mean.
    pub fn y_hat(&self) -> f64 {
        self.y_hat
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Normalizer `K = 1 / (1 - h)`, `+inf` for non-learnable points.
    pub fn k_factor(&self) -> f64 {
        self.k_factor
    }

    /// Regret `log K` in nats.
    pub fn regret(&self) -> f64 {
        self.regret
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn is_learnable(&self) -> bool {
        self.h < 1.0
    }

    /// Standard deviation of the pNML density, `sigma / (1 - h)`.
    pub fn std_dev(&self) -> f64 {
        self.sigma2.sqrt() / (1.0 - self.h)
    }

    pub const CSV_HEADER: &'static str = "y_hat,h,k_factor,regret";

    /// `y_hat,h,k_factor,regret` with `inf` for infinite values.
    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.y_hat, self.h, self.k_factor, self.regret)
    }
}

/// Genie solution for a hypothetical test label.
#[derive(Debug, Clone, PartialEq)]
pub struct GenieFit {
    pub theta_hat: DVector<f64>,
    pub hypothetical_label: f64,
}

/// Ridge fit on the training set augmented with `(x, y)`.
pub fn genie_fit(data: &Dataset, x: &DVector<f64>, y: f64, cfg: &RidgeConfig) -> Result<GenieFit> {
    let augmented = data.with_sample(x, y)?;
    let model = fit_ridge(&augmented, cfg)?;
    Ok(GenieFit {
        theta_hat: model.theta().clone(),
        hypothetical_label: y,
    })
}

/// Closed-form pNML prediction at `x`.
///
/// `h` is computed from the Gram matrix of the augmented design. With `lambda = 0`
/// and a rank-deficient design the pseudo-inverse is used for both `h` and the ERM
/// mean; a test direction outside the training span then yields `h = 1`.
pub fn pnml_predict(data: &Dataset, x: &DVector<f64>, cfg: &RidgeConfig) -> Result<PnmlPrediction> {
    data.check_dim(x)?;
    let lambda = cfg.lambda();
    let y_hat = erm_prediction(data, x, cfg)?;
    let mut g_aug = linalg::gram(data.features(), lambda);
    g_aug.ger(1.0, x, x, 1.0);
    let h = GramInverse::or_pseudo(g_aug, lambda).quad_form(x);
    Ok(PnmlPrediction::from_parts(y_hat, h, cfg.sigma2()))
}

fn erm_prediction(data: &Dataset, x: &DVector<f64>, cfg: &RidgeConfig) -> Result<f64> {
    match fit_ridge(data, cfg) {
        Ok(model) => Ok(x.dot(model.theta())),
        Err(PnmlError::SingularGram { .. }) | Err(PnmlError::NotPositiveDefinite { .. }) => {
            // Minimum-norm least squares; x^T theta is unique whenever x is in the span.
            let inv = GramInverse::or_pseudo(linalg::gram(data.features(), cfg.lambda()), cfg.lambda());
            Ok(x.dot(&inv.solve(&(data.features() * data.labels()))))
        }
        Err(e) => Err(e),
    }
}

/// pNML density `(1-h)/sqrt(2 pi sigma^2) * exp(-(1-h)^2 (y - y_hat)^2 / (2 sigma^2))`.
pub fn density_at(pred: &PnmlPrediction, y: f64) -> Result<f64> {
    if !pred.is_learnable() {
        return Err(PnmlError::DegenerateDensity);
    }
    let shrink = 1.0 - pred.h;
    let r = shrink * (y - pred.y_hat);
    Ok(shrink * (-r * r / (2.0 * pred.sigma2)).exp() / (2.0 * PI * pred.sigma2).sqrt())
}

/// Regret `log K` at `x`; independent of the noise variance.
pub fn regret(data: &Dataset, x: &DVector<f64>, lambda: f64) -> Result<f64> {
    let cfg = RidgeConfig::with_lambda(lambda)?;
    Ok(pnml_predict(data, x, &cfg)?.regret())
}

/// Unnormalized pNML numerator: the genie's own likelihood of the label it was fitted with.
pub fn genie_density_at(data: &Dataset, x: &DVector<f64>, y: f64, cfg: &RidgeConfig) -> Result<f64> {
    let genie = genie_fit(data, x, y, cfg)?;
    Ok(gaussian_pdf(y - x.dot(&genie.theta_hat), cfg.sigma2()))
}

/// Log-loss `-log q(y_true | x)` of the pNML density, in nats.
pub fn log_loss(pred: &PnmlPrediction, y_true: f64) -> Result<f64> {
    if !pred.is_learnable() {
        return Err(PnmlError::DegenerateDensity);
    }
    let shrink = 1.0 - pred.h;
    let r = shrink * (y_true - pred.y_hat);
    Ok(0.5 * (2.0 * PI * pred.sigma2).ln() + r * r / (2.0 * pred.sigma2) - shrink.ln())
}

pub(crate) fn gaussian_pdf(residual: f64, sigma2: f64) -> f64 {
    (-residual * residual / (2.0 * sigma2)).exp() / (2.0 * PI * sigma2).sqrt()
}
