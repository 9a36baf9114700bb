//! Predictive normalized maximum likelihood (pNML) for linear regression.
//!
//! The crate provides
//! - batch and recursive ridge least squares with leverage and confidence-interval
//!   baselines ([`regression`]),
//! - the closed-form pNML predictive density with its normalizer and regret ([`pnml`]),
//! - the learnable-space eigen-analysis of the training correlation ([`spectral`]),
//! - a brute-force quadrature oracle that re-derives the normalizer by refitting the
//!   genie at every hypothetical label ([`oracle`]).
//!
//! All arithmetic is `f64`. The data-parallel loops run on rayon when the `parallel`
//! feature is enabled (the default) and sequentially otherwise; see [`exec`].

pub mod dataset;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod oracle;
pub mod pnml;
pub mod regression;
pub mod spectral;

pub use dataset::{build_vandermonde, monomials, Dataset};
pub use error::{PnmlError, Result};
pub use exec::Execution;
pub use oracle::{numeric_density_check, numeric_k, QuadratureSpec};
pub use pnml::{density_at, genie_density_at, genie_fit, log_loss, pnml_predict, regret, GenieFit, PnmlPrediction};
pub use regression::{
    confidence_interval, fit_recursive, fit_ridge, leverage, leverages, predict, rls_update, ConfidenceInterval,
    FittedModel, RidgeConfig,
};
pub use spectral::{analyze, correlation_matrix, learnability_profile, ProfilePoint, SpectralReport};
