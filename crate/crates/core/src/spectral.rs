//! Learnable-space analysis.
//!
//! With `R_N = (1/N) X_N X_N^T = U H U^T`, the unregularized regret at `x` is
//! `log(1 + gamma / N)` where `gamma = sum_i (x^T u_i)^2 / eta_i`. Directions with large
//! eigenvalues contribute little; a test vector with weight on a null direction is not
//! learnable. The eigenvalues relate to the singular values of `X_N` by `eta_i = s_i^2 / N`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::dataset::Dataset;
use crate::error::{PnmlError, Result};
use crate::exec::Execution;
use crate::linalg::{self, rank_threshold};

/// A projection onto a null direction counts only above this fraction of `||x||`.
pub const NULL_PROJECTION_TOL: f64 = 1e-8;

/// Empirical correlation matrix `(1/N) X_N X_N^T`.
pub fn correlation_matrix(data: &Dataset) -> Result<DMatrix<f64>> {
    if data.is_empty() {
        return Err(PnmlError::NoSamples);
    }
    let mut r = linalg::gram(data.features(), 0.0);
    r /= data.len() as f64;
    Ok(r)
}

/// Eigen-decomposition of the training correlation together with one test vector's
/// per-direction regret contributions.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    /// Eigenvalues of `R_N`, descending, clipped at zero.
    pub eigenvalues: DVector<f64>,
    /// Orthonormal eigenvectors, column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: DMatrix<f64>,
    pub projections: DVector<f64>,
    /// `(x^T u_i)^2 / eta_i`; `+inf` on a null direction with a non-negligible projection.
    pub contributions: DVector<f64>,
    pub gamma: f64,
    /// `log(1 + gamma / N)`.
    pub regret_spectral: f64,
    pub n_samples: usize,
    /// The spectral form describes the unregularized learner; this is always 0.
    /// Use [`crate::pnml::regret`] for `lambda > 0`.
    pub lambda: f64,
}

impl SpectralReport {
    pub fn is_learnable(&self) -> bool {
        self.gamma.is_finite()
    }

    /// Index of the direction with the largest contribution, `None` if all are zero.
    pub fn top_contribution(&self) -> Option<usize> {
        let (idx, max) = self
            .contributions
            .iter()
            .enumerate()
            .fold((0, 0.0), |(bi, bv), (i, &c)| if c > bv { (i, c) } else { (bi, bv) });
        (max > 0.0).then_some(idx)
    }

    pub const CSV_HEADER: &'static str = "kind,index,eigenvalue,projection,contribution,gamma,regret";

    /// One `direction` row per eigenpair followed by a `summary` row.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for i in 0..self.eigenvalues.len() {
            writeln!(
                w,
                "direction,{i},{},{},{},,",
                self.eigenvalues[i], self.projections[i], self.contributions[i]
            )?;
        }
        writeln!(w, "summary,,,,,{},{}", self.gamma, self.regret_spectral)?;
        Ok(())
    }
}

/// Spectral regret decomposition of `x` against the training features.
pub fn analyze(data: &Dataset, x: &DVector<f64>) -> Result<SpectralReport> {
    data.check_dim(x)?;
    let r = correlation_matrix(data)?;
    let (mut eigenvalues, eigenvectors) = linalg::symmetric_eigen_desc(&r);
    eigenvalues.apply(|e| *e = e.max(0.0));
    let threshold = rank_threshold(eigenvalues[0], data.dim());
    let x_norm = x.norm();

    let projections = eigenvectors.tr_mul(x);
    let contributions = DVector::from_iterator(
        eigenvalues.len(),
        eigenvalues
            .iter()
            .zip(projections.iter())
            .map(|(&eta, &p)| contribution(eta, eigenvalues[0], threshold, p, x_norm)),
    );
    let gamma: f64 = contributions.iter().sum();
    let n = data.len();
    Ok(SpectralReport {
        regret_spectral: (gamma / n as f64).ln_1p(),
        eigenvalues,
        eigenvectors,
        projections,
        contributions,
        gamma,
        n_samples: n,
        lambda: 0.0,
    })
}

fn contribution(eta: f64, eta_max: f64, threshold: f64, projection: f64, x_norm: f64) -> f64 {
    if eta_max > 0.0 && eta >= threshold {
        projection * projection / eta
    } else if projection.abs() > NULL_PROJECTION_TOL * x_norm {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Summary of [`analyze`] for one test vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub gamma: f64,
    pub regret: f64,
    pub top_contribution: Option<usize>,
}

/// [`analyze`] over many test vectors, in order.
pub fn learnability_profile(data: &Dataset, xs: &[DVector<f64>]) -> Result<Vec<ProfilePoint>> {
    learnability_profile_with(data, xs, Execution::default())
}

pub fn learnability_profile_with(data: &Dataset, xs: &[DVector<f64>], exec: Execution) -> Result<Vec<ProfilePoint>> {
    if let Some(i) = xs.iter().position(|x| x.len() != data.dim()) {
        return Err(PnmlError::AtIndex {
            index: i,
            source: Box::new(PnmlError::DimensionMismatch {
                expected: data.dim(),
                found: xs[i].len(),
            }),
        });
    }
    if data.is_empty() {
        return Err(PnmlError::NoSamples);
    }
    // The decomposition of R_N is shared; only projections depend on x.
    let base = analyze(data, &DVector::zeros(data.dim()))?;
    let threshold = rank_threshold(base.eigenvalues[0], data.dim());
    let n = data.len() as f64;
    Ok(exec.map(xs, |x| {
        let x_norm = x.norm();
        let mut gamma = 0.0;
        let mut top = None;
        let mut top_value = 0.0;
        for (i, &eta) in base.eigenvalues.iter().enumerate() {
            let p = base.eigenvectors.column(i).dot(x);
            let c = contribution(eta, base.eigenvalues[0], threshold, p, x_norm);
            if c > top_value {
                top_value = c;
                top = Some(i);
            }
            gamma += c;
        }
        ProfilePoint {
            gamma,
            regret: (gamma / n).ln_1p(),
            top_contribution: top,
        }
    }))
}
