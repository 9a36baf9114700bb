//! Small dense helpers shared by the fitting code and the spectral analysis.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{PnmlError, Result};

/// Relative rank threshold: an eigenvalue is null iff `eta < eta_max * M * 2^-45`.
pub fn rank_threshold(eta_max: f64, dim: usize) -> f64 {
    eta_max.max(0.0) * dim as f64 * 2f64.powi(-45)
}

/// `X X^T + lambda I` for a feature matrix with samples as columns.
pub fn gram(features: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
    let m = features.nrows();
    let mut g = features * features.transpose();
    for i in 0..m {
        g[(i, i)] += lambda;
    }
    symmetrize(&mut g);
    g
}

pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
pub fn symmetric_eigen_desc(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Check that a PSD matrix clears the rank threshold; returns the error naming its smallest eigenvalue otherwise.
pub fn check_full_rank(g: &DMatrix<f64>) -> Result<()> {
    let (values, _) = symmetric_eigen_desc(g);
    let m = values.len();
    let eta_max = values[0];
    let smallest = values[m - 1];
    let threshold = rank_threshold(eta_max, m);
    if eta_max > 0.0 && smallest > threshold {
        Ok(())
    } else {
        Err(PnmlError::SingularGram { smallest, threshold })
    }
}

/// Inverse (or pseudo-inverse) of a symmetric PSD Gram matrix.
pub enum GramInverse {
    Factored(Cholesky<f64, Dyn>),
    /// Moore-Penrose inverse restricted to the non-null eigendirections.
    Pseudo {
        values: DVector<f64>,
        vectors: DMatrix<f64>,
        rank: usize,
    },
}

impl GramInverse {
    /// Factor `g`; a matrix that fails the rank threshold or Cholesky is an error.
    pub fn strict(g: DMatrix<f64>, lambda: f64) -> Result<Self> {
        if lambda == 0.0 {
            check_full_rank(&g)?;
        }
        Cholesky::new(g)
            .map(GramInverse::Factored)
            .ok_or(PnmlError::NotPositiveDefinite { lambda })
    }

    /// Factor `g`, falling back to the pseudo-inverse when it is numerically singular.
    pub fn or_pseudo(g: DMatrix<f64>, lambda: f64) -> Self {
        let full_rank = lambda > 0.0 || check_full_rank(&g).is_ok();
        if full_rank {
            if let Some(chol) = Cholesky::new(g.clone()) {
                return GramInverse::Factored(chol);
            }
        }
        let (values, vectors) = symmetric_eigen_desc(&g);
        let threshold = rank_threshold(values[0], values.len());
        let rank = if values[0] > 0.0 {
            values.iter().take_while(|&&v| v > threshold).count()
        } else {
            0
        };
        GramInverse::Pseudo { values, vectors, rank }
    }

    /// `x^T G^{-1} x`.
    pub fn quad_form(&self, x: &DVector<f64>) -> f64 {
        match self {
            GramInverse::Factored(chol) => {
                // ||L^{-1} x||^2; only the lower triangle of l_dirty is read.
                let mut z = x.clone();
                let solved = chol.l_dirty().solve_lower_triangular_mut(&mut z);
                debug_assert!(solved, "cholesky factor has a zero pivot");
                z.norm_squared()
            }
            GramInverse::Pseudo { values, vectors, rank } => (0..*rank)
                .map(|i| {
                    let p = vectors.column(i).dot(x);
                    p * p / values[i]
                })
                .sum(),
        }
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        match self {
            GramInverse::Factored(chol) => chol.solve(b),
            GramInverse::Pseudo { values, vectors, rank } => {
                let mut out = DVector::zeros(b.len());
                for i in 0..*rank {
                    let u = vectors.column(i);
                    out.axpy(u.dot(b) / values[i], &u, 1.0);
                }
                out
            }
        }
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        match self {
            GramInverse::Factored(chol) => {
                let mut p = chol.inverse();
                symmetrize(&mut p);
                p
            }
            GramInverse::Pseudo { values, .. } => {
                let n = values.len();
                let mut p = DMatrix::zeros(n, n);
                for j in 0..n {
                    let mut e = DVector::zeros(n);
                    e[j] = 1.0;
                    p.set_column(j, &self.solve(&e));
                }
                symmetrize(&mut p);
                p
            }
        }
    }
}
