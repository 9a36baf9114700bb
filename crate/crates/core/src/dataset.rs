//! Training sets and polynomial design matrices.
//!
//! Feature vectors are stored as the columns of an `M x N` matrix, so `X X^T` is the
//! (unnormalized) `M x M` correlation matrix used throughout the crate.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};

use crate::error::{PnmlError, Result};

/// `N` labelled samples with feature vectors in `R^M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: DMatrix<f64>,
    labels: DVector<f64>,
}

impl Dataset {
    /// Build a dataset from an `M x N` feature matrix (one sample per column) and `N` labels.
    pub fn new(features: DMatrix<f64>, labels: DVector<f64>) -> Result<Self> {
        if features.nrows() == 0 {
            return Err(PnmlError::EmptyFeatureDimension);
        }
        if features.ncols() != labels.len() {
            return Err(PnmlError::LabelCountMismatch {
                features: features.ncols(),
                labels: labels.len(),
            });
        }
        for (j, col) in features.column_iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                if !v.is_finite() {
                    return Err(PnmlError::NonFinite {
                        value: *v,
                        location: format!("feature {i} of sample {j}"),
                    });
                }
            }
        }
        if let Some((j, v)) = labels.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(PnmlError::NonFinite {
                value: *v,
                location: format!("label of sample {j}"),
            });
        }
        Ok(Dataset { features, labels })
    }

    pub fn from_columns(columns: &[Vec<f64>], labels: &[f64]) -> Result<Self> {
        let m = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != m) {
            return Err(PnmlError::DimensionMismatch {
                expected: m,
                found: bad.len(),
            });
        }
        let features = DMatrix::from_fn(m, columns.len(), |i, j| columns[j][i]);
        Dataset::new(features, DVector::from_column_slice(labels))
    }

    /// A dataset with no samples; legal as the starting point of a ridge recursion.
    pub fn empty(dim: usize) -> Result<Self> {
        Dataset::new(DMatrix::zeros(dim, 0), DVector::zeros(0))
    }

    /// Feature dimension `M`.
    pub fn dim(&self) -> usize {
        self.features.nrows()
    }

    /// Sample count `N`.
    pub fn len(&self) -> usize {
        self.features.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &DVector<f64> {
        &self.labels
    }

    pub fn sample(&self, i: usize) -> (DVector<f64>, f64) {
        (self.features.column(i).into_owned(), self.labels[i])
    }

    /// The first `n` samples.
    pub fn prefix(&self, n: usize) -> Dataset {
        Dataset {
            features: self.features.columns(0, n).into_owned(),
            labels: self.labels.rows(0, n).into_owned(),
        }
    }

    /// Copy of this dataset with `(x, y)` appended as sample `N`.
    pub fn with_sample(&self, x: &DVector<f64>, y: f64) -> Result<Dataset> {
        self.check_dim(x)?;
        let n = self.len();
        let mut features = self.features.clone().insert_column(n, 0.0);
        features.set_column(n, x);
        let labels = self.labels.clone().push(y);
        Dataset::new(features, labels)
    }

    pub(crate) fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(PnmlError::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Read a dataset from CSV with header `x0,...,x{M-1},y`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers().map_err(|e| csv_error(1, &e))?.clone();
        if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
            return Err(PnmlError::Csv {
                line: 1,
                message: "missing header row".into(),
            });
        }
        let m = header.len().saturating_sub(1);
        let expected: Vec<String> = (0..m)
            .map(|i| format!("x{i}"))
            .chain(std::iter::once("y".to_string()))
            .collect();
        if m == 0 || header.iter().ne(expected.iter().map(String::as_str)) {
            return Err(PnmlError::Csv {
                line: 1,
                message: format!(
                    "header must be x0..x{{M-1}},y with M >= 1, found `{}`",
                    header.iter().collect::<Vec<_>>().join(",")
                ),
            });
        }

        let mut columns = Vec::new();
        let mut labels = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                csv_error(line, &e)
            })?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() != m + 1 {
                return Err(PnmlError::Csv {
                    line,
                    message: format!("expected {} columns, found {}", m + 1, record.len()),
                });
            }
            let mut values = Vec::with_capacity(m + 1);
            for (col, cell) in record.iter().enumerate() {
                let v: f64 = cell.parse().map_err(|_| PnmlError::Csv {
                    line,
                    message: format!("column {} (`{}`): `{cell}` is not a number", col + 1, &header[col]),
                })?;
                if !v.is_finite() {
                    return Err(PnmlError::Csv {
                        line,
                        message: format!("column {} (`{}`): non-finite value", col + 1, &header[col]),
                    });
                }
                values.push(v);
            }
            labels.push(values.pop().expect("row has a label column"));
            columns.push(values);
        }
        let features = DMatrix::from_fn(m, columns.len(), |i, j| columns[j][i]);
        Dataset::new(features, DVector::from_vec(labels))
    }

    /// Write the dataset as CSV; values use the shortest round-trip decimal form.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        let mut header: Vec<String> = (0..self.dim()).map(|i| format!("x{i}")).collect();
        header.push("y".into());
        writeln!(writer, "{}", header.join(","))?;
        for j in 0..self.len() {
            let mut row: Vec<String> = self.features.column(j).iter().map(f64::to_string).collect();
            row.push(self.labels[j].to_string());
            writeln!(writer, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn csv_error(line: u64, err: &csv::Error) -> PnmlError {
    PnmlError::Csv {
        line,
        message: err.to_string(),
    }
}

/// Monomial feature vector `(1, t, t^2, ..., t^degree)`.
pub fn monomials(t: f64, degree: usize) -> Result<DVector<f64>> {
    if !t.is_finite() {
        return Err(PnmlError::NonFinite {
            value: t,
            location: "polynomial evaluation point".into(),
        });
    }
    let mut v = DVector::zeros(degree + 1);
    let mut power = 1.0;
    for k in 0..=degree {
        v[k] = power;
        power *= t;
    }
    Ok(v)
}

/// Vandermonde feature matrix with column `i` equal to the monomials of `points[i]`.
pub fn build_vandermonde(points: &[f64], degree: usize) -> Result<DMatrix<f64>> {
    let mut out = DMatrix::zeros(degree + 1, points.len());
    for (i, &t) in points.iter().enumerate() {
        let col = monomials(t, degree).map_err(|e| PnmlError::AtIndex {
            index: i,
            source: Box::new(e),
        })?;
        out.set_column(i, &col);
    }
    Ok(out)
}
