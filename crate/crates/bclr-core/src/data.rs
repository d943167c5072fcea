//! Feature matrices and column standardization.
//!
//! The sampler operates on an `n x d` matrix whose rows are time-ordered
//! observations (possibly the image of a feature embedding). Columns must be
//! centered before fitting: with no intercept in the linear term, an
//! uncentered series biases the changepoint posterior toward the endpoints.
//! Scaling to unit variance additionally lets one default prior scale serve
//! data of different magnitudes.

use crate::error::Error;
use crate::Result;
use nalgebra::{DMatrix, DVector};

/// Column mean tolerance for a matrix to count as standardized.
pub const MEAN_TOL: f64 = 1e-10;
/// Column variance tolerance for a matrix to count as standardized.
pub const VAR_TOL: f64 = 1e-8;
/// Raw-column variance below which a column is treated as constant.
pub const CONST_VAR_TOL: f64 = 1e-12;

/// An `n x d` real matrix of observations, rows in time order.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    values: DMatrix<f64>,
    standardized: bool,
    constant_cols: Vec<bool>,
}

impl FeatureMatrix {
    /// Wrap raw (unstandardized) data. Requires `n >= 2`, `d >= 1`, all
    /// entries finite.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() < 2 || values.ncols() < 1 {
            return Err(Error::InvalidInput(format!(
                "feature matrix must be at least 2 x 1, got {} x {}",
                values.nrows(),
                values.ncols()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "feature matrix contains non-finite entries".into(),
            ));
        }
        let d = values.ncols();
        Ok(Self {
            values,
            standardized: false,
            constant_cols: vec![false; d],
        })
    }

    /// Number of rows (time points).
    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    /// Number of columns (features).
    pub fn d(&self) -> usize {
        self.values.ncols()
    }

    /// Underlying matrix.
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Whether this matrix went through [`standardize_columns`].
    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    /// Per-column constant flags (meaningful once standardized).
    pub fn constant_cols(&self) -> &[bool] {
        &self.constant_cols
    }

    /// Row `i` as an owned vector.
    pub fn row(&self, i: usize) -> DVector<f64> {
        self.values.row(i).transpose()
    }

    /// Submatrix of rows `lo..hi` (half-open), returned raw.
    pub fn rows(&self, lo: usize, hi: usize) -> Result<Self> {
        FeatureMatrix::new(self.values.rows(lo, hi - lo).into_owned())
    }

    /// The linear functionals `x_i' beta` for all rows.
    pub fn linear(&self, beta: &DVector<f64>) -> DVector<f64> {
        &self.values * beta
    }

    /// Check the standardization invariant numerically: every column has
    /// mean within [`MEAN_TOL`] of 0 and variance within [`VAR_TOL`] of 1,
    /// unless flagged constant.
    pub fn satisfies_standardization(&self) -> bool {
        let n = self.n() as f64;
        (0..self.d()).all(|j| {
            let col = self.values.column(j);
            let mean = col.sum() / n;
            if mean.abs() >= MEAN_TOL {
                return false;
            }
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            self.constant_cols[j] || (var - 1.0).abs() < VAR_TOL
        })
    }
}

/// Center every column and scale it by its population standard deviation
/// (denominator `n`). Columns with raw variance below [`CONST_VAR_TOL`] are
/// centered, given scale 1, and flagged constant instead of failing, so
/// feature indices stay stable for reporting.
///
/// Returns the standardized matrix together with the column means and the
/// scales that were divided out.
pub fn standardize_columns(x: &FeatureMatrix) -> (FeatureMatrix, DVector<f64>, DVector<f64>) {
    let n = x.n() as f64;
    let d = x.d();
    let mut values = x.values.clone();
    let mut means = DVector::zeros(d);
    let mut scales = DVector::from_element(d, 1.0);
    let mut constant_cols = vec![false; d];

    for j in 0..d {
        let mut col = values.column_mut(j);
        let mean = col.sum() / n;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        means[j] = mean;
        if var < CONST_VAR_TOL {
            constant_cols[j] = true;
            col.iter_mut().for_each(|v| *v -= mean);
        } else {
            let scale = var.sqrt();
            scales[j] = scale;
            col.iter_mut().for_each(|v| *v = (*v - mean) / scale);
        }
    }

    (
        FeatureMatrix {
            values,
            standardized: true,
            constant_cols,
        },
        means,
        scales,
    )
}

/// Standardize unless the matrix already satisfies the standardization
/// invariant, in which case it is passed through bit-identically. Keeps
/// repeated standardization (e.g. of a segment that happens to be the whole
/// series) from perturbing values at machine precision.
pub fn standardize_columns_idempotent(x: &FeatureMatrix) -> FeatureMatrix {
    if x.satisfies_standardization() {
        let mut out = x.clone();
        out.standardized = true;
        out
    } else {
        standardize_columns(x).0
    }
}
