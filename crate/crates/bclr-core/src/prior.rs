//! Priors for the regression coefficients and the changepoint.

use crate::error::Error;
use crate::Result;
use nalgebra::{Cholesky, DMatrix, DVector};
use statrs::function::gamma::ln_gamma;

/// Absolute tolerance for prior covariance symmetry.
const SYM_TOL: f64 = 1e-12;

/// Gaussian prior `beta ~ N(mu, sigma)`.
///
/// The precision `sigma^{-1}` and `sigma^{-1} mu` are precomputed at
/// construction, which also certifies positive definiteness through a
/// successful Cholesky factorization.
#[derive(Debug, Clone)]
pub struct GaussianPrior {
    mu: DVector<f64>,
    sigma: DMatrix<f64>,
    precision: DMatrix<f64>,
    precision_mu: DVector<f64>,
}

impl GaussianPrior {
    /// Validate and build a prior from a mean vector and covariance matrix.
    pub fn new(mu: DVector<f64>, sigma: DMatrix<f64>) -> Result<Self> {
        let d = mu.len();
        if sigma.nrows() != d || sigma.ncols() != d || d == 0 {
            return Err(Error::InvalidPrior(format!(
                "covariance must be {d} x {d} to match the mean"
            )));
        }
        for i in 0..d {
            for j in (i + 1)..d {
                if (sigma[(i, j)] - sigma[(j, i)]).abs() > SYM_TOL {
                    return Err(Error::InvalidPrior("covariance is not symmetric".into()));
                }
            }
        }
        let chol = Cholesky::new(sigma.clone())
            .ok_or_else(|| Error::InvalidPrior("covariance is not positive definite".into()))?;
        let precision = chol.inverse();
        let precision_mu = &precision * &mu;
        Ok(Self {
            mu,
            sigma,
            precision,
            precision_mu,
        })
    }

    /// Zero-mean isotropic prior `N(0, variance * I_d)`.
    pub fn isotropic(d: usize, variance: f64) -> Result<Self> {
        if variance <= 0.0 || !variance.is_finite() {
            return Err(Error::InvalidPrior("variance must be positive".into()));
        }
        Self::new(DVector::zeros(d), DMatrix::identity(d, d) * variance)
    }

    /// Prior dimension.
    pub fn d(&self) -> usize {
        self.mu.len()
    }

    /// Prior mean.
    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    /// Prior covariance.
    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    /// Prior precision `sigma^{-1}`.
    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    /// `sigma^{-1} mu`.
    pub fn precision_mu(&self) -> &DVector<f64> {
        &self.precision_mu
    }

    /// Whether the mean is exactly zero in every coordinate.
    pub fn has_zero_mean(&self) -> bool {
        self.mu.iter().all(|v| *v == 0.0)
    }
}

/// Prior mass function for the changepoint over `{1, ..., n-1}`.
///
/// `kappa = n` would encode "no change", which the single-changepoint model
/// excludes, so the support stops at `n - 1`. Stored as normalized log
/// weights.
#[derive(Debug, Clone)]
pub struct KappaPrior {
    log_weights: Vec<f64>,
}

impl KappaPrior {
    /// Discrete uniform prior on `{1, ..., n-1}`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(
                "changepoint support requires n >= 2".into(),
            ));
        }
        let w = -(((n - 1) as f64).ln());
        Ok(Self {
            log_weights: vec![w; n - 1],
        })
    }

    /// Prior proportional to the given positive weights over `{1, ..., n-1}`.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidPrior("empty changepoint prior".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidPrior(
                "changepoint prior weights must be positive".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        Ok(Self {
            log_weights: weights.iter().map(|w| (w / total).ln()).collect(),
        })
    }

    /// Shifted-binomial prior on `{1, ..., n-1}`:
    /// `pi(kappa) = C(n-2, kappa-1) p^(kappa-1) (1-p)^(n-1-kappa)`.
    ///
    /// Places no mass on `kappa = n`; with `n = 50`, `p = 0.8` the unique
    /// mode sits at `kappa = 40`.
    pub fn binomial(n: usize, p: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(
                "changepoint support requires n >= 2".into(),
            ));
        }
        if !(0.0..1.0).contains(&p) || p == 0.0 {
            return Err(Error::InvalidPrior(
                "binomial prior requires p in (0, 1)".into(),
            ));
        }
        let m = (n - 2) as f64;
        let log_weights = (1..n)
            .map(|kappa| {
                let k = (kappa - 1) as f64;
                ln_gamma(m + 1.0) - ln_gamma(k + 1.0) - ln_gamma(m - k + 1.0)
                    + k * p.ln()
                    + (m - k) * (1.0 - p).ln()
            })
            .collect();
        Ok(Self { log_weights })
    }

    /// Size of the support, `n - 1`.
    pub fn len(&self) -> usize {
        self.log_weights.len()
    }

    /// True when the support is empty (never, for validated priors).
    pub fn is_empty(&self) -> bool {
        self.log_weights.is_empty()
    }

    /// Normalized log mass at `kappa` (1-based).
    pub fn log_weight(&self, kappa: usize) -> f64 {
        self.log_weights[kappa - 1]
    }

    /// All normalized log weights, index 0 holding `kappa = 1`.
    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }
}
