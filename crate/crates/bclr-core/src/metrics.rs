//! Evaluation metrics over benchmark replications.
//!
//! Single-changepoint runs report the exact-hit rate, three RMSE variants
//! (within-posterior, posterior-mean, posterior-mode), and the empirical
//! coverage of both credible-set constructions across a significance grid.
//! Multiple-changepoint runs are scored by the Rand and adjusted Rand
//! indices of the induced segmentations.

use crate::gibbs::PosteriorSamples;
use crate::posterior::{highest_mass_set, point_estimates, quantile_interval, ChangepointPosterior};
use crate::Result;
use serde::Serialize;

/// Coverage at one significance level.
#[derive(Debug, Clone, Serialize)]
pub struct CoverageRow {
    /// Significance level `alpha`.
    pub alpha: f64,
    /// How often the quantile interval covered the truth.
    pub interval: f64,
    /// How often the highest-mass set covered the truth.
    pub highest_mass: f64,
}

/// Aggregated benchmark metrics.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    /// Replication count.
    pub replications: usize,
    /// Fraction of replications whose posterior mode hit the truth.
    pub pct_exact: f64,
    /// Binomial standard error of `pct_exact`.
    pub pct_exact_se: f64,
    /// Mean over replications of the within-posterior RMSE.
    pub rmse0: f64,
    /// Standard deviation of the within-posterior RMSE across replications.
    pub rmse0_sd: f64,
    /// RMSE of the posterior means.
    pub rmse1: f64,
    /// RMSE of the posterior modes.
    pub rmse2: f64,
    /// Mean within-posterior variance (the slack term in the Jensen bound
    /// `rmse0 <= sqrt(rmse1^2 + mean_within_var)`).
    pub mean_within_var: f64,
    /// Coverage per significance level.
    pub coverage: Vec<CoverageRow>,
    /// Mean Rand index (multiple-changepoint runs only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rand: Option<f64>,
    /// Mean adjusted Rand index (multiple-changepoint runs only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adjusted_rand: Option<f64>,
}

impl MetricsReport {
    /// Right-hand side of the Jensen inequality on RMSE variants.
    pub fn jensen_bound(&self) -> f64 {
        (self.rmse1 * self.rmse1 + self.mean_within_var).sqrt()
    }
}

/// Significance grid used by the benchmark harness.
pub const ALPHA_GRID: [f64; 5] = [0.5, 0.2, 0.1, 0.05, 0.01];

/// Score single-changepoint replications against the true `kappa_star`.
/// `n` fixes the posterior support `{1, ..., n-1}`.
pub fn evaluate_single(
    replications: &[PosteriorSamples],
    n: usize,
    kappa_star: usize,
) -> Result<MetricsReport> {
    assert!(!replications.is_empty());
    let reps = replications.len() as f64;
    let mut exact = 0usize;
    let mut rmse0_vals = Vec::with_capacity(replications.len());
    let mut sq_mean_err = 0.0;
    let mut sq_mode_err = 0.0;
    let mut within_var = 0.0;
    let mut interval_hits = vec![0usize; ALPHA_GRID.len()];
    let mut hms_hits = vec![0usize; ALPHA_GRID.len()];

    for samples in replications {
        let (mode, mean) = point_estimates(samples);
        exact += usize::from(mode == kappa_star);
        sq_mean_err += (mean - kappa_star as f64).powi(2);
        sq_mode_err += (mode as f64 - kappa_star as f64).powi(2);

        let draws = samples.kappa_draws();
        let m = draws.len() as f64;
        let within_mse = draws
            .iter()
            .map(|k| (*k as f64 - kappa_star as f64).powi(2))
            .sum::<f64>()
            / m;
        rmse0_vals.push(within_mse.sqrt());
        within_var += draws.iter().map(|k| (*k as f64 - mean).powi(2)).sum::<f64>() / m;

        let posterior = ChangepointPosterior::from_draws(draws, 1, n - 1)?;
        for (i, alpha) in ALPHA_GRID.iter().enumerate() {
            if quantile_interval(&posterior, *alpha).contains(kappa_star) {
                interval_hits[i] += 1;
            }
            if highest_mass_set(&posterior, *alpha).contains(kappa_star) {
                hms_hits[i] += 1;
            }
        }
    }

    let pct_exact = exact as f64 / reps;
    let rmse0 = rmse0_vals.iter().sum::<f64>() / reps;
    let rmse0_sd =
        (rmse0_vals.iter().map(|r| (r - rmse0).powi(2)).sum::<f64>() / reps).sqrt();
    let report = MetricsReport {
        replications: replications.len(),
        pct_exact,
        pct_exact_se: (pct_exact * (1.0 - pct_exact) / reps).sqrt(),
        rmse0,
        rmse0_sd,
        rmse1: (sq_mean_err / reps).sqrt(),
        rmse2: (sq_mode_err / reps).sqrt(),
        mean_within_var: within_var / reps,
        coverage: ALPHA_GRID
            .iter()
            .zip(interval_hits.iter().zip(&hms_hits))
            .map(|(alpha, (i, h))| CoverageRow {
                alpha: *alpha,
                interval: *i as f64 / reps,
                highest_mass: *h as f64 / reps,
            })
            .collect(),
        rand: None,
        adjusted_rand: None,
    };
    debug_assert!(report.rmse0 <= report.jensen_bound() + 1e-9);
    Ok(report)
}

/// Segment label of each index under a changepoint set: the count of
/// changepoints strictly below it.
fn segment_labels(changepoints: &[usize], n: usize) -> Vec<usize> {
    (1..=n)
        .map(|i| changepoints.iter().filter(|k| **k < i).count())
        .collect()
}

/// Segment sizes of a changepoint set over `{1, ..., n}`.
fn segment_sizes(changepoints: &[usize], n: usize) -> Vec<usize> {
    let mut sizes = Vec::with_capacity(changepoints.len() + 1);
    let mut prev = 0;
    for k in changepoints {
        sizes.push(k - prev);
        prev = *k;
    }
    sizes.push(n - prev);
    sizes
}

fn choose2(k: usize) -> f64 {
    (k * k.saturating_sub(1)) as f64 / 2.0
}

/// Rand and adjusted Rand indices between the segmentations of `{1, ..., n}`
/// induced by the estimated and true changepoint sets.
pub fn evaluate_multi(estimated: &[usize], truth: &[usize], n: usize) -> (f64, f64) {
    let a = segment_labels(estimated, n);
    let b = segment_labels(truth, n);
    let rows = segment_sizes(estimated, n);
    let cols = segment_sizes(truth, n);

    // Contingency table via the joint labels.
    let mut joint = vec![0usize; rows.len() * cols.len()];
    for (la, lb) in a.iter().zip(&b) {
        joint[la * cols.len() + lb] += 1;
    }
    let sum_joint: f64 = joint.iter().map(|c| choose2(*c)).sum();
    let sum_rows: f64 = rows.iter().map(|c| choose2(*c)).sum();
    let sum_cols: f64 = cols.iter().map(|c| choose2(*c)).sum();
    let total = choose2(n);

    // Rand = (agreements) / (pairs): pairs together in both plus pairs
    // apart in both.
    let rand = (total + 2.0 * sum_joint - sum_rows - sum_cols) / total;

    let expected = sum_rows * sum_cols / total;
    let max = 0.5 * (sum_rows + sum_cols);
    let ari = if (max - expected).abs() < 1e-12 {
        1.0
    } else {
        (sum_joint - expected) / (max - expected)
    };
    (rand, ari)
}
