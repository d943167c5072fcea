//! Multiple changepoints by segment-wise single-changepoint fits.
//!
//! The series is over-partitioned into `J + 1` blocks; each *segment* (two
//! consecutive blocks) gets its own single-changepoint fit. Estimated modes
//! are extracted left to right under a minimum-gap constraint `Delta`, and
//! candidates whose segment posterior is too flat (normalized entropy at or
//! above a threshold) are pruned bottom-up. Two cheap warm-up rounds refine
//! the partition before a full-length final fit, so the final chains see all
//! the data between surviving changepoints.

use crate::data::{standardize_columns_idempotent, FeatureMatrix};
use crate::error::Error;
use crate::gibbs::{run_gibbs, GibbsConfig, PosteriorSamples};
use crate::posterior::{
    normalized_entropy, quantile_interval, snr_report, ChangepointPosterior, CredibleSet,
    SnrReport,
};
use crate::prior::{GaussianPrior, KappaPrior};
use crate::rng::{domains, stream_id, RngStream};
use crate::Result;
use rayon::prelude::*;

/// Block boundaries `0 = tau_0 <= tau_1 < ... < tau_J < tau_{J+1} = n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    boundaries: Vec<usize>,
}

impl Partition {
    /// Build from explicit interior boundaries (strictly increasing, inside
    /// `(0, n)`).
    pub fn from_changepoints(n: usize, interior: &[usize]) -> Result<Self> {
        let mut boundaries = Vec::with_capacity(interior.len() + 2);
        boundaries.push(0);
        boundaries.extend_from_slice(interior);
        boundaries.push(n);
        for w in boundaries.windows(2).skip(1) {
            if w[0] >= w[1] {
                return Err(Error::InvalidInput(format!(
                    "partition boundaries must increase: {:?}",
                    boundaries
                )));
            }
        }
        if interior.first().is_some_and(|t| *t == 0) {
            return Err(Error::InvalidInput("tau_1 must exceed 0".into()));
        }
        Ok(Self { boundaries })
    }

    /// Number of segments `J` (interior boundary count).
    pub fn segments(&self) -> usize {
        self.boundaries.len() - 2
    }

    /// Series length `n`.
    pub fn n(&self) -> usize {
        *self.boundaries.last().unwrap()
    }

    /// All boundaries including the endpoints.
    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// Row range (0-based, half-open) of segment `j`: observations
    /// `tau_{j-1} + 1 ..= tau_{j+1}` in 1-based indexing.
    pub fn segment_rows(&self, j: usize) -> (usize, usize) {
        (self.boundaries[j], self.boundaries[j + 2])
    }
}

/// Evenly spaced initial partition `tau_j = floor(n j / (J + 1))`.
pub fn initial_partition(n: usize, segments: usize) -> Result<Partition> {
    if segments == 0 || n < 2 * (segments + 1) {
        return Err(Error::InvalidInput(format!(
            "cannot split {n} observations into {segments} segments"
        )));
    }
    let interior: Vec<usize> = (1..=segments).map(|j| n * j / (segments + 1)).collect();
    Partition::from_changepoints(n, &interior)
}

/// One segment's fit: posterior over global changepoint indices plus the
/// retained draws for coefficient summaries.
#[derive(Debug, Clone)]
pub struct SegmentPosterior {
    /// Segment index within its partition.
    pub segment: usize,
    /// Marginal posterior with support `tau_{j-1}+1 ..= tau_{j+1}-1`
    /// (global indices).
    pub posterior: ChangepointPosterior,
    /// Post-burn-in draws, kappa already mapped to global indices.
    pub samples: PosteriorSamples,
}

/// Settings for the multiple-changepoint procedure.
#[derive(Debug, Clone, Copy)]
pub struct MultiConfig {
    /// Initial number of segments `J`.
    pub segments: usize,
    /// Minimum gap between changepoints; must satisfy
    /// `min_gap < floor(n / (2 J + 2))`.
    pub min_gap: usize,
    /// Entropy thresholds for the two warm-up prunes and the final prune.
    /// A candidate is removed when its normalized entropy is `>=` the
    /// threshold; values above 1 disable pruning at that stage.
    pub eta: [f64; 3],
    /// Warm-up chain length.
    pub warm: GibbsConfig,
    /// Final chain length.
    pub fin: GibbsConfig,
    /// Variance of the per-segment isotropic coefficient prior.
    pub prior_scale: f64,
    /// Seed shared by every per-segment stream.
    pub seed: u64,
    /// Replication index separating concurrent runs.
    pub replication: u64,
}

impl Default for MultiConfig {
    fn default() -> Self {
        Self {
            segments: 10,
            min_gap: 10,
            eta: [0.75, 0.5, 1.0],
            warm: GibbsConfig {
                iterations: 600,
                burn_in: 300,
            },
            fin: GibbsConfig {
                iterations: 5000,
                burn_in: 2500,
            },
            prior_scale: 1.0,
            seed: 0,
            replication: 0,
        }
    }
}

impl MultiConfig {
    fn validate(&self, n: usize) -> Result<()> {
        self.warm.validate()?;
        self.fin.validate()?;
        if self.min_gap == 0 {
            return Err(Error::InvalidInput("min gap must be positive".into()));
        }
        let cap = n / (2 * self.segments + 2);
        if self.min_gap >= cap {
            return Err(Error::InvalidInput(format!(
                "min gap {} must stay below floor(n / (2J + 2)) = {cap}",
                self.min_gap
            )));
        }
        Ok(())
    }
}

/// The RNG stream used for segment `j` at stage `stage` (0, 1 warm-ups,
/// 2 final). Exposed so callers can reproduce an individual segment chain.
pub fn segment_stream(config: &MultiConfig, stage: usize, segment: usize) -> RngStream {
    RngStream::new(
        config.seed,
        stream_id(
            domains::CHAIN,
            config.replication,
            (stage * 4096 + segment) as u64,
        ),
    )
}

/// Fit every segment of the partition with its own stream. Segment rows are
/// re-standardized locally (the centering contract applies to each sub-fit),
/// except when a segment already satisfies the invariant, in which case the
/// rows pass through untouched.
pub fn fit_segments(
    x: &FeatureMatrix,
    partition: &Partition,
    config: &MultiConfig,
    stage: usize,
    chain: &GibbsConfig,
) -> Result<Vec<SegmentPosterior>> {
    if !x.is_standardized() {
        return Err(Error::NotStandardized);
    }
    (0..partition.segments())
        .into_par_iter()
        .map(|j| {
            let (lo, hi) = partition.segment_rows(j);
            let rows = x.rows(lo, hi).map_err(|e| {
                Error::InvalidInput(format!("segment {j}: {e}"))
            })?;
            let local = standardize_columns_idempotent(&rows);
            let m = local.n();
            let prior_beta = GaussianPrior::isotropic(local.d(), config.prior_scale)?;
            let prior_kappa = KappaPrior::uniform(m)?;
            let mut rng = segment_stream(config, stage, j);
            let samples = run_gibbs(&local, &prior_beta, &prior_kappa, chain, &mut rng)
                .map_err(|e| Error::InvalidInput(format!("segment {j}: {e}")))?
                .offset_kappa(lo);
            let posterior =
                ChangepointPosterior::from_draws(samples.kappa_draws(), lo + 1, m - 1)?;
            Ok(SegmentPosterior {
                segment: j,
                posterior,
                samples,
            })
        })
        .collect()
}

/// Left-to-right constrained mode extraction. Each segment's estimate is the
/// posterior argmax over `[khat_{j-1} + Delta, tau_{j+1} - Delta]`; when that
/// window is empty or carries no posterior mass (the segment's mass sits
/// entirely outside, e.g. on a changepoint the previous segment already
/// claimed), the estimate collapses onto its predecessor and is dropped, so
/// fewer than `J` changepoints may survive.
///
/// Returns `(segment index, changepoint)` pairs.
pub fn constrained_modes(
    posteriors: &[SegmentPosterior],
    partition: &Partition,
    delta: usize,
) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    let mut prev = 0usize;
    for (j, seg) in posteriors.iter().enumerate() {
        let lo_window = prev + delta;
        let hi_window = partition.boundaries()[j + 2].saturating_sub(delta);
        let lo = lo_window.max(seg.posterior.first());
        let hi = hi_window.min(seg.posterior.last());
        if lo > hi {
            continue;
        }
        let mut best = lo;
        for k in lo..=hi {
            if seg.posterior.prob(k) > seg.posterior.prob(best) {
                best = k;
            }
        }
        if seg.posterior.prob(best) == 0.0 {
            continue;
        }
        out.push((j, best));
        prev = best;
    }
    out
}

/// Per-changepoint summary in a [`MultiResult`].
#[derive(Debug, Clone)]
pub struct ChangepointReport {
    /// Estimated changepoint (global index).
    pub kappa: usize,
    /// Segment posterior the estimate came from.
    pub posterior: ChangepointPosterior,
    /// Normalized entropy of that posterior.
    pub entropy: f64,
    /// 95% quantile credible interval.
    pub interval: CredibleSet,
    /// Coefficient signal-to-noise ranking for the segment fit.
    pub snr: SnrReport,
}

/// Ordered changepoint estimates with their per-segment summaries.
#[derive(Debug, Clone)]
pub struct MultiResult {
    /// Surviving changepoints, strictly increasing.
    pub changepoints: Vec<usize>,
    /// Aligned per-changepoint reports.
    pub reports: Vec<ChangepointReport>,
}

impl MultiResult {
    fn empty() -> Self {
        Self {
            changepoints: Vec::new(),
            reports: Vec::new(),
        }
    }
}

/// Keep the changepoints whose segment posterior has normalized entropy
/// strictly below `eta`; flat posteriors express no changepoint.
pub fn prune_by_entropy(
    posteriors: &[SegmentPosterior],
    modes: &[(usize, usize)],
    eta: f64,
) -> Result<MultiResult> {
    let mut changepoints = Vec::new();
    let mut reports = Vec::new();
    for &(j, kappa) in modes {
        let seg = &posteriors[j];
        let entropy = normalized_entropy(&seg.posterior);
        if entropy >= eta {
            continue;
        }
        changepoints.push(kappa);
        reports.push(ChangepointReport {
            kappa,
            posterior: seg.posterior.clone(),
            entropy,
            interval: quantile_interval(&seg.posterior, 0.05),
            snr: snr_report(&seg.samples)?,
        });
    }
    Ok(MultiResult {
        changepoints,
        reports,
    })
}

/// Run the full procedure: warm-up fit and prune at `eta[0]`, rebuild the
/// partition from the survivors, second warm-up pruned at `eta[1]`, rebuild
/// again, final full-length fit pruned at `eta[2]`.
///
/// An empty survivor set at any stage is a valid outcome (no detectable
/// change) and short-circuits to an empty result.
pub fn multi_fit(x: &FeatureMatrix, config: &MultiConfig) -> Result<MultiResult> {
    let n = x.n();
    config.validate(n)?;
    let mut partition = initial_partition(n, config.segments)?;

    for stage in 0..3 {
        let chain = if stage == 2 { &config.fin } else { &config.warm };
        let posteriors = fit_segments(x, &partition, config, stage, chain)?;
        let modes = constrained_modes(&posteriors, &partition, config.min_gap);
        let result = prune_by_entropy(&posteriors, &modes, config.eta[stage])?;
        if stage == 2 {
            return Ok(result);
        }
        if result.changepoints.is_empty() {
            return Ok(MultiResult::empty());
        }
        partition = Partition::from_changepoints(n, &result.changepoints)?;
    }
    unreachable!()
}
