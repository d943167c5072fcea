//! Offline Bayesian changepoint detection via logistic regression (BCLR).
//!
//! A series `x_1, ..., x_n` is modeled through latent Bernoulli labels that
//! are zero before an unknown changepoint `kappa` and one after it. The
//! quasi-likelihood of `(kappa, beta)` is the logistic-regression likelihood
//! of those labels, and a Gaussian prior on the regression coefficients
//! `beta` yields a Gibbs sampler with Polya-gamma data augmentation:
//!
//! ```text
//! kappa | beta, X   ~ categorical on {1, ..., n-1}
//! omega_i | beta    ~ PG(1, x_i' beta)
//! beta | kappa, omega ~ N(m_omega, V_omega)
//! ```
//!
//! The crate also ships a topological feature pipeline for grayscale image
//! series (separable Gaussian smoothing, sublevel-set cubical persistence,
//! and a 36-statistic diagram embedding), a multiple-changepoint extension
//! built on segment-wise fits with entropy pruning, and simulation
//! generators plus evaluation metrics for benchmarking.

pub mod cubical;
pub mod data;
pub mod embed;
pub mod error;
pub mod features;
pub mod gibbs;
pub mod metrics;
pub mod multi;
pub mod pg;
pub mod posterior;
pub mod prior;
pub mod rng;
pub mod sim;
pub mod stack;

pub use cubical::{gaussian_smooth, standardize_frame, sublevel_pd, ImageFrame, PersistenceDiagram};
pub use data::{standardize_columns, FeatureMatrix};
pub use embed::{embed_image_series, embed_tabular_series, poly2, EmbeddingKind, EmbeddingSpec};
pub use error::Error;
pub use features::{alps, f_stat, persistence_image, persistent_entropy, FeatureVector, LifetimeSummary};
pub use gibbs::{
    log_kappa_weights, run_gibbs, sample_beta, sample_kappa, sample_omegas, GibbsConfig,
    PosteriorSamples,
};
pub use metrics::{evaluate_multi, evaluate_single, CoverageRow, MetricsReport};
pub use multi::{
    constrained_modes, fit_segments, initial_partition, multi_fit, prune_by_entropy,
    ChangepointReport, MultiConfig, MultiResult, Partition, SegmentPosterior,
};
pub use pg::sample_pg;
pub use posterior::{
    check_margin, highest_mass_set, marginal_mc_oracle, normalized_entropy, point_estimates,
    prop2_bound, quadrature_marginal, quantile_interval, snr_report, ChangepointPosterior,
    CredibleKind, CredibleSet, SnrReport,
};
pub use prior::{GaussianPrior, KappaPrior};
pub use rng::RngStream;
pub use sim::{
    gen_covariance, gen_exp_images, gen_mixed, gen_multi3, run_multi_replications,
    run_single_replications, Scenario,
};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
