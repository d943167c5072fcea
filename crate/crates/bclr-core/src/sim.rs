//! Synthetic data generators for the benchmark scenarios.
//!
//! Five scenarios with known ground truth:
//! - `exp1`/`exp2`: 50 standard-normal images of 50 x 50 pixels; after the
//!   changepoint a random rectangle gains a fixed intensity offset (-2 after
//!   frame 25, or +1 after frame 40). The rectangle is redrawn per frame.
//! - `mixed`: 600 five-dimensional rows mixing categorical dummies (whose
//!   distribution shifts after row 350) with correlated Laplace noise.
//! - `covariance`: 300 four-dimensional Gaussian rows whose covariance picks
//!   up off-diagonal structure after row 200.
//! - `multi3`: 250 three-dimensional Gaussian rows with variance, mean, and
//!   covariance changes after rows 100, 175, and 205.

use crate::cubical::ImageFrame;
use crate::embed::{embed_image_series, embed_tabular_series, EmbeddingSpec};
use crate::error::Error;
use crate::gibbs::{run_gibbs, GibbsConfig, PosteriorSamples};
use crate::multi::{multi_fit, MultiConfig, MultiResult};
use crate::prior::{GaussianPrior, KappaPrior};
use crate::rng::{domains, stream_id, RngStream};
use crate::Result;
use nalgebra::{Cholesky, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

/// Benchmark scenario identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Image series, rectangle offset -2 after frame 25.
    Exp1,
    /// Image series, rectangle offset +1 after frame 40.
    Exp2,
    /// Mixed categorical/continuous change after row 350.
    Mixed,
    /// Covariance change after row 200.
    Covariance,
    /// Three changes in 250 rows.
    Multi3,
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exp1" => Ok(Self::Exp1),
            "exp2" => Ok(Self::Exp2),
            "mixed" => Ok(Self::Mixed),
            "covariance" | "cov" => Ok(Self::Covariance),
            "multi3" | "multi" => Ok(Self::Multi3),
            other => Err(Error::InvalidInput(format!("unknown scenario '{other}'"))),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::Exp1 => "exp1",
            Self::Exp2 => "exp2",
            Self::Mixed => "mixed",
            Self::Covariance => "covariance",
            Self::Multi3 => "multi3",
        };
        f.write_str(name)
    }
}

impl Scenario {
    /// True changepoints of the scenario.
    pub fn true_changepoints(&self) -> Vec<usize> {
        match self {
            Self::Exp1 => vec![25],
            Self::Exp2 => vec![40],
            Self::Mixed => vec![350],
            Self::Covariance => vec![200],
            Self::Multi3 => vec![100, 175, 205],
        }
    }

    /// Series length.
    pub fn n(&self) -> usize {
        match self {
            Self::Exp1 | Self::Exp2 => 50,
            Self::Mixed => 600,
            Self::Covariance => 300,
            Self::Multi3 => 250,
        }
    }

    /// The feature embedding each scenario was designed around.
    pub fn default_embedding(&self) -> EmbeddingSpec {
        match self {
            Self::Exp1 | Self::Exp2 => EmbeddingSpec::tda_stat(),
            Self::Mixed => EmbeddingSpec::identity(),
            Self::Covariance | Self::Multi3 => EmbeddingSpec::poly2(),
        }
    }

    /// Default coefficient prior variance: 3 for image features, 1/3 for
    /// tabular features.
    pub fn default_prior_scale(&self) -> f64 {
        match self {
            Self::Exp1 | Self::Exp2 => 3.0,
            Self::Mixed | Self::Covariance | Self::Multi3 => 1.0 / 3.0,
        }
    }

    /// Generate and embed one replication, returning the feature matrix.
    pub fn embed_replication(&self, embedding: &EmbeddingSpec, seed: u64, rep: u64) -> Result<crate::data::FeatureMatrix> {
        let mut rng = RngStream::new(seed, stream_id(domains::DATA, rep, 0));
        match self {
            Self::Exp1 | Self::Exp2 => {
                let variant = if matches!(self, Self::Exp1) { 1 } else { 2 };
                let (frames, _) = gen_exp_images(variant, &mut rng);
                embed_image_series(&frames, embedding)
            }
            Self::Mixed => embed_tabular_series(&gen_mixed(&mut rng).0, embedding),
            Self::Covariance => embed_tabular_series(&gen_covariance(&mut rng).0, embedding),
            Self::Multi3 => embed_tabular_series(&gen_multi3(&mut rng).0, embedding),
        }
    }
}

/// Run `reps` independent single-changepoint replications of a scenario.
/// Replication `r` generates its data on stream `(DATA, r)` and runs its
/// chain on stream `(CHAIN, r)`, so results are independent of scheduling.
pub fn run_single_replications(
    scenario: Scenario,
    reps: u64,
    embedding: &EmbeddingSpec,
    prior_scale: f64,
    chain: &GibbsConfig,
    seed: u64,
) -> Result<Vec<PosteriorSamples>> {
    if matches!(scenario, Scenario::Multi3) {
        return Err(Error::InvalidInput(
            "multi3 is a multiple-changepoint scenario".into(),
        ));
    }
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let x = scenario.embed_replication(embedding, seed, rep)?;
            let prior = GaussianPrior::isotropic(x.d(), prior_scale)?;
            let kappa_prior = KappaPrior::uniform(x.n())?;
            let mut rng = RngStream::new(seed, stream_id(domains::CHAIN, rep, 0));
            run_gibbs(&x, &prior, &kappa_prior, chain, &mut rng)
        })
        .collect()
}

/// Run `reps` independent multiple-changepoint replications of the `multi3`
/// scenario under the given configuration template (its `seed` and
/// `replication` fields are overwritten per replication).
pub fn run_multi_replications(
    reps: u64,
    embedding: &EmbeddingSpec,
    template: &MultiConfig,
    seed: u64,
) -> Result<Vec<MultiResult>> {
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let x = Scenario::Multi3.embed_replication(embedding, seed, rep)?;
            let config = MultiConfig {
                seed,
                replication: rep,
                ..*template
            };
            multi_fit(&x, &config)
        })
        .collect()
}

/// Generate one image-series replication: 50 frames of 50 x 50 i.i.d.
/// standard normal pixels. After the changepoint each frame adds the
/// variant's offset on an independently drawn rectangle
/// `[L1 - W1, L1 + W1] x [L2 - W2, L2 + W2]` with `L` uniform on
/// `{5, ..., 44}` and `W` uniform on `{2, 3, 4}` (1-based pixel
/// coordinates), so the rectangle moves from frame to frame.
///
/// Returns the frames and the true changepoint (25 for variant 1 with
/// offset -2, 40 for variant 2 with offset +1).
pub fn gen_exp_images<R: Rng + ?Sized>(variant: u8, rng: &mut R) -> (Vec<ImageFrame>, usize) {
    let (kappa_star, offset) = match variant {
        1 => (25usize, -2.0),
        2 => (40usize, 1.0),
        _ => panic!("image experiment variant must be 1 or 2"),
    };
    let (n, size) = (50usize, 50usize);
    let mut frames = Vec::with_capacity(n);
    for i in 1..=n {
        let mut pixels = vec![0.0; size * size];
        for p in pixels.iter_mut() {
            *p = rng.sample::<f64, _>(StandardNormal);
        }
        let mut frame = ImageFrame::new(size, size, pixels).unwrap();
        if i > kappa_star {
            let l1 = rng.random_range(5..=44usize);
            let l2 = rng.random_range(5..=44usize);
            let w1 = rng.random_range(2..=4usize);
            let w2 = rng.random_range(2..=4usize);
            for r in (l1 - w1)..=(l1 + w1) {
                for c in (l2 - w2)..=(l2 + w2) {
                    *frame.get_mut(r - 1, c - 1) += offset;
                }
            }
        }
        frames.push(frame);
    }
    (frames, kappa_star)
}

/// Standard Laplace draw (density `exp(-|y|)/2`, variance 2) by inversion.
fn standard_laplace<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random::<f64>() - 0.5;
    -u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

/// Mixed-type scenario: 600 rows of `(1{Z=1}, 1{Z=2}, Y3, 2 Y4, Y5 - Y4)`
/// with `Y` i.i.d. standard Laplace and the categorical distribution
/// shifting from `(0.5, 0.2, 0.3)` to `(0.1, 0.5, 0.4)` after row 350.
pub fn gen_mixed<R: Rng + ?Sized>(rng: &mut R) -> (DMatrix<f64>, usize) {
    let (n, kappa_star) = (600usize, 350usize);
    let mut rows = DMatrix::zeros(n, 5);
    for i in 0..n {
        let (p1, p2) = if i < kappa_star { (0.5, 0.2) } else { (0.1, 0.5) };
        let u: f64 = rng.random();
        let z = if u < p1 {
            1
        } else if u < p1 + p2 {
            2
        } else {
            3
        };
        rows[(i, 0)] = f64::from(z == 1);
        rows[(i, 1)] = f64::from(z == 2);
        let y3 = standard_laplace(rng);
        let y4 = standard_laplace(rng);
        let y5 = standard_laplace(rng);
        // (X3, X4, X5) = (Y3, Y4, Y5) B with B = [[1,0,0],[0,2,-1],[0,0,1]].
        rows[(i, 2)] = y3;
        rows[(i, 3)] = 2.0 * y4;
        rows[(i, 4)] = -y4 + y5;
    }
    (rows, kappa_star)
}

fn gaussian_rows<R: Rng + ?Sized>(
    rng: &mut R,
    out: &mut DMatrix<f64>,
    rows: std::ops::Range<usize>,
    mean: &[f64],
    chol: &DMatrix<f64>,
) {
    let d = mean.len();
    for i in rows {
        let z: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        for a in 0..d {
            let mut v = mean[a];
            for b in 0..=a {
                v += chol[(a, b)] * z[b];
            }
            out[(i, a)] = v;
        }
    }
}

fn lower_cholesky(entries: &[f64], d: usize) -> DMatrix<f64> {
    Cholesky::new(DMatrix::from_row_slice(d, d, entries))
        .expect("scenario covariance is positive definite")
        .l()
}

/// Covariance-change scenario: 300 rows `N(0, Sigma_i)` in four dimensions;
/// the identity covariance gains (1,2) and (1,3) correlations of 0.8 and
/// 0.1 after row 200.
pub fn gen_covariance<R: Rng + ?Sized>(rng: &mut R) -> (DMatrix<f64>, usize) {
    let (n, kappa_star) = (300usize, 200usize);
    let mut rows = DMatrix::zeros(n, 4);
    let pre = DMatrix::identity(4, 4);
    #[rustfmt::skip]
    let post = lower_cholesky(&[
        1.0, 0.8, 0.1, 0.0,
        0.8, 1.0, 0.0, 0.0,
        0.1, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
    ], 4);
    gaussian_rows(rng, &mut rows, 0..kappa_star, &[0.0; 4], &pre);
    gaussian_rows(rng, &mut rows, kappa_star..n, &[0.0; 4], &post);
    (rows, kappa_star)
}

/// Multiple-changepoint scenario: 250 rows in three dimensions with
/// changepoints at 100 (variance of the first coordinate quadruples), 175
/// (second coordinate gains mean 3), and 205 (the (1,3) covariance flips to
/// -1.7).
pub fn gen_multi3<R: Rng + ?Sized>(rng: &mut R) -> (DMatrix<f64>, Vec<usize>) {
    let n = 250usize;
    let breaks = vec![100usize, 175, 205];
    let mut rows = DMatrix::zeros(n, 3);
    #[rustfmt::skip]
    let sigma1 = lower_cholesky(&[
        1.0, 0.2, 0.1,
        0.2, 1.0, 0.0,
        0.1, 0.0, 1.0,
    ], 3);
    #[rustfmt::skip]
    let sigma2 = lower_cholesky(&[
        4.0, 0.4, 0.2,
        0.4, 1.0, 0.0,
        0.2, 0.0, 1.0,
    ], 3);
    #[rustfmt::skip]
    let sigma3 = lower_cholesky(&[
        4.0, 0.4, -1.7,
        0.4, 1.0, 0.0,
        -1.7, 0.0, 1.0,
    ], 3);
    gaussian_rows(rng, &mut rows, 0..100, &[0.0; 3], &sigma1);
    gaussian_rows(rng, &mut rows, 100..175, &[0.0; 3], &sigma2);
    gaussian_rows(rng, &mut rows, 175..205, &[0.0, 3.0, 0.0], &sigma2);
    gaussian_rows(rng, &mut rows, 205..250, &[0.0, 3.0, 0.0], &sigma3);
    (rows, breaks)
}
