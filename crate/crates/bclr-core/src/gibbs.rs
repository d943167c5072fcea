//! The three full conditionals of the changepoint sampler and the chain
//! driver.
//!
//! With `F(t) = e^t/(1+e^t)`, the conditional mass of the changepoint is
//!
//! ```text
//! pi(kappa | beta, X) prop. prod_{i<=kappa} (1-F(x_i' beta))
//!                           prod_{i>kappa} F(x_i' beta) * pi(kappa),
//! ```
//!
//! whose log telescopes to `sum_{i>kappa} x_i' beta + log pi(kappa)` plus a
//! kappa-free constant, so the weights are formed in log space and
//! normalized by max subtraction (the suffix sums can reach hundreds).
//! Given Polya-gamma draws `omega_i ~ PG(1, x_i' beta)` the coefficient
//! update is the Gaussian
//!
//! ```text
//! beta | kappa, omega ~ N(m, V),  V = (X' Omega X + Sigma^-1)^-1,
//!                                 m = V (X' delta + Sigma^-1 mu),
//! ```
//!
//! where `delta_i` is `-1/2` up to the changepoint and `+1/2` after it. The
//! draw goes through a Cholesky factorization of the precision matrix; the
//! covariance is never inverted explicitly.

use crate::data::FeatureMatrix;
use crate::error::Error;
use crate::pg::sample_pg;
use crate::prior::{GaussianPrior, KappaPrior};
use crate::Result;
use nalgebra::{Cholesky, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Chain length settings.
#[derive(Debug, Clone, Copy)]
pub struct GibbsConfig {
    /// Total sweeps, including burn-in.
    pub iterations: usize,
    /// Leading sweeps to discard. Must be strictly less than `iterations`.
    pub burn_in: usize,
}

impl GibbsConfig {
    /// Validated constructor.
    pub fn new(iterations: usize, burn_in: usize) -> Result<Self> {
        let cfg = Self {
            iterations,
            burn_in,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.burn_in >= self.iterations {
            return Err(Error::InvalidInput(format!(
                "burn-in {} must be below iterations {}",
                self.burn_in, self.iterations
            )));
        }
        Ok(())
    }

    /// Number of retained post-burn-in sweeps.
    pub fn retained(&self) -> usize {
        self.iterations - self.burn_in
    }
}

impl Default for GibbsConfig {
    /// 5000 sweeps with the first 2500 discarded.
    fn default() -> Self {
        Self {
            iterations: 5000,
            burn_in: 2500,
        }
    }
}

/// Paired post-burn-in draws of the changepoint and the coefficients.
#[derive(Debug, Clone)]
pub struct PosteriorSamples {
    kappa_draws: Vec<usize>,
    beta_draws: Vec<DVector<f64>>,
}

impl PosteriorSamples {
    /// Assemble from aligned draw sequences.
    pub fn new(kappa_draws: Vec<usize>, beta_draws: Vec<DVector<f64>>) -> Self {
        assert_eq!(kappa_draws.len(), beta_draws.len());
        Self {
            kappa_draws,
            beta_draws,
        }
    }

    /// Retained changepoint draws, each in `{1, ..., n-1}`.
    pub fn kappa_draws(&self) -> &[usize] {
        &self.kappa_draws
    }

    /// Retained coefficient draws, index-aligned with the kappa draws.
    pub fn beta_draws(&self) -> &[DVector<f64>] {
        &self.beta_draws
    }

    /// Number of retained draws.
    pub fn len(&self) -> usize {
        self.kappa_draws.len()
    }

    /// True when no draws were retained.
    pub fn is_empty(&self) -> bool {
        self.kappa_draws.is_empty()
    }

    /// Coefficient dimension.
    pub fn d(&self) -> usize {
        self.beta_draws.first().map_or(0, |b| b.len())
    }

    /// Posterior mean of the coefficients.
    pub fn beta_mean(&self) -> DVector<f64> {
        let mut mean = DVector::zeros(self.d());
        for b in &self.beta_draws {
            mean += b;
        }
        mean / self.beta_draws.len() as f64
    }

    /// Shift every kappa draw by `offset` (used to map segment-local draws
    /// onto global indices).
    pub fn offset_kappa(mut self, offset: usize) -> Self {
        for k in &mut self.kappa_draws {
            *k += offset;
        }
        self
    }
}

/// Normalized log conditional pmf of the changepoint given `beta`.
///
/// Entry `k` holds `log pi(kappa = k+1 | beta, X)`. Errors if `beta` has a
/// non-finite coordinate.
pub fn log_kappa_weights(
    x: &FeatureMatrix,
    beta: &DVector<f64>,
    prior: &KappaPrior,
) -> Result<Vec<f64>> {
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::InvalidCoefficients);
    }
    let n = x.n();
    if prior.len() != n - 1 {
        return Err(Error::InvalidInput(format!(
            "kappa prior has support {} but n - 1 = {}",
            prior.len(),
            n - 1
        )));
    }
    let s = x.linear(beta);
    let mut weights = vec![0.0; n - 1];
    // suffix(kappa) = sum_{i > kappa} s_i, built right to left.
    let mut suffix = 0.0;
    for kappa in (1..n).rev() {
        suffix += s[kappa]; // s is 0-based; row kappa is observation kappa+1.
        weights[kappa - 1] = suffix + prior.log_weight(kappa);
    }
    let max = weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + weights.iter().map(|w| (w - max).exp()).sum::<f64>().ln();
    weights.iter_mut().for_each(|w| *w -= lse);
    Ok(weights)
}

/// Categorical draw of `kappa` from (possibly unnormalized) log weights.
/// Returns a value in `{1, ..., len}`. Weights may contain `-inf`.
pub fn sample_kappa<R: Rng + ?Sized>(log_weights: &[f64], rng: &mut R) -> usize {
    let max = log_weights
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(max.is_finite(), "all kappa weights vanished");
    let probs: Vec<f64> = log_weights.iter().map(|w| (w - max).exp()).collect();
    let total: f64 = probs.iter().sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (idx, p) in probs.iter().enumerate() {
        acc += p;
        if acc >= target {
            return idx + 1;
        }
    }
    probs.len() // guards against accumulated rounding on the last atom
}

/// One Polya-gamma draw `omega_i ~ PG(1, x_i' beta)` per row.
pub fn sample_omegas<R: Rng + ?Sized>(
    x: &FeatureMatrix,
    beta: &DVector<f64>,
    rng: &mut R,
) -> Vec<f64> {
    let s = x.linear(beta);
    s.iter().map(|si| sample_pg(*si, rng)).collect()
}

/// Draw `beta | kappa, omega ~ N(m, V)` through a Cholesky factorization of
/// the precision `X' Omega X + Sigma^-1`.
pub fn sample_beta<R: Rng + ?Sized>(
    x: &FeatureMatrix,
    kappa: usize,
    omegas: &[f64],
    prior: &GaussianPrior,
    rng: &mut R,
) -> Result<DVector<f64>> {
    let (n, d) = (x.n(), x.d());
    if omegas.len() != n || kappa == 0 || kappa >= n || prior.d() != d {
        return Err(Error::InvalidInput(
            "sample_beta arguments disagree on dimensions".into(),
        ));
    }
    let values = x.values();

    // Precision = X' Omega X + Sigma^-1, accumulated on the lower triangle.
    let mut precision = prior.precision().clone();
    for (i, w) in omegas.iter().enumerate() {
        let row = values.row(i);
        for a in 0..d {
            let wa = w * row[a];
            for b in 0..=a {
                precision[(a, b)] += wa * row[b];
            }
        }
    }
    if precision.iter().any(|v| !v.is_finite()) {
        return Err(Error::IllConditionedPrecision);
    }
    for a in 0..d {
        for b in 0..a {
            precision[(b, a)] = precision[(a, b)];
        }
    }

    // rhs = X' delta + Sigma^-1 mu with delta = (-1/2, ..., +1/2, ...).
    let mut rhs = prior.precision_mu().clone();
    for i in 0..n {
        let coeff = if i < kappa { -0.5 } else { 0.5 };
        rhs.axpy(coeff, &values.row(i).transpose(), 1.0);
    }

    let chol = Cholesky::new(precision).ok_or(Error::IllConditionedPrecision)?;
    let mean = chol.solve(&rhs);
    let z = DVector::from_fn(d, |_, _| rng.sample(StandardNormal));
    // Solve L' u = z so that u ~ N(0, V).
    let u = chol
        .l()
        .tr_solve_lower_triangular(&z)
        .ok_or(Error::IllConditionedPrecision)?;
    Ok(mean + u)
}

/// Execute the full Gibbs chain: per sweep, `kappa | beta`, then
/// `omega | beta`, then `beta | kappa, omega`.
///
/// The input must be column-standardized (see [`crate::standardize_columns`]);
/// uncentered data concentrates the changepoint posterior at the endpoints
/// regardless of any signal. The chain starts from `beta` at the prior mean
/// and `kappa` drawn from its prior, and retains the state after each
/// post-burn-in sweep.
pub fn run_gibbs<R: Rng + ?Sized>(
    x: &FeatureMatrix,
    prior_beta: &GaussianPrior,
    prior_kappa: &KappaPrior,
    config: &GibbsConfig,
    rng: &mut R,
) -> Result<PosteriorSamples> {
    if !x.is_standardized() {
        return Err(Error::NotStandardized);
    }
    let n = x.n();
    if n < 3 {
        return Err(Error::InvalidInput(
            "the changepoint model needs at least 3 observations".into(),
        ));
    }
    if prior_beta.d() != x.d() {
        return Err(Error::InvalidInput(format!(
            "prior dimension {} does not match d = {}",
            prior_beta.d(),
            x.d()
        )));
    }
    config.validate()?;

    let mut beta = prior_beta.mu().clone();
    // The initial kappa is part of the published draw sequence but the sweep
    // order (kappa first) means no later step conditions on it.
    let _kappa0 = sample_kappa(prior_kappa.log_weights(), rng);

    let retained = config.retained();
    let mut kappa_draws = Vec::with_capacity(retained);
    let mut beta_draws = Vec::with_capacity(retained);
    for sweep in 0..config.iterations {
        let weights = log_kappa_weights(x, &beta, prior_kappa)?;
        let kappa = sample_kappa(&weights, rng);
        let omegas = sample_omegas(x, &beta, rng);
        beta = sample_beta(x, kappa, &omegas, prior_beta, rng)?;
        if sweep >= config.burn_in {
            kappa_draws.push(kappa);
            beta_draws.push(beta.clone());
        }
    }
    Ok(PosteriorSamples::new(kappa_draws, beta_draws))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::standardize_columns;
    use crate::posterior::ChangepointPosterior;
    use crate::rng::RngStream;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn raw(values: DMatrix<f64>) -> FeatureMatrix {
        FeatureMatrix::new(values).unwrap()
    }

    /// Eq.-style direct evaluation of the kappa conditional: literal product
    /// of the per-observation logistic factors, normalized. Test oracle.
    fn direct_kappa_pmf(x: &FeatureMatrix, beta: &DVector<f64>, prior: &KappaPrior) -> Vec<f64> {
        let n = x.n();
        let mut weights = Vec::with_capacity(n - 1);
        for kappa in 1..n {
            let mut w = prior.log_weight(kappa).exp();
            for i in 0..n {
                let s = x.row(i).dot(beta);
                // 1 - F(s) = 1/(1+e^s) and F(s) = 1/(1+e^-s), both forms
                // free of cancellation.
                w *= if i < kappa {
                    1.0 / (1.0 + s.exp())
                } else {
                    1.0 / (1.0 + (-s).exp())
                };
            }
            weights.push(w);
        }
        let total: f64 = weights.iter().sum();
        weights.into_iter().map(|w| w / total).collect()
    }

    #[test]
    fn zero_signal_gives_uniform_conditional() {
        let x = raw(DMatrix::zeros(6, 2));
        let beta = DVector::from_vec(vec![0.7, -0.3]);
        let prior = KappaPrior::uniform(6).unwrap();
        let weights = log_kappa_weights(&x, &beta, &prior).unwrap();
        for w in &weights {
            assert_abs_diff_eq!(w.exp(), 0.2, epsilon = 1e-12);
        }
    }

    #[test]
    fn three_point_hand_example() {
        // x' beta = (-1, -1, 1): pi(1) = 1/(1+e), pi(2) = e/(1+e).
        let x = raw(DMatrix::from_column_slice(3, 1, &[-1.0, -1.0, 1.0]));
        let beta = DVector::from_vec(vec![1.0]);
        let prior = KappaPrior::uniform(3).unwrap();
        let weights = log_kappa_weights(&x, &beta, &prior).unwrap();
        let e = std::f64::consts::E;
        assert_abs_diff_eq!(weights[0].exp(), 1.0 / (1.0 + e), epsilon = 1e-12);
        assert_abs_diff_eq!(weights[1].exp(), e / (1.0 + e), epsilon = 1e-12);
        assert_abs_diff_eq!(weights[1].exp(), 0.7311, epsilon = 1e-4);
    }

    #[test]
    fn telescoped_weights_match_direct_product() {
        // Exhaustive literal evaluation of the full conditional on every
        // small shape, including non-uniform priors.
        let mut rng = RngStream::new(70, 0);
        use rand_distr::StandardNormal;
        for n in 3..=5usize {
            for d in 1..=2usize {
                for trial in 0..50 {
                    let x = raw(DMatrix::from_fn(n, d, |_, _| {
                        rng.sample::<f64, _>(StandardNormal) * 3.0
                    }));
                    let beta =
                        DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal) * 2.0);
                    let prior = if trial % 2 == 0 {
                        KappaPrior::uniform(n).unwrap()
                    } else {
                        KappaPrior::binomial(n, 0.6).unwrap()
                    };
                    let direct = direct_kappa_pmf(&x, &beta, &prior);
                    let ours = log_kappa_weights(&x, &beta, &prior).unwrap();
                    for (got, want) in ours.iter().zip(&direct) {
                        assert_abs_diff_eq!(got.exp(), want, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn weights_reject_non_finite_beta() {
        let x = raw(DMatrix::zeros(4, 1));
        let prior = KappaPrior::uniform(4).unwrap();
        let beta = DVector::from_vec(vec![f64::NAN]);
        assert!(matches!(
            log_kappa_weights(&x, &beta, &prior),
            Err(Error::InvalidCoefficients)
        ));
    }

    #[test]
    fn recentered_columns_leave_pmf_unchanged() {
        let mut rng = RngStream::new(71, 0);
        use rand_distr::StandardNormal;
        let x = raw(DMatrix::from_fn(8, 2, |_, _| rng.sample(StandardNormal)));
        let (x, _, _) = standardize_columns(&x);
        let beta = DVector::from_vec(vec![1.3, -0.4]);
        let prior = KappaPrior::uniform(8).unwrap();
        let base = log_kappa_weights(&x, &beta, &prior).unwrap();

        // Shift each column by a constant, then re-center.
        let mut shifted = x.values().clone();
        for (j, c) in [5.0, -2.5].iter().enumerate() {
            shifted.column_mut(j).iter_mut().for_each(|v| *v += c);
        }
        let reraw = raw(shifted);
        let mut recentered = reraw.values().clone();
        for j in 0..2 {
            let mean = recentered.column(j).sum() / 8.0;
            recentered.column_mut(j).iter_mut().for_each(|v| *v -= mean);
        }
        let back = raw(recentered);
        let again = log_kappa_weights(&back, &beta, &prior).unwrap();
        for (a, b) in base.iter().zip(&again) {
            assert_abs_diff_eq!(a.exp(), b.exp(), epsilon = 1e-12);
        }
    }

    #[test]
    fn categorical_sampler_frequencies() {
        let mut rng = RngStream::new(72, 0);
        // Point mass: one finite weight.
        let weights = [f64::NEG_INFINITY, 0.0, f64::NEG_INFINITY];
        for _ in 0..200 {
            assert_eq!(sample_kappa(&weights, &mut rng), 2);
        }

        // Uniform weights: chi-square goodness of fit over 1e5 draws.
        let uniform = [0.0; 8];
        let draws = 100_000usize;
        let mut counts = [0usize; 8];
        for _ in 0..draws {
            counts[sample_kappa(&uniform, &mut rng) - 1] += 1;
        }
        let expected = draws as f64 / 8.0;
        let chi2: f64 = counts
            .iter()
            .map(|c| (*c as f64 - expected).powi(2) / expected)
            .sum();
        // 7 degrees of freedom, alpha = 0.001 critical value.
        assert!(chi2 < 24.32, "chi-square {chi2}");

        // Hand example: P(kappa = 2) = e/(1+e).
        let x = raw(DMatrix::from_column_slice(3, 1, &[-1.0, -1.0, 1.0]));
        let beta = DVector::from_vec(vec![1.0]);
        let prior = KappaPrior::uniform(3).unwrap();
        let lw = log_kappa_weights(&x, &beta, &prior).unwrap();
        let mut hits = 0usize;
        for _ in 0..draws {
            hits += usize::from(sample_kappa(&lw, &mut rng) == 2);
        }
        let p = std::f64::consts::E / (1.0 + std::f64::consts::E);
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        let freq = hits as f64 / draws as f64;
        assert!((freq - p).abs() < 3.0 * se, "freq {freq} target {p}");
    }

    #[test]
    fn omega_draws_match_pg_moments() {
        let mut rng = RngStream::new(73, 0);
        let x = raw(DMatrix::zeros(50, 3));
        let beta = DVector::from_vec(vec![1.0, 1.0, 1.0]);
        let mut sum = 0.0;
        let reps = 2000;
        for _ in 0..reps {
            let omegas = sample_omegas(&x, &beta, &mut rng);
            assert_eq!(omegas.len(), 50);
            assert!(omegas.iter().all(|w| *w > 0.0));
            sum += omegas.iter().sum::<f64>() / 50.0;
        }
        assert_abs_diff_eq!(sum / reps as f64, 0.25, epsilon = 0.002);

        // Single row with x' beta = 2: mean tanh(1)/4.
        let x = raw(DMatrix::from_row_slice(2, 1, &[2.0, 0.0]));
        let beta = DVector::from_vec(vec![1.0]);
        let mut sum = 0.0;
        let draws = 200_000;
        for _ in 0..draws {
            sum += sample_omegas(&x, &beta, &mut rng)[0];
        }
        assert_abs_diff_eq!(sum / draws as f64, 1f64.tanh() / 4.0, epsilon = 0.001);
    }

    #[test]
    fn beta_conditional_no_information_reduces_to_prior() {
        let mut rng = RngStream::new(74, 0);
        let x = raw(DMatrix::zeros(5, 1));
        let prior = GaussianPrior::new(
            DVector::from_vec(vec![1.5]),
            DMatrix::from_element(1, 1, 2.0),
        )
        .unwrap();
        let omegas = vec![0.8; 5];
        let draws = 100_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..draws {
            let b = sample_beta(&x, 2, &omegas, &prior, &mut rng).unwrap()[0];
            sum += b;
            sumsq += b * b;
        }
        let mean = sum / draws as f64;
        let var = sumsq / draws as f64 - mean * mean;
        assert_abs_diff_eq!(mean, 1.5, epsilon = 0.02);
        assert_abs_diff_eq!(var, 2.0, epsilon = 0.05);
    }

    #[test]
    fn beta_conditional_hand_case() {
        // n = 2, x = (1, 1)', omega = (1, 1), kappa = 1, mu = 0, Sigma = 1:
        // V = 1/3, m = 0.
        let mut rng = RngStream::new(75, 0);
        let x = raw(DMatrix::from_column_slice(2, 1, &[1.0, 1.0]));
        let prior = GaussianPrior::isotropic(1, 1.0).unwrap();
        let omegas = vec![1.0; 2];
        let draws = 200_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..draws {
            let b = sample_beta(&x, 1, &omegas, &prior, &mut rng).unwrap()[0];
            sum += b;
            sumsq += b * b;
        }
        let mean = sum / draws as f64;
        let var = sumsq / draws as f64 - mean * mean;
        assert_abs_diff_eq!(mean, 0.0, epsilon = 0.01);
        assert_abs_diff_eq!(var, 1.0 / 3.0, epsilon = 0.01);
    }

    #[test]
    fn beta_conditional_covariance_matches_closed_form() {
        // Sample covariance at fixed (kappa, omega) against the closed-form
        // V = (X' Omega X + Sigma^-1)^-1, inverted by a general LU route.
        let mut rng = RngStream::new(76, 0);
        use rand_distr::StandardNormal;
        let (n, d) = (12usize, 3usize);
        let x = raw(DMatrix::from_fn(n, d, |_, _| rng.sample(StandardNormal)));
        let omegas: Vec<f64> = (0..n).map(|_| sample_pg(0.7, &mut rng)).collect();
        let prior = GaussianPrior::new(
            DVector::from_vec(vec![0.3, -0.2, 0.1]),
            DMatrix::from_row_slice(
                3,
                3,
                &[1.0, 0.2, 0.0, 0.2, 2.0, -0.3, 0.0, -0.3, 0.5],
            ),
        )
        .unwrap();

        let mut precision = prior.precision().clone();
        for (i, w) in omegas.iter().enumerate() {
            let row = x.values().row(i);
            for a in 0..d {
                for b in 0..d {
                    precision[(a, b)] += w * row[a] * row[b];
                }
            }
        }
        let v = precision.clone().try_inverse().unwrap();

        let draws = 100_000;
        let mut mean = DVector::<f64>::zeros(d);
        let mut cov = DMatrix::<f64>::zeros(d, d);
        let mut all = Vec::with_capacity(draws);
        for _ in 0..draws {
            let b = sample_beta(&x, 5, &omegas, &prior, &mut rng).unwrap();
            mean += &b;
            all.push(b);
        }
        mean /= draws as f64;
        for b in &all {
            let c = b - &mean;
            cov += &c * c.transpose();
        }
        cov /= (draws - 1) as f64;
        for a in 0..d {
            for b in 0..d {
                // MC standard error of a covariance entry is of order
                // sqrt((V_aa V_bb + V_ab^2) / draws).
                let se = ((v[(a, a)] * v[(b, b)] + v[(a, b)] * v[(a, b)]) / draws as f64).sqrt();
                assert!(
                    (cov[(a, b)] - v[(a, b)]).abs() < 3.5 * se,
                    "cov[{a},{b}] = {} vs {} (se {se})",
                    cov[(a, b)],
                    v[(a, b)]
                );
            }
        }
    }

    #[test]
    fn beta_conditional_rejects_degenerate_precision() {
        let mut rng = RngStream::new(77, 0);
        let x = raw(DMatrix::from_column_slice(2, 1, &[1.0, 1.0]));
        let prior = GaussianPrior::isotropic(1, 1.0).unwrap();
        let omegas = vec![f64::INFINITY, 1.0];
        assert!(matches!(
            sample_beta(&x, 1, &omegas, &prior, &mut rng),
            Err(Error::IllConditionedPrecision)
        ));
    }

    #[test]
    fn chain_refuses_unstandardized_input() {
        let mut rng = RngStream::new(78, 0);
        let x = raw(DMatrix::from_column_slice(4, 1, &[5.0, 6.0, 7.0, 8.0]));
        let prior = GaussianPrior::isotropic(1, 1.0).unwrap();
        let kappa_prior = KappaPrior::uniform(4).unwrap();
        let err = run_gibbs(&x, &prior, &kappa_prior, &GibbsConfig::default(), &mut rng);
        assert!(matches!(err, Err(Error::NotStandardized)));
        assert_eq!(
            err.unwrap_err().to_string(),
            "data must be centered and scaled"
        );
    }

    #[test]
    fn chain_is_deterministic_per_stream() {
        let mut rng_a = RngStream::new(79, 3);
        let mut rng_b = RngStream::new(79, 3);
        let mut rng_data = RngStream::new(79, 100);
        use rand_distr::StandardNormal;
        let x = raw(DMatrix::from_fn(20, 2, |i, _| {
            rng_data.sample::<f64, _>(StandardNormal) + if i >= 10 { 2.0 } else { 0.0 }
        }));
        let (x, _, _) = standardize_columns(&x);
        let prior = GaussianPrior::isotropic(2, 1.0).unwrap();
        let kappa_prior = KappaPrior::uniform(20).unwrap();
        let config = GibbsConfig::new(200, 100).unwrap();
        let a = run_gibbs(&x, &prior, &kappa_prior, &config, &mut rng_a).unwrap();
        let b = run_gibbs(&x, &prior, &kappa_prior, &config, &mut rng_b).unwrap();
        assert_eq!(a.kappa_draws(), b.kappa_draws());
        for (ba, bb) in a.beta_draws().iter().zip(b.beta_draws()) {
            assert_eq!(ba.as_slice(), bb.as_slice());
        }
        assert_eq!(a.len(), 100);
    }

    #[test]
    fn separated_signal_recovers_mode() {
        let mut rng_data = RngStream::new(80, 0);
        use rand_distr::StandardNormal;
        let kappa_star = 7usize;
        let x = raw(DMatrix::from_fn(18, 1, |i, _| {
            let noise: f64 = rng_data.sample::<f64, _>(StandardNormal);
            0.1 * noise + if i < kappa_star { -3.0 } else { 3.0 }
        }));
        let (x, _, _) = standardize_columns(&x);
        let prior = GaussianPrior::isotropic(1, 3.0).unwrap();
        let kappa_prior = KappaPrior::uniform(18).unwrap();
        let mut rng = RngStream::new(80, 1);
        let samples = run_gibbs(
            &x,
            &prior,
            &kappa_prior,
            &GibbsConfig::new(2000, 1000).unwrap(),
            &mut rng,
        )
        .unwrap();
        let post =
            ChangepointPosterior::from_draws(samples.kappa_draws(), 1, 17).unwrap();
        assert_eq!(post.mode(), kappa_star);
        assert!(post.prob(kappa_star) > 0.5, "mass {}", post.prob(kappa_star));
    }

    #[test]
    fn zero_signal_posterior_near_uniform() {
        // A constant (hence centered-to-zero) series carries no changepoint
        // information: the marginal posterior is uniform up to MC noise.
        let x = {
            let raw_x = raw(DMatrix::from_element(10, 1, 4.2));
            standardize_columns(&raw_x).0
        };
        let prior = GaussianPrior::isotropic(1, 1.0).unwrap();
        let kappa_prior = KappaPrior::uniform(10).unwrap();
        let mut rng = RngStream::new(81, 0);
        let samples = run_gibbs(
            &x,
            &prior,
            &kappa_prior,
            &GibbsConfig::new(30_000, 2_000).unwrap(),
            &mut rng,
        )
        .unwrap();
        let post = ChangepointPosterior::from_draws(samples.kappa_draws(), 1, 9).unwrap();
        let uniform = ChangepointPosterior::from_pmf(1, vec![1.0 / 9.0; 9]).unwrap();
        assert!(post.tv_distance(&uniform) < 0.05);
    }

    #[test]
    fn gibbs_marginal_matches_quadrature_oracle() {
        use crate::posterior::quadrature_marginal;
        let x = {
            let raw_x = raw(DMatrix::from_column_slice(4, 1, &[-1.5, -0.5, 0.5, 1.5]));
            standardize_columns(&raw_x).0
        };
        let prior = GaussianPrior::isotropic(1, 1.0).unwrap();
        let kappa_prior = KappaPrior::uniform(4).unwrap();
        let mut rng = RngStream::new(82, 0);
        let samples = run_gibbs(
            &x,
            &prior,
            &kappa_prior,
            &GibbsConfig::new(110_000, 10_000).unwrap(),
            &mut rng,
        )
        .unwrap();
        let gibbs = ChangepointPosterior::from_draws(samples.kappa_draws(), 1, 3).unwrap();
        let quad = quadrature_marginal(&x, &prior, 4001).unwrap();
        assert!(
            gibbs.tv_distance(&quad) < 0.02,
            "TV {} between Gibbs {:?} and quadrature {:?}",
            gibbs.tv_distance(&quad),
            gibbs.pmf(),
            quad.pmf()
        );
    }
}
