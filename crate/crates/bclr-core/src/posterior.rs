//! Posterior summaries: point estimates, credible sets, entropy, coefficient
//! signal-to-noise, and executable forms of the separation guarantees.
//!
//! Two independent estimators of the marginal `pi(kappa | X)` live here as
//! test oracles for the Gibbs sampler: a grid quadrature over `beta` (d = 1)
//! and a Monte Carlo average over Polya-gamma draws using the latent-variable
//! representation
//!
//! ```text
//! pi(kappa | X) prop. E_omega[ det(V)^(1/2) exp(xbar_kappa' V xbar_kappa / 2) ],
//! xbar_kappa = sum_i (-1)^{1(i <= kappa)} x_i / 2,
//! ```
//!
//! valid for a zero-mean Gaussian prior and uniform changepoint prior.

use crate::data::FeatureMatrix;
use crate::error::Error;
use crate::gibbs::PosteriorSamples;
use crate::pg::sample_pg;
use crate::prior::GaussianPrior;
use crate::Result;
use nalgebra::{Cholesky, DVector};
use rand::Rng;
use serde::Serialize;

/// Probability mass function over candidate changepoints.
///
/// The support is the contiguous integer range `first ..= first + len - 1`
/// (global indices, so segment posteriors carry their offset).
#[derive(Debug, Clone)]
pub struct ChangepointPosterior {
    first: usize,
    pmf: Vec<f64>,
}

impl ChangepointPosterior {
    /// Estimate by relative frequency from draws. Every draw must fall in
    /// `first ..= first + support_len - 1`.
    pub fn from_draws(draws: &[usize], first: usize, support_len: usize) -> Result<Self> {
        if draws.is_empty() || support_len == 0 {
            return Err(Error::InvalidInput("empty draws or support".into()));
        }
        let mut pmf = vec![0.0; support_len];
        for &k in draws {
            if k < first || k >= first + support_len {
                return Err(Error::InvalidInput(format!(
                    "draw {k} outside support {first}..={}",
                    first + support_len - 1
                )));
            }
            pmf[k - first] += 1.0;
        }
        let total = draws.len() as f64;
        pmf.iter_mut().for_each(|p| *p /= total);
        Ok(Self { first, pmf })
    }

    /// Wrap an explicit pmf (validates nonnegativity and total mass 1).
    pub fn from_pmf(first: usize, pmf: Vec<f64>) -> Result<Self> {
        if pmf.is_empty() || pmf.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidInput("pmf entries must be >= 0".into()));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("pmf sums to {total}, not 1")));
        }
        Ok(Self { first, pmf })
    }

    /// Smallest support point.
    pub fn first(&self) -> usize {
        self.first
    }

    /// Largest support point.
    pub fn last(&self) -> usize {
        self.first + self.pmf.len() - 1
    }

    /// Support size.
    pub fn support_len(&self) -> usize {
        self.pmf.len()
    }

    /// The mass vector, index 0 holding `first`.
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Mass at changepoint `kappa` (0 outside the support).
    pub fn prob(&self, kappa: usize) -> f64 {
        if kappa < self.first || kappa > self.last() {
            0.0
        } else {
            self.pmf[kappa - self.first]
        }
    }

    /// Smallest maximizer of the pmf.
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (i, p) in self.pmf.iter().enumerate() {
            if *p > self.pmf[best] {
                best = i;
            }
        }
        self.first + best
    }

    /// Expectation of the changepoint under the pmf.
    pub fn mean(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(i, p)| (self.first + i) as f64 * p)
            .sum()
    }

    /// Total variation distance to another posterior on the same support.
    pub fn tv_distance(&self, other: &ChangepointPosterior) -> f64 {
        assert_eq!(self.first, other.first);
        assert_eq!(self.pmf.len(), other.pmf.len());
        0.5 * self
            .pmf
            .iter()
            .zip(&other.pmf)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

/// Flavor of credible set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CredibleKind {
    /// Contiguous interval between posterior quantiles.
    QuantileInterval,
    /// Smallest set of highest-probability points.
    HighestMass,
}

/// A credible set with its realized posterior mass.
#[derive(Debug, Clone, Serialize)]
pub struct CredibleSet {
    /// How the set was formed.
    pub kind: CredibleKind,
    /// Member changepoints, ascending.
    pub members: Vec<usize>,
    /// Posterior mass of the members.
    pub mass: f64,
}

impl CredibleSet {
    /// Whether `kappa` belongs to the set.
    pub fn contains(&self, kappa: usize) -> bool {
        self.members.binary_search(&kappa).is_ok()
    }
}

/// Posterior mode (smallest maximizer, matching the tie-break used for
/// reported estimates) and arithmetic mean of the draws.
pub fn point_estimates(samples: &PosteriorSamples) -> (usize, f64) {
    assert!(!samples.is_empty(), "no draws");
    let draws = samples.kappa_draws();
    let lo = *draws.iter().min().unwrap();
    let hi = *draws.iter().max().unwrap();
    let mut counts = vec![0usize; hi - lo + 1];
    for &k in draws {
        counts[k - lo] += 1;
    }
    let mut mode = lo;
    for (i, c) in counts.iter().enumerate() {
        if *c > counts[mode - lo] {
            mode = lo + i;
        }
    }
    let mean = draws.iter().sum::<usize>() as f64 / draws.len() as f64;
    (mode, mean)
}

/// Posterior quantile `q_alpha = inf{kappa : P(K <= kappa) >= alpha}`.
fn quantile(post: &ChangepointPosterior, alpha: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in post.pmf().iter().enumerate() {
        acc += p;
        if acc >= alpha - 1e-12 {
            return post.first() + i;
        }
    }
    post.last()
}

/// Central posterior quantile interval `[q_{alpha/2}, q_{1-alpha/2}]`.
pub fn quantile_interval(post: &ChangepointPosterior, alpha: f64) -> CredibleSet {
    assert!(alpha > 0.0 && alpha < 1.0);
    let lo = quantile(post, alpha / 2.0);
    let hi = quantile(post, 1.0 - alpha / 2.0);
    let members: Vec<usize> = (lo..=hi).collect();
    let mass = members.iter().map(|k| post.prob(*k)).sum();
    CredibleSet {
        kind: CredibleKind::QuantileInterval,
        members,
        mass,
    }
}

/// Smallest set of highest-probability points holding mass at least
/// `1 - alpha`; cardinality ties are resolved toward the smaller index sum
/// by preferring lower indices among equal masses.
pub fn highest_mass_set(post: &ChangepointPosterior, alpha: f64) -> CredibleSet {
    assert!(alpha > 0.0 && alpha < 1.0);
    let mut order: Vec<usize> = (0..post.support_len()).collect();
    order.sort_by(|a, b| {
        post.pmf()[*b]
            .total_cmp(&post.pmf()[*a])
            .then(a.cmp(b))
    });
    let mut members = Vec::new();
    let mut mass = 0.0;
    for idx in order {
        members.push(post.first() + idx);
        mass += post.pmf()[idx];
        if mass >= 1.0 - alpha - 1e-12 {
            break;
        }
    }
    members.sort_unstable();
    CredibleSet {
        kind: CredibleKind::HighestMass,
        members,
        mass,
    }
}

/// Shannon entropy of the pmf divided by `log` of its support size: 1 for
/// the uniform distribution, 0 for a point mass. A singleton support is
/// maximally concentrated, hence 0. `0 log 0` counts as 0.
pub fn normalized_entropy(post: &ChangepointPosterior) -> f64 {
    let m = post.support_len();
    if m < 2 {
        return 0.0;
    }
    let h: f64 = post
        .pmf()
        .iter()
        .filter(|p| **p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    h / (m as f64).ln()
}

/// One coefficient's posterior signal-to-noise summary.
#[derive(Debug, Clone, Serialize)]
pub struct SnrEntry {
    /// Coordinate index in the feature vector.
    pub coord: usize,
    /// Posterior mean of the coefficient.
    pub mean: f64,
    /// Posterior standard deviation (sample, denominator m - 1).
    pub sd: f64,
    /// `mean^2 / sd^2`; infinity when the draws are degenerate.
    pub snr: f64,
    /// Set when the standard deviation was exactly zero.
    pub degenerate: bool,
}

/// Per-coordinate SNR ranking, descending.
#[derive(Debug, Clone, Serialize)]
pub struct SnrReport {
    /// Entries sorted by decreasing SNR.
    pub entries: Vec<SnrEntry>,
}

impl SnrReport {
    /// Entry for a given coordinate.
    pub fn by_coord(&self, coord: usize) -> &SnrEntry {
        self.entries.iter().find(|e| e.coord == coord).unwrap()
    }
}

/// Rank coefficients by squared posterior mean over posterior variance.
/// Requires at least two draws.
pub fn snr_report(samples: &PosteriorSamples) -> Result<SnrReport> {
    let m = samples.len();
    if m < 2 {
        return Err(Error::InvalidInput("SNR needs at least two draws".into()));
    }
    let d = samples.d();
    let mut entries = Vec::with_capacity(d);
    for j in 0..d {
        let mean = samples.beta_draws().iter().map(|b| b[j]).sum::<f64>() / m as f64;
        let ss = samples
            .beta_draws()
            .iter()
            .map(|b| (b[j] - mean) * (b[j] - mean))
            .sum::<f64>();
        let sd = (ss / (m - 1) as f64).sqrt();
        let degenerate = sd == 0.0;
        let snr = if degenerate {
            f64::INFINITY
        } else {
            mean * mean / (sd * sd)
        };
        entries.push(SnrEntry {
            coord: j,
            mean,
            sd,
            snr,
            degenerate,
        });
    }
    entries.sort_by(|a, b| b.snr.total_cmp(&a.snr).then(a.coord.cmp(&b.coord)));
    Ok(SnrReport { entries })
}

/// Largest margin `gamma > 0` with `x_i' beta < -gamma` before `kappa_star`
/// and `x_i' beta > gamma` after it, or `None` when the sign pattern fails.
///
/// When a margin exists, the conditional pmf is unimodal with mode
/// `kappa_star` and `pi(kappa_star | beta, X) > prop2_bound(gamma)`.
pub fn check_margin(
    x: &FeatureMatrix,
    beta: &DVector<f64>,
    kappa_star: usize,
) -> Option<f64> {
    if kappa_star == 0 || kappa_star >= x.n() {
        return None;
    }
    let s = x.linear(beta);
    let mut gamma = f64::INFINITY;
    for (i, si) in s.iter().enumerate() {
        let margin = if i < kappa_star { -si } else { *si };
        if margin <= 0.0 {
            return None;
        }
        gamma = gamma.min(margin);
    }
    Some(gamma)
}

/// Lower bound `(1 - e^-gamma) / (1 + e^-gamma)` on the conditional mass at
/// the separated changepoint.
pub fn prop2_bound(gamma: f64) -> f64 {
    (1.0 - (-gamma).exp()) / (1.0 + (-gamma).exp())
}

/// Monte Carlo estimate of the marginal `pi(kappa | X)` via the
/// latent-variable representation: average `det(V)^(1/2)
/// exp(xbar' V xbar / 2)` over `omega_i ~ PG(1, 0)` draws.
///
/// A small-problem test oracle: requires a zero-mean prior (errors
/// otherwise), a uniform changepoint prior, and `n <= 8`.
pub fn marginal_mc_oracle<R: Rng + ?Sized>(
    x: &FeatureMatrix,
    prior: &GaussianPrior,
    mc_draws: usize,
    rng: &mut R,
) -> Result<ChangepointPosterior> {
    if !prior.has_zero_mean() {
        return Err(Error::OracleRequiresZeroMean);
    }
    let n = x.n();
    if n > 8 {
        return Err(Error::InvalidInput(
            "the Monte Carlo oracle is restricted to n <= 8".into(),
        ));
    }
    if prior.d() != x.d() {
        return Err(Error::InvalidInput("prior dimension mismatch".into()));
    }
    let values = x.values();
    let d = x.d();

    // xbar_kappa = X' delta_kappa, one per candidate changepoint.
    let xbars: Vec<DVector<f64>> = (1..n)
        .map(|kappa| {
            let mut v = DVector::zeros(d);
            for i in 0..n {
                let c = if i < kappa { -0.5 } else { 0.5 };
                v.axpy(c, &values.row(i).transpose(), 1.0);
            }
            v
        })
        .collect();

    let mut weights = vec![0.0; n - 1];
    for _ in 0..mc_draws {
        let mut precision = prior.precision().clone();
        for i in 0..n {
            let w = sample_pg(0.0, rng);
            let row = values.row(i);
            for a in 0..d {
                for b in 0..=a {
                    precision[(a, b)] += w * row[a] * row[b];
                }
            }
        }
        for a in 0..d {
            for b in 0..a {
                precision[(b, a)] = precision[(a, b)];
            }
        }
        let chol = Cholesky::new(precision).ok_or(Error::IllConditionedPrecision)?;
        // det(V)^(1/2) = prod 1/L_ii for the precision factor L.
        let half_log_det_v: f64 = -(0..d).map(|i| chol.l_dirty()[(i, i)].ln()).sum::<f64>();
        for (k, xbar) in xbars.iter().enumerate() {
            let u = chol.solve(xbar);
            weights[k] += (half_log_det_v + 0.5 * xbar.dot(&u)).exp();
        }
    }
    let total: f64 = weights.iter().sum();
    ChangepointPosterior::from_pmf(1, weights.into_iter().map(|w| w / total).collect())
}

/// Grid quadrature of the marginal `pi(kappa | X)` for d = 1: integrate the
/// quasi-likelihood times the prior density over `beta` on a uniform grid
/// spanning `[-10, 10]`. Standardized features and unit-scale priors keep
/// the posterior mass well inside that window.
pub fn quadrature_marginal(
    x: &FeatureMatrix,
    prior: &GaussianPrior,
    grid_points: usize,
) -> Result<ChangepointPosterior> {
    if x.d() != 1 || prior.d() != 1 {
        return Err(Error::InvalidInput(
            "the quadrature oracle only supports d = 1".into(),
        ));
    }
    if grid_points < 2001 {
        return Err(Error::InvalidInput(
            "use at least 2001 grid points".into(),
        ));
    }
    let n = x.n();
    let mu = prior.mu()[0];
    let var = prior.sigma()[(0, 0)];
    let xs: Vec<f64> = x.values().column(0).iter().cloned().collect();

    let mut log_terms: Vec<Vec<f64>> = vec![Vec::with_capacity(grid_points); n - 1];
    for g in 0..grid_points {
        let beta = -10.0 + 20.0 * g as f64 / (grid_points - 1) as f64;
        let s: Vec<f64> = xs.iter().map(|xi| xi * beta).collect();
        // log prod 1/(1+e^{s_i}) over all i, the kappa-free factor.
        let log_denom: f64 = s.iter().map(|si| ln_1p_exp(*si)).sum();
        let log_prior = -0.5 * (beta - mu) * (beta - mu) / var;
        let mut suffix = 0.0;
        for kappa in (1..n).rev() {
            suffix += s[kappa];
            log_terms[kappa - 1].push(suffix - log_denom + log_prior);
        }
    }
    let weights: Vec<f64> = log_terms.iter().map(|t| log_sum_exp(t)).collect();
    let max = weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let probs: Vec<f64> = weights.iter().map(|w| (w - max).exp()).collect();
    let total: f64 = probs.iter().sum();
    ChangepointPosterior::from_pmf(1, probs.into_iter().map(|p| p / total).collect())
}

/// `ln(1 + e^t)` without overflow.
fn ln_1p_exp(t: f64) -> f64 {
    if t > 35.0 {
        t
    } else {
        t.exp().ln_1p()
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn posterior(first: usize, pmf: &[f64]) -> ChangepointPosterior {
        ChangepointPosterior::from_pmf(first, pmf.to_vec()).unwrap()
    }

    #[test]
    fn point_estimates_prefer_smallest_mode() {
        let samples = PosteriorSamples::new(
            vec![24, 26],
            vec![DVector::zeros(1), DVector::zeros(1)],
        );
        let (mode, mean) = point_estimates(&samples);
        assert_eq!(mode, 24);
        assert_abs_diff_eq!(mean, 25.0);

        let samples = PosteriorSamples::new(vec![24, 25, 25, 26], vec![DVector::zeros(1); 4]);
        let (mode, mean) = point_estimates(&samples);
        assert_eq!(mode, 25);
        assert_abs_diff_eq!(mean, 25.0);

        let samples = PosteriorSamples::new(vec![25; 7], vec![DVector::zeros(1); 7]);
        let (mode, mean) = point_estimates(&samples);
        assert_eq!(mode, 25);
        assert_abs_diff_eq!(mean, 25.0);
    }

    #[test]
    fn quantile_interval_point_mass() {
        let mut pmf = vec![0.0; 20];
        pmf[9] = 1.0; // support starts at 1, so this is kappa = 10
        let set = quantile_interval(&posterior(1, &pmf), 0.05);
        assert_eq!(set.members, vec![10]);
        assert_abs_diff_eq!(set.mass, 1.0);
    }

    #[test]
    fn quantile_interval_uniform_nine() {
        // Uniform on {1..9}: q_0.1 = 1, q_0.9 = 9 (cumsum hits 0.888 at 8).
        let pmf = vec![1.0 / 9.0; 9];
        let set = quantile_interval(&posterior(1, &pmf), 0.2);
        assert_eq!(*set.members.first().unwrap(), 1);
        assert_eq!(*set.members.last().unwrap(), 9);
    }

    #[test]
    fn quantile_interval_concentrated_triple() {
        // Mass 0.356/0.311/0.298 at 210, 211, 214; remainder spread wide.
        let mut pmf = vec![0.035 / 200.0; 250];
        pmf[209] = 0.356;
        pmf[210] = 0.311;
        pmf[213] = 0.298;
        let total: f64 = pmf.iter().sum();
        pmf.iter_mut().for_each(|p| *p /= total);
        let set = quantile_interval(&posterior(1, &pmf), 0.05);
        for k in [210usize, 211, 214] {
            assert!(set.contains(k), "interval should contain {k}");
        }
    }

    #[test]
    fn highest_mass_examples() {
        let set = highest_mass_set(&posterior(1, &[0.5, 0.3, 0.2]), 0.3);
        assert_eq!(set.members, vec![1, 2]);
        assert_abs_diff_eq!(set.mass, 0.8);

        // Tie between 1 and 2 resolved toward the smaller sum.
        let set = highest_mass_set(&posterior(1, &[0.4, 0.4, 0.2]), 0.65);
        assert_eq!(set.members, vec![1]);

        let mut pmf = vec![0.0; 15];
        pmf[9] = 1.0;
        for alpha in [0.5, 0.2, 0.05] {
            let set = highest_mass_set(&posterior(1, &pmf), alpha);
            assert_eq!(set.members, vec![10]);
        }
    }

    #[test]
    fn entropy_examples() {
        let uniform = posterior(1, &[1.0 / 7.0; 7]);
        assert_abs_diff_eq!(normalized_entropy(&uniform), 1.0, epsilon = 1e-12);

        let mut pm = vec![0.0; 5];
        pm[2] = 1.0;
        assert_abs_diff_eq!(normalized_entropy(&posterior(1, &pm)), 0.0);

        let half = posterior(1, &[0.5, 0.5, 0.0, 0.0]);
        assert_abs_diff_eq!(
            normalized_entropy(&half),
            2f64.ln() / 4f64.ln(),
            epsilon = 1e-12
        );

        let single = posterior(3, &[1.0]);
        assert_abs_diff_eq!(normalized_entropy(&single), 0.0);
    }

    #[test]
    fn snr_hand_example() {
        let betas = vec![
            DVector::from_vec(vec![1.0, 2.0]),
            DVector::from_vec(vec![3.0, 2.0]),
        ];
        let samples = PosteriorSamples::new(vec![1, 1], betas);
        let report = snr_report(&samples).unwrap();
        let coord0 = report.by_coord(0);
        assert_abs_diff_eq!(coord0.mean, 2.0);
        assert_abs_diff_eq!(coord0.sd, 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(coord0.snr, 2.0, epsilon = 1e-12);
        // Constant coordinate: flagged infinite and ranked first.
        let coord1 = report.by_coord(1);
        assert!(coord1.degenerate);
        assert!(coord1.snr.is_infinite());
        assert_eq!(report.entries[0].coord, 1);
    }

    #[test]
    fn snr_permutation_equivariance() {
        let betas: Vec<DVector<f64>> = (0..40)
            .map(|i| DVector::from_vec(vec![i as f64, (i * i) as f64 * 0.1, -(i as f64)]))
            .collect();
        let swapped: Vec<DVector<f64>> = betas
            .iter()
            .map(|b| DVector::from_vec(vec![b[2], b[0], b[1]]))
            .collect();
        let r1 = snr_report(&PosteriorSamples::new(vec![1; 40], betas)).unwrap();
        let r2 = snr_report(&PosteriorSamples::new(vec![1; 40], swapped)).unwrap();
        let mut s1: Vec<f64> = r1.entries.iter().map(|e| e.snr).collect();
        let mut s2: Vec<f64> = r2.entries.iter().map(|e| e.snr).collect();
        s1.sort_by(f64::total_cmp);
        s2.sort_by(f64::total_cmp);
        for (a, b) in s1.iter().zip(&s2) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn margin_detection() {
        let x = FeatureMatrix::new(DMatrix::from_column_slice(4, 1, &[-2.0, -2.0, 3.0, 3.0]))
            .unwrap();
        let beta = DVector::from_vec(vec![1.0]);
        assert_abs_diff_eq!(check_margin(&x, &beta, 2).unwrap(), 2.0);
        assert!(check_margin(&x, &beta, 1).is_none());
        assert!(check_margin(&x, &beta, 3).is_none());

        let x = FeatureMatrix::new(DMatrix::from_column_slice(3, 1, &[-1.0, 1.0, -1.0])).unwrap();
        for k in 1..3 {
            assert!(check_margin(&x, &beta, k).is_none());
        }
    }

    #[test]
    fn prop2_bound_at_ln_three() {
        assert_abs_diff_eq!(prop2_bound(3f64.ln()), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn mc_oracle_requires_zero_mean() {
        let x = FeatureMatrix::new(DMatrix::from_column_slice(3, 1, &[-1.0, 0.0, 1.0])).unwrap();
        let prior =
            GaussianPrior::new(DVector::from_vec(vec![1.0]), DMatrix::identity(1, 1)).unwrap();
        let mut rng = crate::rng::RngStream::new(1, 1);
        assert!(matches!(
            marginal_mc_oracle(&x, &prior, 10, &mut rng),
            Err(Error::OracleRequiresZeroMean)
        ));
    }
}
