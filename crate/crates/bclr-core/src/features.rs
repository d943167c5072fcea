//! Vectorizations of persistence diagrams.
//!
//! The main embedding `f_stat` summarizes the lifetime `l = d - b` and
//! midlife `m = (d + b)/2` distributions of both diagrams with 36 fixed
//! statistics; persistent entropy and the ALPS statistic act on lifetimes
//! only. Persistence images provide an alternative 36-dimensional grid
//! embedding.
//!
//! Conventions (all statistics must be total, since pre-change frames can
//! produce empty diagrams):
//! - empty diagram: every statistic is 0;
//! - moments are population moments; skewness `m3 / m2^(3/2)` and
//!   non-excess kurtosis `m4 / m2^2`, both 0 for zero-variance samples;
//! - percentiles interpolate the sorted sample linearly at rank
//!   `(n - 1) q`.

use crate::cubical::PersistenceDiagram;

/// Lifetimes and midlifes of one diagram.
#[derive(Debug, Clone)]
pub struct LifetimeSummary {
    lifetimes: Vec<f64>,
    midlifes: Vec<f64>,
}

impl LifetimeSummary {
    /// Extract `l_p` and `m_p` from a diagram.
    pub fn from_diagram(pd: &PersistenceDiagram) -> Self {
        let lifetimes = pd.points().iter().map(|(b, d)| d - b).collect();
        let midlifes = pd.points().iter().map(|(b, d)| 0.5 * (b + d)).collect();
        Self {
            lifetimes,
            midlifes,
        }
    }

    /// Lifetimes `d - b`, all positive.
    pub fn lifetimes(&self) -> &[f64] {
        &self.lifetimes
    }

    /// Midlifes `(b + d) / 2`.
    pub fn midlifes(&self) -> &[f64] {
        &self.midlifes
    }
}

/// A labeled feature vector.
#[derive(Debug, Clone)]
pub struct FeatureVector {
    /// Coordinate values.
    pub values: Vec<f64>,
    /// Per-coordinate names.
    pub labels: Vec<String>,
}

/// Shannon entropy of the normalized lifetimes: with `L = sum l_i`,
/// `-sum (l_i/L) ln(l_i/L)`. Empty input gives 0.
pub fn persistent_entropy(lifetimes: &[f64]) -> f64 {
    let total: f64 = lifetimes.iter().sum();
    if lifetimes.is_empty() || total <= 0.0 {
        return 0.0;
    }
    lifetimes
        .iter()
        .filter(|l| **l > 0.0)
        .map(|l| {
            let p = l / total;
            -p * p.ln()
        })
        .sum()
}

/// ALPS statistic: the integral over thresholds of `ln(1 + K(t))` where
/// `K(t)` counts lifetimes exceeding `t`. Piecewise constant, so evaluated
/// exactly as a finite sum over the sorted lifetimes. Empty input gives 0.
pub fn alps(lifetimes: &[f64]) -> f64 {
    let mut sorted: Vec<f64> = lifetimes.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    let mut acc = 0.0;
    let mut prev = 0.0;
    for (i, l) in sorted.iter().enumerate() {
        acc += (l - prev) * ((n - i + 1) as f64).ln();
        prev = *l;
    }
    acc
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn central_moment(xs: &[f64], mu: f64, k: u32) -> f64 {
    xs.iter().map(|x| (x - mu).powi(k as i32)).sum::<f64>() / xs.len() as f64
}

/// Linear-interpolation percentile of a sorted sample at rank `(n-1) q`.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// The eight four-slot statistics of one variable sample; zeros when empty.
fn sample_stats(xs: &[f64]) -> [f64; 8] {
    if xs.is_empty() {
        return [0.0; 8];
    }
    let mu = mean(xs);
    let m2 = central_moment(xs, mu, 2);
    let (skew, kurt) = if m2 > 0.0 {
        (
            central_moment(xs, mu, 3) / m2.powf(1.5),
            central_moment(xs, mu, 4) / (m2 * m2),
        )
    } else {
        (0.0, 0.0)
    };
    let mut sorted = xs.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let p25 = percentile(&sorted, 0.25);
    let p50 = percentile(&sorted, 0.50);
    let p75 = percentile(&sorted, 0.75);
    [mu, m2, skew, kurt, p25, p50, p75, p75 - p25]
}

/// Names of the 36 coordinates of [`f_stat`], in order.
pub fn f_stat_labels() -> Vec<String> {
    let families = [
        "mean", "variance", "skewness", "kurtosis", "p25", "p50", "p75", "iqr",
    ];
    let mut labels = Vec::with_capacity(36);
    for fam in families {
        for var in ["lifetime_pd0", "midlife_pd0", "lifetime_pd1", "midlife_pd1"] {
            labels.push(format!("{fam}_{var}"));
        }
    }
    for var in ["pd0", "pd1"] {
        labels.push(format!("entropy_lifetime_{var}"));
    }
    for var in ["pd0", "pd1"] {
        labels.push(format!("alps_lifetime_{var}"));
    }
    labels
}

/// The 36-statistic diagram embedding.
///
/// Layout: for each family (mean, variance, skewness, kurtosis, 25th, 50th,
/// 75th percentile, interquartile range) the four slots (lifetime PD0,
/// midlife PD0, lifetime PD1, midlife PD1); then persistent entropy of the
/// lifetimes (PD0, PD1); then the ALPS statistic (PD0, PD1).
pub fn f_stat(pd0: &PersistenceDiagram, pd1: &PersistenceDiagram) -> FeatureVector {
    let s0 = LifetimeSummary::from_diagram(pd0);
    let s1 = LifetimeSummary::from_diagram(pd1);
    let blocks = [
        sample_stats(s0.lifetimes()),
        sample_stats(s0.midlifes()),
        sample_stats(s1.lifetimes()),
        sample_stats(s1.midlifes()),
    ];
    let mut values = Vec::with_capacity(36);
    for stat in 0..8 {
        for block in &blocks {
            values.push(block[stat]);
        }
    }
    values.push(persistent_entropy(s0.lifetimes()));
    values.push(persistent_entropy(s1.lifetimes()));
    values.push(alps(s0.lifetimes()));
    values.push(alps(s1.lifetimes()));
    FeatureVector {
        values,
        labels: f_stat_labels(),
    }
}

/// Persistence image on a 6 x 6 grid spanning the birth/lifetime ranges of
/// the diagram (endpoints included; a degenerate range collapses to its
/// single value), with weight `arctan(c l^p)` and Gaussian bandwidth
/// `sigma`. Flattened column-major: the birth index varies fastest.
/// Empty diagrams map to the zero vector.
pub fn persistence_image(
    pd: &PersistenceDiagram,
    sigma: f64,
    weight_c: f64,
    weight_p: f64,
) -> FeatureVector {
    const GRID: usize = 6;
    let labels = (0..GRID)
        .flat_map(|j| (0..GRID).map(move |i| format!("pimg_b{i}_l{j}")))
        .collect();
    if pd.is_empty() {
        return FeatureVector {
            values: vec![0.0; GRID * GRID],
            labels,
        };
    }
    let births: Vec<f64> = pd.points().iter().map(|(b, _)| *b).collect();
    let lifes: Vec<f64> = pd.points().iter().map(|(b, d)| d - b).collect();
    let axis = |vals: &[f64]| -> Vec<f64> {
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (0..GRID)
            .map(|k| lo + (hi - lo) * k as f64 / (GRID - 1) as f64)
            .collect()
    };
    let bs = axis(&births);
    let ls = axis(&lifes);
    let mut values = vec![0.0; GRID * GRID];
    for ((b, _), l) in pd.points().iter().zip(&lifes) {
        let w = (weight_c * l.powf(weight_p)).atan();
        for (j, y) in ls.iter().enumerate() {
            for (i, x) in bs.iter().enumerate() {
                let d2 = (b - x) * (b - x) + (l - y) * (l - y);
                values[j * GRID + i] += w * (-d2 / (2.0 * sigma * sigma)).exp();
            }
        }
    }
    FeatureVector { values, labels }
}
