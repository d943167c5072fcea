//! Feature pipelines mapping raw series to a standardized [`FeatureMatrix`].
//!
//! Image series go through smoothing, per-frame standardization, sublevel
//! persistence, and a diagram vectorization; tabular series optionally pass
//! through the degree-2 polynomial embedding. Column standardization is
//! always applied last, since the sampler requires centered input whatever
//! the embedding.

use crate::cubical::{gaussian_smooth, standardize_frame, sublevel_pd, ImageFrame};
use crate::data::{standardize_columns, FeatureMatrix};
use crate::error::Error;
use crate::features::{f_stat, f_stat_labels, persistence_image};
use crate::Result;
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Which per-row feature map to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingKind {
    /// 36 statistics of both persistence diagrams (image series).
    TdaStat,
    /// Degree-2 polynomial features (tabular series).
    Poly2,
    /// Pass rows through unchanged (tabular series).
    Identity,
    /// 6 x 6 persistence image of PD0 (image series).
    PersistenceImage,
}

/// Embedding parameters.
#[derive(Debug, Clone, Copy)]
pub struct EmbeddingSpec {
    /// Feature map.
    pub kind: EmbeddingKind,
    /// Gaussian smoothing bandwidth applied to each frame.
    pub smoothing_sigma: f64,
    /// Whether frames are standardized to mean 0, mean square 1.
    pub standardize_frames: bool,
    /// Gaussian bandwidth of the persistence-image kernel.
    pub pi_sigma: f64,
    /// Inverse-tangent weight parameters `(c, p)` of the persistence image.
    pub pi_weight: (f64, f64),
}

impl EmbeddingSpec {
    /// The 36-statistic topological embedding with smoothing sigma 2.
    pub fn tda_stat() -> Self {
        Self {
            kind: EmbeddingKind::TdaStat,
            smoothing_sigma: 2.0,
            standardize_frames: true,
            pi_sigma: 0.1,
            pi_weight: (0.5, 1.0),
        }
    }

    /// Degree-2 polynomial embedding for tabular data.
    pub fn poly2() -> Self {
        Self {
            kind: EmbeddingKind::Poly2,
            ..Self::tda_stat()
        }
    }

    /// Identity embedding for tabular data.
    pub fn identity() -> Self {
        Self {
            kind: EmbeddingKind::Identity,
            ..Self::tda_stat()
        }
    }

    /// Persistence-image embedding for image series.
    pub fn persistence_image() -> Self {
        Self {
            kind: EmbeddingKind::PersistenceImage,
            ..Self::tda_stat()
        }
    }

    /// Output dimension for an input of `q` raw coordinates (ignored by the
    /// image embeddings, which are fixed at 36).
    pub fn output_dim(&self, q: usize) -> usize {
        match self.kind {
            EmbeddingKind::TdaStat | EmbeddingKind::PersistenceImage => 36,
            EmbeddingKind::Poly2 => q * (q + 3) / 2,
            EmbeddingKind::Identity => q,
        }
    }

    /// Per-coordinate labels for an input of `q` raw coordinates.
    pub fn labels(&self, q: usize) -> Vec<String> {
        match self.kind {
            EmbeddingKind::TdaStat => f_stat_labels(),
            EmbeddingKind::PersistenceImage => {
                (0..6).flat_map(|j| (0..6).map(move |i| format!("pimg_b{i}_l{j}"))).collect()
            }
            EmbeddingKind::Identity => (1..=q).map(|i| format!("x{i}")).collect(),
            EmbeddingKind::Poly2 => {
                let mut labels: Vec<String> = (1..=q).map(|i| format!("x{i}")).collect();
                for i in 1..=q {
                    for j in i..=q {
                        labels.push(format!("x{i}x{j}"));
                    }
                }
                labels
            }
        }
    }
}

/// Degree-2 polynomial features: the linear terms in input order, then the
/// products `x_i x_j` for `i <= j` in row-major order, so `q` inputs map to
/// `q (q + 3) / 2` outputs (4 to 14, 3 to 9).
pub fn poly2(x: &[f64]) -> Vec<f64> {
    let q = x.len();
    let mut out = Vec::with_capacity(q * (q + 3) / 2);
    out.extend_from_slice(x);
    for i in 0..q {
        for j in i..q {
            out.push(x[i] * x[j]);
        }
    }
    out
}

/// Map an image series to a standardized feature matrix: per frame,
/// standardize, smooth, compute both diagrams, vectorize; then standardize
/// columns.
///
/// Standardization precedes smoothing so each frame is normalized by its raw
/// pixel scale; normalizing by the post-smoothing scale instead would rescale
/// the diagrams by a frame-dependent factor and leak variance information
/// into features that are meant to carry only shape.
///
/// Frames must share one shape; a constant frame fails with its index.
pub fn embed_image_series(frames: &[ImageFrame], spec: &EmbeddingSpec) -> Result<FeatureMatrix> {
    if frames.len() < 3 {
        return Err(Error::InvalidInput(
            "an image series needs at least 3 frames".into(),
        ));
    }
    let (rows, cols) = (frames[0].rows(), frames[0].cols());
    if frames.iter().any(|f| f.rows() != rows || f.cols() != cols) {
        return Err(Error::InvalidInput("frames differ in shape".into()));
    }
    if !matches!(
        spec.kind,
        EmbeddingKind::TdaStat | EmbeddingKind::PersistenceImage
    ) {
        return Err(Error::InvalidInput(
            "image series require a topological embedding".into(),
        ));
    }

    let feature_rows: Vec<Vec<f64>> = frames
        .par_iter()
        .enumerate()
        .map(|(idx, frame)| {
            let standardized = if spec.standardize_frames {
                standardize_frame(frame).map_err(|_| Error::ZeroVarianceFrame {
                    frame: Some(idx),
                })?
            } else {
                frame.clone()
            };
            let prepared = gaussian_smooth(&standardized, spec.smoothing_sigma);
            let (pd0, pd1) = sublevel_pd(&prepared);
            let fv = match spec.kind {
                EmbeddingKind::TdaStat => f_stat(&pd0, &pd1),
                EmbeddingKind::PersistenceImage => {
                    persistence_image(&pd0, spec.pi_sigma, spec.pi_weight.0, spec.pi_weight.1)
                }
                _ => unreachable!(),
            };
            Ok(fv.values)
        })
        .collect::<Result<_>>()?;

    let d = feature_rows[0].len();
    let flat: Vec<f64> = feature_rows.into_iter().flatten().collect();
    let raw = FeatureMatrix::new(DMatrix::from_row_slice(frames.len(), d, &flat))?;
    Ok(standardize_columns(&raw).0)
}

/// Map a tabular series through the identity or polynomial embedding and
/// standardize the columns.
pub fn embed_tabular_series(rows: &DMatrix<f64>, spec: &EmbeddingSpec) -> Result<FeatureMatrix> {
    if rows.nrows() < 3 {
        return Err(Error::InvalidInput(
            "a tabular series needs at least 3 rows".into(),
        ));
    }
    let embedded = match spec.kind {
        EmbeddingKind::Identity => rows.clone(),
        EmbeddingKind::Poly2 => {
            let q = rows.ncols();
            let d = q * (q + 3) / 2;
            let mut out = DMatrix::zeros(rows.nrows(), d);
            for i in 0..rows.nrows() {
                let x: Vec<f64> = rows.row(i).iter().cloned().collect();
                for (j, v) in poly2(&x).into_iter().enumerate() {
                    out[(i, j)] = v;
                }
            }
            out
        }
        _ => {
            return Err(Error::InvalidInput(
                "tabular series require the identity or poly2 embedding".into(),
            ))
        }
    };
    let raw = FeatureMatrix::new(embedded)?;
    Ok(standardize_columns(&raw).0)
}
