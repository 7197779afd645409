//! PCA whitening of token embeddings.
//!
//! Contextual embeddings are strongly anisotropic; whitening maps them to
//! zero mean and identity covariance so that Euclidean and cosine costs are
//! not dominated by a few directions. A transform is fitted once on every
//! token embedding of a dataset and then applied to each sentence.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView2, Axis};

use super::SentenceBundle;
use crate::error::{Error, Result};

/// Added to every eigenvalue when the covariance is rank-deficient.
pub const WHITENING_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct WhiteningTransform {
    mean: Array1<f64>,
    /// Row `k` is `e_k / √λ_k` for eigenpair `(λ_k, e_k)` of the covariance.
    transform: Array2<f64>,
    regularized: bool,
}

impl WhiteningTransform {
    pub fn mean(&self) -> &Array1<f64> {
        &self.mean
    }

    pub fn transform(&self) -> &Array2<f64> {
        &self.transform
    }

    /// True when the covariance was rank-deficient and `WHITENING_EPS` was
    /// added to its eigenvalues.
    pub fn is_regularized(&self) -> bool {
        self.regularized
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Whitens each row of `rows`.
    pub fn apply_rows(&self, rows: ArrayView2<f64>) -> Result<Array2<f64>> {
        if rows.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "whitening fitted on dimension {}, got {}",
                self.dim(),
                rows.ncols()
            )));
        }
        let centered = &rows - &self.mean.view().insert_axis(Axis(0));
        Ok(centered.dot(&self.transform.t()))
    }
}

/// Fits a whitening transform on the rows of `rows` (one embedding per row).
pub fn fit_whitening(rows: ArrayView2<f64>) -> Result<WhiteningTransform> {
    let (count, d) = rows.dim();
    if count < 2 || d == 0 {
        return Err(Error::DimensionMismatch(format!(
            "whitening needs at least two rows of positive dimension, got {count}x{d}"
        )));
    }
    if rows.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("embeddings"));
    }
    let mean = rows.mean_axis(Axis(0)).expect("non-empty");
    let centered = &rows - &mean.view().insert_axis(Axis(0));
    let cov = centered.t().dot(&centered) / (count - 1) as f64;

    let eigen = SymmetricEigen::new(DMatrix::from_fn(d, d, |i, j| cov[[i, j]]));
    let largest = eigen.eigenvalues.iter().copied().fold(0.0f64, f64::max);
    let smallest = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let regularized = count <= d || smallest <= 1e-12 * largest.max(f64::MIN_POSITIVE);
    if regularized {
        log::warn!("embedding covariance is rank-deficient; regularising eigenvalues by {WHITENING_EPS:e}");
    }

    let mut transform = Array2::zeros((d, d));
    for k in 0..d {
        let mut value = eigen.eigenvalues[k].max(0.0);
        if regularized {
            value += WHITENING_EPS;
        }
        let scale = value.sqrt().recip();
        for j in 0..d {
            transform[[k, j]] = eigen.eigenvectors[(j, k)] * scale;
        }
    }
    Ok(WhiteningTransform {
        mean,
        transform,
        regularized,
    })
}

/// Fits on every token embedding of `bundles`.
pub fn fit_whitening_on<'a>(
    bundles: impl IntoIterator<Item = &'a SentenceBundle>,
) -> Result<WhiteningTransform> {
    let views: Vec<_> = bundles.into_iter().map(|b| b.embeddings().view()).collect();
    if views.is_empty() {
        return Err(Error::DimensionMismatch("no bundles to fit whitening on".into()));
    }
    let rows = ndarray::concatenate(Axis(0), &views)
        .map_err(|e| Error::DimensionMismatch(format!("inconsistent embedding dimension: {e}")))?;
    fit_whitening(rows.view())
}

/// Replaces the bundle's embeddings by their whitened version; tokens and
/// attention are unchanged.
pub fn apply_whitening(
    bundle: &SentenceBundle,
    transform: &WhiteningTransform,
) -> Result<SentenceBundle> {
    let whitened = transform.apply_rows(bundle.embeddings().view())?;
    bundle.with_embeddings(whitened)
}
