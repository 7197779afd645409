use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::ot::StructureMatrix;

/// Input tolerance on self-attention row sums before renormalisation.
pub const SAM_INPUT_TOL: f64 = 1e-6;

/// Everything known about one sentence: its tokens, one embedding row per
/// token, and a row-stochastic self-attention matrix over the same tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceBundle {
    id: String,
    tokens: Vec<String>,
    embeddings: Array2<f64>,
    sam: StructureMatrix,
    norm_weights: Option<Array1<f64>>,
}

impl SentenceBundle {
    pub fn new(
        id: impl Into<String>,
        tokens: Vec<String>,
        embeddings: Array2<f64>,
        sam: StructureMatrix,
    ) -> Result<Self> {
        let id = id.into();
        let invalid = |reason: String| Error::InvalidBundle {
            id: id.clone(),
            reason,
        };
        let n = tokens.len();
        if n == 0 {
            return Err(invalid("sentence has no tokens".into()));
        }
        if embeddings.nrows() != n {
            return Err(invalid(format!(
                "{} embedding rows for {n} tokens",
                embeddings.nrows()
            )));
        }
        if embeddings.ncols() == 0 {
            return Err(invalid("embedding dimension is zero".into()));
        }
        if embeddings.iter().any(|x| !x.is_finite()) {
            return Err(invalid("non-finite embedding entry".into()));
        }
        if sam.dim() != n {
            return Err(invalid(format!(
                "attention matrix is {0}x{0} for {n} tokens",
                sam.dim()
            )));
        }
        if !sam.is_row_normalized() {
            return Err(invalid("attention matrix is not row-normalised".into()));
        }
        Ok(SentenceBundle {
            id,
            tokens,
            embeddings,
            sam,
            norm_weights: None,
        })
    }

    /// Builds a bundle from a raw attention matrix, renormalising its rows.
    /// Returns the bundle and the largest row-sum deviation seen in the input.
    pub fn from_raw(
        id: impl Into<String>,
        tokens: Vec<String>,
        embeddings: Array2<f64>,
        sam: Array2<f64>,
    ) -> Result<(Self, f64)> {
        let id = id.into();
        let (sam, deviation) =
            StructureMatrix::renormalized(sam).map_err(|e| Error::InvalidBundle {
                id: id.clone(),
                reason: e.to_string(),
            })?;
        Ok((SentenceBundle::new(id, tokens, embeddings, sam)?, deviation))
    }

    /// Attaches precomputed per-token weights used by the `norm` scheme.
    pub fn with_norm_weights(mut self, weights: Array1<f64>) -> Result<Self> {
        if weights.len() != self.len() {
            return Err(Error::InvalidBundle {
                id: self.id.clone(),
                reason: format!("{} norm weights for {} tokens", weights.len(), self.len()),
            });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidBundle {
                id: self.id.clone(),
                reason: "norm weights must be finite and non-negative".into(),
            });
        }
        self.norm_weights = Some(weights);
        Ok(self)
    }

    pub fn with_embeddings(&self, embeddings: Array2<f64>) -> Result<Self> {
        let mut out = SentenceBundle::new(
            self.id.clone(),
            self.tokens.clone(),
            embeddings,
            self.sam.clone(),
        )?;
        out.norm_weights = self.norm_weights.clone();
        Ok(out)
    }

    pub fn with_sam(&self, sam: StructureMatrix) -> Result<Self> {
        let mut out = SentenceBundle::new(
            self.id.clone(),
            self.tokens.clone(),
            self.embeddings.clone(),
            sam,
        )?;
        out.norm_weights = self.norm_weights.clone();
        Ok(out)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.embeddings.ncols()
    }

    pub fn embeddings(&self) -> &Array2<f64> {
        &self.embeddings
    }

    pub fn sam(&self) -> &StructureMatrix {
        &self.sam
    }

    pub fn norm_weights(&self) -> Option<&Array1<f64>> {
        self.norm_weights.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use ndarray::array;

    use super::*;

    fn toks(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("t{i}")).collect()
    }

    #[test]
    fn rejects_inconsistent_shapes() {
        let sam = StructureMatrix::row_stochastic(array![[1.0]]).unwrap();
        assert!(SentenceBundle::new("x", toks(2), Array2::zeros((2, 3)), sam.clone()).is_err());
        assert!(SentenceBundle::new("x", toks(1), Array2::zeros((2, 3)), sam.clone()).is_err());
        assert!(SentenceBundle::new("x", vec![], Array2::zeros((0, 3)), sam).is_err());
    }

    #[test]
    fn raw_attention_is_renormalised() {
        let (b, dev) = SentenceBundle::from_raw(
            "x",
            toks(2),
            Array2::ones((2, 2)),
            array![[0.49, 0.49], [0.2, 0.8]],
        )
        .unwrap();
        assert!((dev - 0.02).abs() < 1e-12);
        assert!((b.sam().view().row(0).sum() - 1.0).abs() < 1e-15);
    }
}
