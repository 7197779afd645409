use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use super::SentenceBundle;
use crate::error::{Error, Result};
use crate::ot::CostMatrix;

/// Ground cost between two token embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostKind {
    /// `‖w − w′‖₂`
    Euclidean,
    /// `1 − cos(w, w′)`, clamped to `[0, 2]`
    Cosine,
}

impl fmt::Display for CostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostKind::Euclidean => "euclidean",
            CostKind::Cosine => "cosine",
        })
    }
}

impl FromStr for CostKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" | "l2" => Ok(CostKind::Euclidean),
            "cosine" => Ok(CostKind::Cosine),
            other => Err(Error::Config(format!(
                "unknown cost `{other}` (expected euclidean or cosine)"
            ))),
        }
    }
}

pub fn build_cost(a: &SentenceBundle, b: &SentenceBundle, kind: CostKind) -> Result<CostMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "`{}` has embedding dimension {}, `{}` has {}",
            a.id(),
            a.dim(),
            b.id(),
            b.dim()
        )));
    }
    let (ea, eb) = (a.embeddings(), b.embeddings());
    let costs = match kind {
        CostKind::Euclidean => Array2::from_shape_fn((a.len(), b.len()), |(i, j)| {
            euclidean(ea.row(i), eb.row(j))
        }),
        CostKind::Cosine => {
            let na = row_norms(a)?;
            let nb = row_norms(b)?;
            Array2::from_shape_fn((a.len(), b.len()), |(i, j)| {
                let cos = ea.row(i).dot(&eb.row(j)) / (na[i] * nb[j]);
                (1.0 - cos).clamp(0.0, 2.0)
            })
        }
    };
    CostMatrix::new(costs)
}

fn euclidean(x: ArrayView1<f64>, y: ArrayView1<f64>) -> f64 {
    x.iter()
        .zip(y.iter())
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

fn row_norms(bundle: &SentenceBundle) -> Result<Vec<f64>> {
    bundle
        .embeddings()
        .rows()
        .into_iter()
        .enumerate()
        .map(|(index, row)| {
            let norm = row.dot(&row).sqrt();
            if norm == 0.0 {
                Err(Error::ZeroNormEmbedding {
                    id: bundle.id().to_string(),
                    index,
                })
            } else {
                Ok(norm)
            }
        })
        .collect()
}
