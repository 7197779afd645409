use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use super::SentenceBundle;
use crate::error::{Error, Result};
use crate::ot::{uniform_weights, ProbVector};

/// Token → inverse document frequency. All values are strictly positive.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IdfTable(BTreeMap<String, f64>);

impl IdfTable {
    pub fn new(values: BTreeMap<String, f64>) -> Result<Self> {
        if let Some((token, v)) = values.iter().find(|(_, v)| !v.is_finite() || **v <= 0.0) {
            return Err(Error::Config(format!(
                "idf for `{token}` must be positive, got {v}"
            )));
        }
        Ok(IdfTable(values))
    }

    pub fn get(&self, token: &str) -> Option<f64> {
        self.0.get(token).copied()
    }

    /// Weight for `token`; tokens missing from the table get the table's
    /// largest idf (rare-word prior).
    pub fn weight(&self, token: &str) -> f64 {
        self.get(token).unwrap_or_else(|| self.max())
    }

    pub fn max(&self) -> f64 {
        self.0.values().copied().fold(1.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// Label of a weight scheme, without the idf table it may need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Uniform,
    Idf,
    Norm,
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightKind::Uniform => "uniform",
            WeightKind::Idf => "idf",
            WeightKind::Norm => "norm",
        })
    }
}

impl FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(WeightKind::Uniform),
            "idf" => Ok(WeightKind::Idf),
            "norm" => Ok(WeightKind::Norm),
            other => Err(Error::Config(format!(
                "unknown weight scheme `{other}` (expected uniform, idf or norm)"
            ))),
        }
    }
}

/// How token mass is distributed within a sentence.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightScheme {
    Uniform,
    Idf(IdfTable),
    /// Embedding norms, or the bundle's precomputed norm weights when present.
    Norm,
}

impl WeightScheme {
    pub fn kind(&self) -> WeightKind {
        match self {
            WeightScheme::Uniform => WeightKind::Uniform,
            WeightScheme::Idf(_) => WeightKind::Idf,
            WeightScheme::Norm => WeightKind::Norm,
        }
    }
}

pub fn build_weights(bundle: &SentenceBundle, scheme: &WeightScheme) -> Result<ProbVector> {
    let raw: Array1<f64> = match scheme {
        WeightScheme::Uniform => return uniform_weights(bundle.len()),
        WeightScheme::Idf(table) => bundle.tokens().iter().map(|t| table.weight(t)).collect(),
        WeightScheme::Norm => match bundle.norm_weights() {
            Some(w) => w.clone(),
            None => bundle
                .embeddings()
                .rows()
                .into_iter()
                .map(|r| r.dot(&r).sqrt())
                .collect(),
        },
    };
    if raw.sum() <= 0.0 {
        return Err(Error::ZeroWeightMass(bundle.id().to_string()));
    }
    ProbVector::normalized(raw)
}
