use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    bow_similarity, sent_emb_similarity, smd_with, wmd, wsmd_with, CostKind, SentenceBundle,
    WeightScheme,
};
use crate::error::{Error, Result};
use crate::ot::SolverOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Bow,
    SentEmb,
    Wmd,
    Wrd,
    Smd,
    Wsmd,
}

impl Measure {
    pub fn uses_structure(self) -> bool {
        matches!(self, Measure::Smd | Measure::Wsmd)
    }

    pub fn uses_transport(self) -> bool {
        !matches!(self, Measure::Bow | Measure::SentEmb)
    }

    /// Default weight scheme and cost for this measure.
    pub fn defaults(self) -> (super::WeightKind, CostKind) {
        use super::WeightKind::*;
        match self {
            Measure::Wrd => (Norm, CostKind::Cosine),
            _ => (Uniform, CostKind::Euclidean),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Bow => "bow",
            Measure::SentEmb => "sentemb",
            Measure::Wmd => "wmd",
            Measure::Wrd => "wrd",
            Measure::Smd => "smd",
            Measure::Wsmd => "wsmd",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bow" => Measure::Bow,
            "sentemb" => Measure::SentEmb,
            "wmd" => Measure::Wmd,
            "wrd" => Measure::Wrd,
            "smd" => Measure::Smd,
            "wsmd" => Measure::Wsmd,
            other => {
                return Err(Error::Config(format!(
                    "unknown measure `{other}` (expected bow, sentemb, wmd, wrd, smd or wsmd)"
                )))
            }
        })
    }
}

/// A fully resolved measure: which distance, how tokens are weighted and
/// compared, and the mixing ratio for the fused distance.
#[derive(Debug, Clone)]
pub struct MeasureConfig {
    pub measure: Measure,
    pub weights: WeightScheme,
    pub cost: CostKind,
    pub lambda: f64,
    pub solver: SolverOptions,
}

impl MeasureConfig {
    pub fn new(measure: Measure, weights: WeightScheme, cost: CostKind, lambda: f64) -> Self {
        MeasureConfig {
            measure,
            weights,
            cost,
            lambda,
            solver: SolverOptions::default(),
        }
    }
}

/// Distance for one sentence pair. Similarity baselines report
/// `1 − cosine` so that smaller always means more similar.
#[derive(Debug, Clone, PartialEq)]
pub struct PairScore {
    pub distance: f64,
    /// Linear transport cost at the returned plan (fused measures only).
    pub wmd_component: Option<f64>,
    /// `k` times the structure objective at the returned plan (fused measures only).
    pub scaled_smd_component: Option<f64>,
    pub k: Option<f64>,
    /// A degenerate input forced a conventional value or a fallback.
    pub flagged: bool,
}

impl PairScore {
    fn plain(distance: f64) -> Self {
        PairScore {
            distance,
            wmd_component: None,
            scaled_smd_component: None,
            k: None,
            flagged: false,
        }
    }
}

pub fn score_pair(a: &SentenceBundle, b: &SentenceBundle, config: &MeasureConfig) -> Result<PairScore> {
    Ok(match config.measure {
        Measure::Bow => {
            let s = bow_similarity(a, b);
            PairScore {
                flagged: s.zero_vector,
                ..PairScore::plain(1.0 - s.value)
            }
        }
        Measure::SentEmb => {
            let s = sent_emb_similarity(a, b);
            PairScore {
                flagged: s.zero_vector,
                ..PairScore::plain(1.0 - s.value)
            }
        }
        Measure::Wmd | Measure::Wrd => PairScore::plain(wmd(a, b, &config.weights, config.cost)?.cost),
        Measure::Smd => PairScore::plain(smd_with(a, b, &config.weights, &config.solver, &[])?.distance),
        Measure::Wsmd => {
            let r = wsmd_with(a, b, &config.weights, config.cost, config.lambda, &config.solver)?;
            PairScore {
                distance: r.distance,
                wmd_component: Some(r.wmd_component),
                scaled_smd_component: Some(r.scaled_smd()),
                k: Some(r.k),
                flagged: r.structure_fallback,
            }
        }
    })
}
