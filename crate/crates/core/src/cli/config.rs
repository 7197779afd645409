use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{CostKind, Measure, WeightKind};

/// Options shared by all subcommands. Every field can also come from a TOML
/// file given with `--config`; flags on the command line take precedence.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Sentence bundle file (JSON lines) with tokens, embeddings and attention.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bundles: Option<PathBuf>,

    /// Pairs file (TSV with `#mode=` line).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<PathBuf>,

    /// Attention exports whose `sam` replaces the one in `--bundles`; the
    /// file stem (e.g. `L7H2`) names the source. Repeatable.
    #[arg(long = "sam-bundles")]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sam_bundles: Vec<PathBuf>,

    /// bow, sentemb, wmd, wrd, smd or wsmd.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<Measure>,

    /// uniform, idf or norm. Defaults depend on the measure.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightKind>,

    /// euclidean or cosine. Defaults depend on the measure.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostKind>,

    /// Mixing ratio in [0, 1] for wsmd.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,

    /// Whiten embeddings with a transform fitted on all of `--bundles`.
    #[arg(long)]
    pub whiten: bool,

    /// Output file. Written atomically.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    /// Comma-separated lambda grid for grid-search (default 0, 0.1, ..., 1).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,

    /// Worker threads for pair scoring (default: all cores).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,

    /// TOML file with defaults for any of these options.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("bad config file: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::from_toml(&text)
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            bundles: self.bundles.or(base.bundles),
            pairs: self.pairs.or(base.pairs),
            sam_bundles: if self.sam_bundles.is_empty() {
                base.sam_bundles
            } else {
                self.sam_bundles
            },
            measure: self.measure.or(base.measure),
            weights: self.weights.or(base.weights),
            cost: self.cost.or(base.cost),
            lambda: self.lambda.or(base.lambda),
            whiten: self.whiten || base.whiten,
            out: self.out.or(base.out),
            grid: self.grid.or(base.grid),
            threads: self.threads.or(base.threads),
            config: None,
        }
    }

    /// Merges in the `--config` file, if one was given.
    pub fn resolve_file(self) -> Result<RunConfig> {
        match self.config.clone() {
            Some(path) => Ok(self.over(RunConfig::load(&path)?)),
            None => Ok(self),
        }
    }

    pub(crate) fn require_bundles(&self) -> Result<&Path> {
        self.bundles
            .as_deref()
            .ok_or_else(|| Error::Config("--bundles is required".into()))
    }

    pub(crate) fn require_pairs(&self) -> Result<&Path> {
        self.pairs
            .as_deref()
            .ok_or_else(|| Error::Config("--pairs is required".into()))
    }

    pub(crate) fn require_measure(&self) -> Result<Measure> {
        self.measure
            .ok_or_else(|| Error::Config("--measure is required (bow, sentemb, wmd, wrd, smd, wsmd)".into()))
    }

    /// Single-configuration checks for `compute` and `evaluate`.
    pub(crate) fn validate_single(&self) -> Result<()> {
        let measure = self.require_measure()?;
        if measure == Measure::Wsmd && self.lambda.is_none() {
            return Err(Error::Config("--measure wsmd needs --lambda".into()));
        }
        if let Some(l) = self.lambda {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::InvalidLambda(l));
            }
        }
        if measure.uses_structure() && self.sam_bundles.len() > 1 {
            return Err(Error::Config(
                "give at most one --sam-bundles here; use grid-search to compare several".into(),
            ));
        }
        if !measure.uses_structure() && !self.sam_bundles.is_empty() {
            log::warn!("--sam-bundles is ignored by --measure {measure}");
        }
        if measure != Measure::Wsmd && self.lambda.is_some() {
            log::warn!("--lambda is ignored by --measure {measure}");
        }
        if self.threads == Some(0) {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        Ok(())
    }
}
