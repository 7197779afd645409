//! Command-line driver: `compute`, `evaluate` and `grid-search`.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::RunConfig;

use crate::error::{Error, Result};
use crate::eval::{
    default_lambda_grid, evaluate, grid_search, report_table, score_pairs, EvalReport,
    GridOutcome, SamSource,
};
use crate::io::{compute_idf, read_bundles, read_pairs, write_atomic, BundleFile, PairsFile};
use crate::measures::{
    apply_whitening, fit_whitening_on, Measure, MeasureConfig, PairScore, WeightKind, WeightScheme,
};

#[derive(Debug, Parser)]
#[command(name = "wsmd", version, about = "Sentence distances from word embeddings and attention structure")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance for every pair in `--pairs`, as TSV.
    Compute(RunConfig),
    /// AUC (binary pairs) or Spearman (scored pairs) of one configuration.
    Evaluate(RunConfig),
    /// Picks the attention source and lambda with the best dev metric.
    GridSearch(RunConfig),
}

/// Per-pair distances in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    pub measure: Measure,
    pub rows: Vec<DistanceRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceRow {
    pub id_a: String,
    pub id_b: String,
    pub score: PairScore,
}

impl DistanceTable {
    /// Full-precision TSV. WSMD adds the decomposition columns.
    pub fn to_tsv(&self) -> String {
        let fused = self.measure == Measure::Wsmd;
        let mut out = String::from("id_a\tid_b\tdistance");
        if fused {
            out.push_str("\twmd_component\tk_smd_component\tk");
        }
        out.push('\n');
        for r in &self.rows {
            write!(out, "{}\t{}\t{}", r.id_a, r.id_b, r.score.distance).unwrap();
            if fused {
                write!(
                    out,
                    "\t{}\t{}\t{}",
                    r.score.wmd_component.unwrap_or(f64::NAN),
                    r.score.scaled_smd_component.unwrap_or(f64::NAN),
                    r.score.k.unwrap_or(f64::NAN)
                )
                .unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Same content rounded to two decimals, for reading.
    pub fn to_display(&self) -> String {
        let fused = self.measure == Measure::Wsmd;
        let mut out = format!("{:<16} {:<16} {:>10}", "id_a", "id_b", self.measure);
        if fused {
            write!(out, " {:>10} {:>10} {:>10}", "wmd", "k*smd", "k").unwrap();
        }
        out.push('\n');
        for r in &self.rows {
            write!(out, "{:<16} {:<16} {:>10.2}", r.id_a, r.id_b, r.score.distance).unwrap();
            if fused {
                write!(
                    out,
                    " {:>10.2} {:>10.2} {:>10.2}",
                    r.score.wmd_component.unwrap_or(f64::NAN),
                    r.score.scaled_smd_component.unwrap_or(f64::NAN),
                    r.score.k.unwrap_or(f64::NAN)
                )
                .unwrap();
            }
            if r.score.flagged {
                out.push_str("  (flagged)");
            }
            out.push('\n');
        }
        out
    }
}

/// Result of `grid-search`: the outcome and a config file that reproduces
/// the winner under `evaluate --config`.
#[derive(Debug, Clone)]
pub struct GridSelection {
    pub outcome: GridOutcome,
    pub chosen: RunConfig,
}

fn load_bundles(path: &Path, whiten: bool) -> Result<BundleFile> {
    let (bundles, warnings) = read_bundles(path)?;
    for w in &warnings {
        log::warn!(
            "{}:{}: attention rows of '{}' renormalized (deviation {:.3e})",
            path.display(),
            w.line,
            w.id,
            w.deviation
        );
    }
    if !whiten {
        return Ok(bundles);
    }
    let transform = fit_whitening_on(bundles.iter())?;
    if transform.is_regularized() {
        log::warn!("embedding covariance is rank-deficient; whitening was regularized");
    }
    bundles.map(|b| apply_whitening(b, &transform))
}

fn load_sources(paths: &[PathBuf]) -> Result<Vec<(SamSource, PathBuf)>> {
    let mut out: Vec<(SamSource, PathBuf)> = Vec::with_capacity(paths.len());
    for path in paths {
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::Config(format!("cannot name attention source {}", path.display())))?
            .to_string();
        if out.iter().any(|(s, _)| s.id == id) {
            return Err(Error::Config(format!("two --sam-bundles files are both named '{id}'")));
        }
        let (bundles, _) = read_bundles(path)?;
        out.push((SamSource { id, bundles }, path.clone()));
    }
    Ok(out)
}

fn measure_config(cfg: &RunConfig, bundles: &BundleFile) -> Result<MeasureConfig> {
    let measure = cfg.require_measure()?;
    let (default_weights, default_cost) = measure.defaults();
    let weights = match cfg.weights.unwrap_or(default_weights) {
        WeightKind::Uniform => WeightScheme::Uniform,
        WeightKind::Norm => WeightScheme::Norm,
        WeightKind::Idf => WeightScheme::Idf(compute_idf(bundles.iter())),
    };
    Ok(MeasureConfig::new(
        measure,
        weights,
        cfg.cost.unwrap_or(default_cost),
        cfg.lambda.unwrap_or(0.0),
    ))
}

/// Bundles and pairs for a single configuration, with the attention swapped
/// in from `--sam-bundles` when the measure uses it.
fn prepare_single(cfg: &RunConfig) -> Result<(BundleFile, PairsFile, MeasureConfig, Option<String>)> {
    cfg.validate_single()?;
    let measure = cfg.require_measure()?;
    let mut bundles = load_bundles(cfg.require_bundles()?, cfg.whiten)?;
    let pairs = read_pairs(cfg.require_pairs()?)?;
    pairs.check_ids(&bundles)?;
    let mut sam = None;
    if measure.uses_structure() {
        if let Some((source, _)) = load_sources(&cfg.sam_bundles)?.into_iter().next() {
            bundles = bundles.with_structure_from(&source.bundles)?;
            sam = Some(source.id);
        }
    }
    let config = measure_config(cfg, &bundles)?;
    Ok((bundles, pairs, config, sam))
}

pub fn cmd_compute(cfg: &RunConfig) -> Result<DistanceTable> {
    let (bundles, pairs, config, _) = prepare_single(cfg)?;
    let scores = score_pairs(&pairs, &bundles, &config)?;
    let rows = pairs
        .pairs
        .iter()
        .zip(scores)
        .map(|(p, score)| DistanceRow {
            id_a: p.id_a.clone(),
            id_b: p.id_b.clone(),
            score,
        })
        .collect();
    Ok(DistanceTable {
        measure: config.measure,
        rows,
    })
}

pub fn cmd_evaluate(cfg: &RunConfig) -> Result<EvalReport> {
    let (bundles, pairs, config, sam) = prepare_single(cfg)?;
    evaluate(&pairs, &bundles, &config, sam)
}

pub fn cmd_grid_search(cfg: &RunConfig) -> Result<GridSelection> {
    let measure = cfg.require_measure()?;
    if cfg.threads == Some(0) {
        return Err(Error::Config("--threads must be at least 1".into()));
    }
    let bundles = load_bundles(cfg.require_bundles()?, cfg.whiten)?;
    let pairs = read_pairs(cfg.require_pairs()?)?;
    pairs.check_ids(&bundles)?;
    let sources = if measure.uses_structure() {
        load_sources(&cfg.sam_bundles)?
    } else {
        if !cfg.sam_bundles.is_empty() {
            log::warn!("--sam-bundles is ignored by --measure {measure}");
        }
        Vec::new()
    };
    let lambdas = cfg.grid.clone().unwrap_or_else(default_lambda_grid);
    let base = measure_config(cfg, &bundles)?;
    let plain: Vec<SamSource> = sources.iter().map(|(s, _)| s.clone()).collect();
    let outcome = grid_search(&pairs, &bundles, &plain, &lambdas, &base)?;

    let best = &outcome.best.config;
    let sam_path = best
        .sam
        .as_ref()
        .and_then(|id| sources.iter().find(|(s, _)| &s.id == id))
        .map(|(_, p)| p.clone());
    let chosen = RunConfig {
        bundles: cfg.bundles.clone(),
        pairs: cfg.pairs.clone(),
        sam_bundles: sam_path.into_iter().collect(),
        measure: Some(best.measure),
        weights: Some(best.weights),
        cost: Some(best.cost),
        lambda: (best.measure == Measure::Wsmd).then_some(best.lambda),
        whiten: cfg.whiten,
        ..Default::default()
    };
    Ok(GridSelection { outcome, chosen })
}

fn reports_jsonl(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).expect("report serialises"));
        out.push('\n');
    }
    out
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} threads: {e}")))?
            .install(f),
        None => f(),
    }
}

/// Runs one parsed command line. Results go to `--out` (written atomically)
/// and a readable summary to standard output.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compute(cfg) => {
            let cfg = cfg.resolve_file()?;
            let table = in_pool(cfg.threads, || cmd_compute(&cfg))?;
            match &cfg.out {
                Some(path) => {
                    write_atomic(path, table.to_tsv().as_bytes())?;
                    print!("{}", table.to_display());
                }
                None => print!("{}", table.to_tsv()),
            }
        }
        Command::Evaluate(cfg) => {
            let cfg = cfg.resolve_file()?;
            let report = in_pool(cfg.threads, || cmd_evaluate(&cfg))?;
            let reports = [report];
            if let Some(path) = &cfg.out {
                write_atomic(path, reports_jsonl(&reports).as_bytes())?;
            }
            print!("{}", report_table(&reports));
        }
        Command::GridSearch(cfg) => {
            let cfg = cfg.resolve_file()?;
            let selection = in_pool(cfg.threads, || cmd_grid_search(&cfg))?;
            if let Some(path) = &cfg.out {
                write_atomic(path, selection.chosen.to_toml().as_bytes())?;
                let records = path.with_extension("records.jsonl");
                write_atomic(&records, reports_jsonl(&selection.outcome.evaluated).as_bytes())?;
            }
            print!("{}", report_table(&selection.outcome.evaluated));
            println!("best:");
            print!("{}", report_table(std::slice::from_ref(&selection.outcome.best)));
        }
    }
    Ok(())
}
