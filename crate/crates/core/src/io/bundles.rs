//! Sentence-bundle files: UTF-8, one JSON object per line with fields
//! `id`, `tokens`, `embeddings` (row-major nested arrays), `sam` (nested
//! arrays) and an optional `norm_weights`. Numbers are written in the
//! shortest decimal form that parses back to the identical `f64`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::SentenceBundle;

/// Attention rows whose input sums deviate from one by more than this are
/// reported after renormalisation.
pub const SAM_WARN_TOL: f64 = 1e-3;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleRecord {
    id: String,
    tokens: Vec<String>,
    embeddings: Vec<Vec<f64>>,
    sam: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    norm_weights: Option<Vec<f64>>,
}

/// An ordered collection of bundles with unique ids and one embedding dimension.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BundleFile {
    records: Vec<SentenceBundle>,
    index: HashMap<String, usize>,
}

impl BundleFile {
    pub fn new(records: Vec<SentenceBundle>) -> Result<Self> {
        let mut index = HashMap::with_capacity(records.len());
        for (k, r) in records.iter().enumerate() {
            if index.insert(r.id().to_string(), k).is_some() {
                return Err(Error::InvalidBundle {
                    id: r.id().to_string(),
                    reason: "duplicate id".into(),
                });
            }
            if r.dim() != records[0].dim() {
                return Err(Error::InvalidBundle {
                    id: r.id().to_string(),
                    reason: format!(
                        "embedding dimension {} differs from {}",
                        r.dim(),
                        records[0].dim()
                    ),
                });
            }
        }
        Ok(BundleFile { records, index })
    }

    pub fn get(&self, id: &str) -> Option<&SentenceBundle> {
        self.index.get(id).map(|&k| &self.records[k])
    }

    pub fn require(&self, id: &str) -> Result<&SentenceBundle> {
        self.get(id).ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn records(&self) -> &[SentenceBundle] {
        &self.records
    }

    pub fn iter(&self) -> impl Iterator<Item = &SentenceBundle> {
        self.records.iter()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Embedding dimension shared by all records, if any.
    pub fn dim(&self) -> Option<usize> {
        self.records.first().map(|r| r.dim())
    }

    /// Replaces each record's attention matrix by the one stored under the
    /// same id in `source`, e.g. a per-head attention export.
    pub fn with_structure_from(&self, source: &BundleFile) -> Result<Self> {
        self.map(|b| {
            let other = source.require(b.id())?;
            if other.tokens() != b.tokens() {
                return Err(Error::InvalidBundle {
                    id: b.id().to_string(),
                    reason: "attention source has different tokens".into(),
                });
            }
            b.with_sam(other.sam().clone())
        })
    }

    /// Applies `f` to every record, keeping order and ids.
    pub fn map(&self, f: impl Fn(&SentenceBundle) -> Result<SentenceBundle>) -> Result<Self> {
        BundleFile::new(self.records.iter().map(f).collect::<Result<_>>()?)
    }
}

/// A renormalised attention matrix whose input rows were noticeably off.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadWarning {
    pub line: usize,
    pub id: String,
    pub deviation: f64,
}

pub fn read_bundles(path: impl AsRef<Path>) -> Result<(BundleFile, Vec<LoadWarning>)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_bundles_from(BufReader::new(file), path)
}

/// Parses bundle records from `reader`; `source` is only used in messages.
pub fn read_bundles_from(
    reader: impl BufRead,
    source: &Path,
) -> Result<(BundleFile, Vec<LoadWarning>)> {
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let line = line.map_err(|e| Error::io(source, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |reason: String| Error::Parse {
            path: source.to_path_buf(),
            line: line_no,
            reason,
        };
        let record: BundleRecord =
            serde_json::from_str(&line).map_err(|e| parse_err(format!("malformed record: {e}")))?;
        let (bundle, deviation) = record_to_bundle(record).map_err(|e| parse_err(e.to_string()))?;
        if deviation > SAM_WARN_TOL {
            log::warn!(
                "{}:{line_no}: attention rows of `{}` deviated from 1 by {deviation:.3e}; renormalised",
                source.display(),
                bundle.id()
            );
            warnings.push(LoadWarning {
                line: line_no,
                id: bundle.id().to_string(),
                deviation,
            });
        }
        records.push(bundle);
    }
    let file = BundleFile::new(records).map_err(|e| Error::Parse {
        path: source.to_path_buf(),
        line: 0,
        reason: e.to_string(),
    })?;
    Ok((file, warnings))
}

fn record_to_bundle(r: BundleRecord) -> Result<(SentenceBundle, f64)> {
    let invalid = |reason: String| Error::InvalidBundle {
        id: r.id.clone(),
        reason,
    };
    let embeddings = nested_to_array(&r.embeddings, None).map_err(|e| invalid(format!("embeddings: {e}")))?;
    let sam = nested_to_array(&r.sam, Some(r.sam.len())).map_err(|e| invalid(format!("sam: {e}")))?;
    if sam.nrows() != r.tokens.len() {
        return Err(invalid(format!(
            "sam is {0}x{0} for {1} tokens",
            sam.nrows(),
            r.tokens.len()
        )));
    }
    let (mut bundle, deviation) = SentenceBundle::from_raw(r.id.clone(), r.tokens.clone(), embeddings, sam)?;
    if let Some(w) = r.norm_weights {
        bundle = bundle.with_norm_weights(Array1::from(w))?;
    }
    Ok((bundle, deviation))
}

fn nested_to_array(rows: &[Vec<f64>], width: Option<usize>) -> std::result::Result<Array2<f64>, String> {
    let cols = width.unwrap_or_else(|| rows.first().map_or(0, Vec::len));
    if let Some((k, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(format!("row {k} has {} entries, expected {cols}", row.len()));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err("non-finite entry".into());
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Array2::from_shape_vec((rows.len(), cols), flat).map_err(|e| e.to_string())
}

fn bundle_to_record(b: &SentenceBundle) -> BundleRecord {
    let rows = |m: &Array2<f64>| m.rows().into_iter().map(|r| r.to_vec()).collect();
    BundleRecord {
        id: b.id().to_string(),
        tokens: b.tokens().to_vec(),
        embeddings: rows(b.embeddings()),
        sam: rows(b.sam().as_array()),
        norm_weights: b.norm_weights().map(|w| w.to_vec()),
    }
}

/// Canonical serialisation of `file`, one record per line.
pub fn bundles_to_string(file: &BundleFile) -> String {
    let mut out = String::new();
    for b in file.iter() {
        out.push_str(&serde_json::to_string(&bundle_to_record(b)).expect("records serialise"));
        out.push('\n');
    }
    out
}

/// Writes `file` atomically: either the complete file appears at `path` or
/// nothing does.
pub fn write_bundles(file: &BundleFile, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), bundles_to_string(file).as_bytes())
}

pub(crate) fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
