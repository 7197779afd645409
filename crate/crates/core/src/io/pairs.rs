//! Dataset pair files: tab-separated with a `#mode=binary|score` first line
//! and an `id_a<TAB>id_b<TAB>gold` header.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;

use super::bundles::write_atomic;
use super::BundleFile;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMode {
    /// Paraphrase identification: gold is 0 or 1.
    Binary,
    /// Graded similarity: gold is a real score in `[0, 5]`.
    Score,
}

impl fmt::Display for PairMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairMode::Binary => "binary",
            PairMode::Score => "score",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gold {
    Binary(bool),
    Score(f64),
}

impl Gold {
    pub fn value(self) -> f64 {
        match self {
            Gold::Binary(b) => f64::from(u8::from(b)),
            Gold::Score(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetPair {
    pub id_a: String,
    pub id_b: String,
    pub gold: Gold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairsFile {
    pub mode: PairMode,
    pub pairs: Vec<DatasetPair>,
}

impl PairsFile {
    /// Fails with the first id that `bundles` does not contain.
    pub fn check_ids(&self, bundles: &BundleFile) -> Result<()> {
        for p in &self.pairs {
            bundles.require(&p.id_a)?;
            bundles.require(&p.id_b)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn read_pairs(path: impl AsRef<Path>) -> Result<PairsFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pairs(&text, path)
}

pub fn parse_pairs(text: &str, source: &Path) -> Result<PairsFile> {
    let err = |line: usize, reason: String| Error::Parse {
        path: source.to_path_buf(),
        line,
        reason,
    };
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    let mode = match lines.next() {
        Some((_, "#mode=binary")) => PairMode::Binary,
        Some((_, "#mode=score")) => PairMode::Score,
        Some((n, other)) => {
            return Err(err(n, format!("expected `#mode=binary` or `#mode=score`, found `{other}`")))
        }
        None => return Err(err(1, "empty pairs file".into())),
    };
    match lines.next() {
        Some((_, "id_a\tid_b\tgold")) => {}
        Some((n, other)) => return Err(err(n, format!("expected header `id_a<TAB>id_b<TAB>gold`, found `{other}`"))),
        None => return Err(err(2, "missing header row".into())),
    }
    let mut pairs = Vec::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(err(n, format!("expected 3 tab-separated fields, found {}", fields.len())));
        }
        let gold = match mode {
            PairMode::Binary => match fields[2] {
                "0" => Gold::Binary(false),
                "1" => Gold::Binary(true),
                other => return Err(err(n, format!("binary gold must be 0 or 1, found `{other}`"))),
            },
            PairMode::Score => {
                let s: f64 = fields[2]
                    .parse()
                    .map_err(|_| err(n, format!("non-numeric gold `{}`", fields[2])))?;
                if !(0.0..=5.0).contains(&s) {
                    return Err(err(n, format!("gold score {s} outside [0, 5]")));
                }
                Gold::Score(s)
            }
        };
        pairs.push(DatasetPair {
            id_a: fields[0].to_string(),
            id_b: fields[1].to_string(),
            gold,
        });
    }
    Ok(PairsFile { mode, pairs })
}

pub fn pairs_to_string(file: &PairsFile) -> String {
    let mut out = format!("#mode={}\nid_a\tid_b\tgold\n", file.mode);
    for p in &file.pairs {
        let gold = match p.gold {
            Gold::Binary(b) => u8::from(b).to_string(),
            Gold::Score(s) => s.to_string(),
        };
        writeln!(out, "{}\t{}\t{}", p.id_a, p.id_b, gold).expect("write to String");
    }
    out
}

pub fn write_pairs(file: &PairsFile, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), pairs_to_string(file).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<PairsFile> {
        parse_pairs(text, Path::new("pairs.tsv"))
    }

    #[test]
    fn binary_rows() {
        let f = parse("#mode=binary\nid_a\tid_b\tgold\na\tb\t1\nc\td\t0\n").unwrap();
        assert_eq!(f.mode, PairMode::Binary);
        assert_eq!(f.len(), 2);
        assert_eq!(f.pairs[0].gold, Gold::Binary(true));
        assert_eq!(f.pairs[1].gold, Gold::Binary(false));
    }

    #[test]
    fn score_rows() {
        let f = parse("#mode=score\nid_a\tid_b\tgold\na\tb\t3.40\n").unwrap();
        assert_eq!(f.pairs[0].gold, Gold::Score(3.40));
    }

    #[test]
    fn bad_gold_reports_row() {
        let e = parse("#mode=binary\nid_a\tid_b\tgold\na\tb\t1\na\tb\tyes\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e}");
        let e = parse("#mode=score\nid_a\tid_b\tgold\na\tb\tyes\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
    }

    #[test]
    fn header_checks() {
        assert!(parse("id_a\tid_b\tgold\n").is_err());
        assert!(parse("#mode=score\nx\ty\tz\n").is_err());
        assert!(parse("#mode=score\nid_a\tid_b\tgold\na\tb\t7\n").is_err());
    }

    #[test]
    fn writes_what_it_reads() {
        let text = "#mode=score\nid_a\tid_b\tgold\na\tb\t3.4\nc\td\t0\n";
        assert_eq!(pairs_to_string(&parse(text).unwrap()), text);
    }
}
