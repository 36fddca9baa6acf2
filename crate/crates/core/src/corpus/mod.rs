//! Aligned source/target corpora: loading, statistics and splits.

mod compare;
mod split;
mod stats;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tracing::warn;

use crate::error::{Error, Result};

pub use compare::{compare_corpora, ComparisonRow, ComparisonTable};
pub use split::{stratified_split, SplitAssignment, DEFAULT_VAL_FRACTION};
pub use stats::{corpus_stats, CorpusStats, SidePair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "validation" | "valid" | "val" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(Error::invalid(format!("unknown split {other:?}"))),
        }
    }
}

/// One source text and its Easy-to-Read version.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignedPair {
    pub id: String,
    pub book_id: String,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_tag: Option<String>,
}

/// Selects a subset of pairs by split and domain tag.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairFilter {
    pub split: Option<Split>,
    pub domain_tag: Option<String>,
}

impl PairFilter {
    pub fn all() -> Self {
        PairFilter::default()
    }

    pub fn split(split: Split) -> Self {
        PairFilter {
            split: Some(split),
            domain_tag: None,
        }
    }

    pub fn matches(&self, pair: &AlignedPair) -> bool {
        self.split.is_none_or(|s| pair.split == Some(s))
            && self
                .domain_tag
                .as_ref()
                .is_none_or(|t| pair.domain_tag.as_ref() == Some(t))
    }
}

/// An immutable collection of aligned pairs with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pairs: Vec<AlignedPair>,
}

impl Corpus {
    pub fn new(pairs: Vec<AlignedPair>) -> Result<Self> {
        let mut seen = HashSet::new();
        for p in &pairs {
            validate_pair(p).map_err(Error::Invalid)?;
            if !seen.insert(p.id.as_str()) {
                return Err(Error::DuplicateId(p.id.clone()));
            }
        }
        Ok(Corpus { pairs })
    }

    pub fn pairs(&self) -> &[AlignedPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&AlignedPair> {
        self.pairs.iter().find(|p| p.id == id)
    }

    pub fn select(&self, filter: &PairFilter) -> Vec<&AlignedPair> {
        self.pairs.iter().filter(|p| filter.matches(p)).collect()
    }

    pub fn book_ids(&self) -> BTreeSet<&str> {
        self.pairs.iter().map(|p| p.book_id.as_str()).collect()
    }

    /// Returns a copy with split fields set from `assignment`.
    pub fn with_splits(&self, assignment: &SplitAssignment) -> Corpus {
        let pairs = self
            .pairs
            .iter()
            .map(|p| AlignedPair {
                split: assignment.assignments.get(&p.id).copied().or(p.split),
                ..p.clone()
            })
            .collect();
        Corpus { pairs }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Corpus::read(std::io::BufReader::new(file), &path.display().to_string())
    }

    /// Reads one JSON record per line; blank lines are skipped.
    pub fn read<R: BufRead>(reader: R, origin: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut seen = HashSet::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: origin.to_string(),
                line: lineno,
                message,
            };
            let pair: AlignedPair =
                serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
            validate_pair(&pair).map_err(parse_err)?;
            if !seen.insert(pair.id.clone()) {
                return Err(parse_err(format!("duplicate id {:?}", pair.id)));
            }
            pairs.push(pair);
        }
        if pairs.is_empty() {
            warn!(origin, "corpus file contains no records");
        }
        Ok(Corpus { pairs })
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for p in &self.pairs {
            serde_json::to_writer(&mut out, p)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

fn validate_pair(p: &AlignedPair) -> std::result::Result<(), String> {
    if p.id.is_empty() {
        return Err("empty id".into());
    }
    if p.source.trim().is_empty() {
        return Err(format!("{}: empty source", p.id));
    }
    if p.target.trim().is_empty() {
        return Err(format!("{}: empty target", p.id));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, book: &str) -> String {
        format!(r#"{{"id":"{id}","book_id":"{book}","source":"Le chat dort.","target":"Le chat dort."}}"#)
    }

    #[test]
    fn reads_well_formed_file() {
        let text = [line("1", "a"), line("2", "a"), line("3", "b")].join("\n");
        let c = Corpus::read(text.as_bytes(), "t").unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.book_ids().len(), 2);
    }

    #[test]
    fn duplicate_id_is_rejected() {
        let text = [line("1", "a"), line("1", "b")].join("\n");
        let err = Corpus::read(text.as_bytes(), "t").unwrap_err();
        assert!(err.to_string().contains("duplicate id"), "{err}");
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn empty_file_is_empty_corpus() {
        assert!(Corpus::read("".as_bytes(), "t").unwrap().is_empty());
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = format!("{}\n\n{{not json", line("1", "a"));
        assert!(matches!(
            Corpus::read(text.as_bytes(), "t"),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn optional_fields_round_trip() {
        let text = r#"{"id":"x","book_id":"b","source":"s","target":"t","split":"test","domain_tag":"politic"}"#;
        let c = Corpus::read(text.as_bytes(), "t").unwrap();
        assert_eq!(c.pairs()[0].split, Some(Split::Test));
        let mut buf = Vec::new();
        c.write(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim_end(), text);
    }

    #[test]
    fn filter_by_split_and_tag() {
        let mut a: AlignedPair = serde_json::from_str(&line("1", "a")).unwrap();
        a.split = Some(Split::Test);
        a.domain_tag = Some("politic".into());
        let b: AlignedPair = serde_json::from_str(&line("2", "a")).unwrap();
        let c = Corpus::new(vec![a, b]).unwrap();
        assert_eq!(c.select(&PairFilter::split(Split::Test)).len(), 1);
        let f = PairFilter {
            split: None,
            domain_tag: Some("politic".into()),
        };
        assert_eq!(c.select(&f).len(), 1);
        assert_eq!(c.select(&PairFilter::all()).len(), 2);
    }
}
