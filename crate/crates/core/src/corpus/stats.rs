use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{compression_ratio, novelty, TextProfile};
use crate::stats::MeanStd;
use crate::text::{tokenize, vocabulary, Segmenter};

use super::AlignedPair;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidePair<T> {
    pub source: T,
    pub target: T,
}

impl SidePair<MeanStd> {
    /// Target mean minus source mean.
    pub fn delta(&self) -> f64 {
        self.target.mean - self.source.mean
    }
}

/// Corpus statistics, macro-averaged over documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_texts: usize,
    pub vocab_size: SidePair<usize>,
    pub words: SidePair<MeanStd>,
    pub sentences: SidePair<MeanStd>,
    pub sentence_length: SidePair<MeanStd>,
    pub kmre: SidePair<MeanStd>,
    pub lix: SidePair<MeanStd>,
    pub compression: MeanStd,
    pub novelty: MeanStd,
}

struct SideDoc {
    words: f64,
    sentences: f64,
    sentence_length: f64,
    kmre: f64,
    lix: f64,
}

struct DocStats {
    source: SideDoc,
    target: SideDoc,
    compression: f64,
    novelty: f64,
}

fn side_doc(id: &str, text: &str, segmenter: &Segmenter) -> Result<SideDoc> {
    let profile = TextProfile::with_segmenter(text, segmenter);
    let annotate = |e: Error| Error::invalid(format!("{id}: {e}"));
    Ok(SideDoc {
        words: profile.words as f64,
        sentences: profile.sentences as f64,
        sentence_length: profile.sentence_length().map_err(annotate)?,
        kmre: profile.kmre().map_err(annotate)?,
        lix: profile.lix().map_err(annotate)?,
    })
}

fn doc_stats(pair: &AlignedPair, segmenter: &Segmenter) -> Result<DocStats> {
    let src = tokenize(&pair.source, false);
    let tgt = tokenize(&pair.target, false);
    let annotate = |e: Error| Error::invalid(format!("{}: {e}", pair.id));
    Ok(DocStats {
        source: side_doc(&pair.id, &pair.source, segmenter)?,
        target: side_doc(&pair.id, &pair.target, segmenter)?,
        compression: compression_ratio(&src, &tgt).map_err(annotate)?,
        novelty: novelty(&src, &tgt).map_err(annotate)?,
    })
}

/// Computes per-document values in parallel, then macro-averages them
/// (mean and population standard deviation over documents).
pub fn corpus_stats(pairs: &[&AlignedPair], segmenter: &Segmenter) -> Result<CorpusStats> {
    if pairs.is_empty() {
        return Err(Error::invalid("cannot compute statistics of an empty corpus"));
    }
    let docs: Vec<DocStats> = pairs
        .par_iter()
        .map(|p| doc_stats(p, segmenter))
        .collect::<Result<_>>()?;

    let summarize = |f: &dyn Fn(&DocStats) -> f64| {
        let values: Vec<f64> = docs.iter().map(f).collect();
        MeanStd::of(&values).expect("non-empty corpus")
    };
    let sides = |f: fn(&SideDoc) -> f64| SidePair {
        source: summarize(&|d| f(&d.source)),
        target: summarize(&|d| f(&d.target)),
    };

    let sources: Vec<&str> = pairs.iter().map(|p| p.source.as_str()).collect();
    let targets: Vec<&str> = pairs.iter().map(|p| p.target.as_str()).collect();

    Ok(CorpusStats {
        n_texts: docs.len(),
        vocab_size: SidePair {
            source: vocabulary(&sources).len(),
            target: vocabulary(&targets).len(),
        },
        words: sides(|s| s.words),
        sentences: sides(|s| s.sentences),
        sentence_length: sides(|s| s.sentence_length),
        kmre: sides(|s| s.kmre),
        lix: sides(|s| s.lix),
        compression: summarize(&|d| d.compression),
        novelty: summarize(&|d| d.novelty),
    })
}

impl CorpusStats {
    /// Rows of `(label, source, target)` for display; single-valued
    /// statistics put their value in the source column.
    pub fn rows(&self) -> Vec<(&'static str, MeanStd, Option<MeanStd>)> {
        let count = |n: usize| MeanStd {
            mean: n as f64,
            std: 0.0,
        };
        vec![
            ("Dataset size", count(self.n_texts), None),
            (
                "Vocabulary size",
                count(self.vocab_size.source),
                Some(count(self.vocab_size.target)),
            ),
            ("Num. of words", self.words.source, Some(self.words.target)),
            ("Num. of sentences", self.sentences.source, Some(self.sentences.target)),
            (
                "Sentence length",
                self.sentence_length.source,
                Some(self.sentence_length.target),
            ),
            ("KMRE", self.kmre.source, Some(self.kmre.target)),
            ("LIX", self.lix.source, Some(self.lix.target)),
            ("Comp. ratio (%)", self.compression, None),
            ("Novelty (%)", self.novelty, None),
        ]
    }

    /// Human-readable aligned table.
    pub fn to_table(&self) -> String {
        let fmt_cell = |label: &str, m: MeanStd| {
            if matches!(label, "Dataset size" | "Vocabulary size") {
                format!("{}", m.mean as usize)
            } else {
                m.to_string()
            }
        };
        let mut out = format!("{:<20} {:>18} {:>18}\n", "", "source", "target");
        for (label, src, tgt) in self.rows() {
            let tgt = tgt.map(|t| fmt_cell(label, t)).unwrap_or_default();
            out.push_str(&format!("{:<20} {:>18} {:>18}\n", label, fmt_cell(label, src), tgt));
        }
        out
    }

    /// `statistic,side,mean,std` rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::invalid(e.to_string());
        w.write_record(["statistic", "side", "mean", "std"]).map_err(csv_err)?;
        for (label, src, tgt) in self.rows() {
            let side = if tgt.is_some() { "source" } else { "" };
            w.write_record([label, side, &src.mean.to_string(), &src.std.to_string()])
                .map_err(csv_err)?;
            if let Some(t) = tgt {
                w.write_record([label, "target", &t.mean.to_string(), &t.std.to_string()])
                    .map_err(csv_err)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
