//! Scoring of system outputs against a corpus split, aggregation over
//! repeated runs and configuration selection.

mod report;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::BufRead;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::AlignedPair;
use crate::error::{Error, Result};
use crate::metrics::{
    bertscore, compression_ratio, novelty, rouge_l, rouge_n, sari, selection_score,
    EmbeddingTable, TextProfile,
};
use crate::stats::MeanStd;
use crate::text::{default_segmenter, tokenize, Segmenter};

pub use report::{emit_report, parse_report_csv, ReportFormat};

/// Embedding-table id prefix for generated outputs.
pub const CANDIDATE_PREFIX: &str = "candidate:";
/// Embedding-table id prefix for reference targets.
pub const REFERENCE_PREFIX: &str = "reference:";

/// Reported metrics, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "rouge1")]
    Rouge1,
    #[serde(rename = "rouge2")]
    Rouge2,
    #[serde(rename = "rougeL")]
    RougeL,
    #[serde(rename = "bert_f1")]
    BertF1,
    #[serde(rename = "sari")]
    Sari,
    #[serde(rename = "kmre")]
    Kmre,
    #[serde(rename = "compression")]
    Compression,
    #[serde(rename = "novelty")]
    Novelty,
}

impl Metric {
    pub const ALL: [Metric; 8] = [
        Metric::Rouge1,
        Metric::Rouge2,
        Metric::RougeL,
        Metric::BertF1,
        Metric::Sari,
        Metric::Kmre,
        Metric::Compression,
        Metric::Novelty,
    ];

    /// Column header used in reports.
    pub fn header(&self) -> &'static str {
        match self {
            Metric::Rouge1 => "ROUGE-1",
            Metric::Rouge2 => "ROUGE-2",
            Metric::RougeL => "ROUGE-L",
            Metric::BertF1 => "BERT-F1",
            Metric::Sari => "SARI",
            Metric::Kmre => "KMRE",
            Metric::Compression => "Comp. ratio",
            Metric::Novelty => "Novelty",
        }
    }

    pub fn from_header(s: &str) -> Option<Metric> {
        Metric::ALL.into_iter().find(|m| m.header() == s)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.header())
    }
}

/// Outputs of one generation run, keyed by pair id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemRun {
    pub run_id: String,
    pub model_label: String,
    pub outputs: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct OutputRecord {
    id: String,
    output: String,
}

impl SystemRun {
    pub fn load(path: &Path, run_id: &str, model_label: &str) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(
            std::io::BufReader::new(file),
            &path.display().to_string(),
            run_id,
            model_label,
        )
    }

    /// Reads `{"id": ..., "output": ...}` lines.
    pub fn read<R: BufRead>(reader: R, origin: &str, run_id: &str, model_label: &str) -> Result<Self> {
        let mut outputs = BTreeMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: origin.to_string(),
                line: idx + 1,
                message,
            };
            let rec: OutputRecord =
                serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
            if outputs.insert(rec.id.clone(), rec.output).is_some() {
                return Err(parse_err(format!("duplicate id {:?}", rec.id)));
            }
        }
        Ok(SystemRun {
            run_id: run_id.to_string(),
            model_label: model_label.to_string(),
            outputs,
        })
    }
}

/// Metric values of one document. Overlap metrics are on the 0-100 scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocScores {
    pub rouge1: f64,
    pub rouge2: f64,
    #[serde(rename = "rougeL")]
    pub rouge_l: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bert_f1: Option<f64>,
    pub sari: f64,
    /// Undefined when the output has no words.
    pub kmre: Option<f64>,
    pub compression: f64,
    /// Undefined when the output has no words.
    pub novelty: Option<f64>,
}

impl DocScores {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Rouge1 => Some(self.rouge1),
            Metric::Rouge2 => Some(self.rouge2),
            Metric::RougeL => Some(self.rouge_l),
            Metric::BertF1 => self.bert_f1,
            Metric::Sari => Some(self.sari),
            Metric::Kmre => self.kmre,
            Metric::Compression => Some(self.compression),
            Metric::Novelty => self.novelty,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub run_id: String,
    pub model_label: String,
    pub per_document: BTreeMap<String, DocScores>,
    /// Mean over documents of each metric that at least one document defines.
    pub aggregate: BTreeMap<Metric, f64>,
}

impl RunReport {
    pub fn new(run_id: &str, model_label: &str, per_document: BTreeMap<String, DocScores>) -> Self {
        let mut aggregate = BTreeMap::new();
        for metric in Metric::ALL {
            let values: Vec<f64> = per_document.values().filter_map(|d| d.get(metric)).collect();
            if let Some(m) = MeanStd::of(&values) {
                aggregate.insert(metric, m.mean);
            }
        }
        RunReport {
            run_id: run_id.to_string(),
            model_label: model_label.to_string(),
            per_document,
            aggregate,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScoreOptions<'a> {
    pub allow_partial: bool,
    pub segmenter: &'a Segmenter,
}

impl Default for ScoreOptions<'_> {
    fn default() -> Self {
        ScoreOptions {
            allow_partial: false,
            segmenter: default_segmenter(),
        }
    }
}

fn embedding_f1(table: &EmbeddingTable, id: &str) -> Result<f64> {
    let lookup = |prefix: &str| {
        let key = format!("{prefix}{id}");
        table
            .get(&key)
            .ok_or_else(|| Error::invalid(format!("missing embedding for {key:?}")))
    };
    let cand = lookup(CANDIDATE_PREFIX)?;
    let reference = lookup(REFERENCE_PREFIX)?;
    let prf = bertscore(&cand.vectors, &reference.vectors, None)
        .map_err(|e| Error::invalid(format!("{id}: {e}")))?;
    Ok(100.0 * prf.f1)
}

fn score_document(
    pair: &AlignedPair,
    output: &str,
    embeddings: Option<&EmbeddingTable>,
    segmenter: &Segmenter,
) -> Result<DocScores> {
    let annotate = |e: Error| Error::invalid(format!("{}: {e}", pair.id));
    let source = tokenize(&pair.source, true);
    let target = tokenize(&pair.target, true);
    let cand = tokenize(output, true);

    let profile = TextProfile::with_segmenter(output, segmenter);
    Ok(DocScores {
        rouge1: 100.0 * rouge_n(&cand, &target, 1).f1,
        rouge2: 100.0 * rouge_n(&cand, &target, 2).f1,
        rouge_l: 100.0 * rouge_l(&cand, &target).f1,
        bert_f1: embeddings.map(|t| embedding_f1(t, &pair.id)).transpose()?,
        sari: sari(&source, &cand, &[&target]).map_err(annotate)?.total,
        kmre: profile.kmre().ok(),
        compression: compression_ratio(&source, &cand).map_err(annotate)?,
        novelty: novelty(&source, &cand).ok(),
    })
}

/// Scores a run against the pairs of a split, each target serving as the
/// single reference. BERT-F1 is computed only when embeddings are given.
pub fn score_run(
    pairs: &[&AlignedPair],
    run: &SystemRun,
    embeddings: Option<&EmbeddingTable>,
    options: ScoreOptions<'_>,
) -> Result<RunReport> {
    let ids: HashSet<&str> = pairs.iter().map(|p| p.id.as_str()).collect();
    if let Some(stray) = run.outputs.keys().find(|id| !ids.contains(id.as_str())) {
        return Err(Error::invalid(format!(
            "output id {stray:?} is not in the evaluated split"
        )));
    }
    let mut todo = Vec::with_capacity(pairs.len());
    for p in pairs {
        match run.outputs.get(&p.id) {
            Some(out) => todo.push((*p, out.as_str())),
            None if options.allow_partial => {}
            None => return Err(Error::invalid(format!("missing output for id {:?}", p.id))),
        }
    }
    let per_document = todo
        .par_iter()
        .map(|(p, out)| Ok((p.id.clone(), score_document(p, out, embeddings, options.segmenter)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(RunReport::new(&run.run_id, &run.model_label, per_document))
}

/// Mean and population standard deviation of each metric over runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunAggregate {
    pub label: String,
    pub n_runs: usize,
    pub metrics: BTreeMap<Metric, MeanStd>,
}

pub fn aggregate_runs(label: &str, reports: &[RunReport]) -> Result<RunAggregate> {
    let first = reports
        .first()
        .ok_or_else(|| Error::invalid("no reports to aggregate"))?;
    let keys: Vec<Metric> = first.aggregate.keys().copied().collect();
    for r in &reports[1..] {
        let other: Vec<Metric> = r.aggregate.keys().copied().collect();
        if other != keys {
            return Err(Error::invalid(format!(
                "inconsistent metric sets: {} has {:?}, {} has {:?}",
                first.run_id, keys, r.run_id, other
            )));
        }
    }
    let metrics = keys
        .into_iter()
        .map(|m| {
            let values: Vec<f64> = reports.iter().map(|r| r.aggregate[&m]).collect();
            (m, MeanStd::of(&values).expect("at least one report"))
        })
        .collect();
    Ok(RunAggregate {
        label: label.to_string(),
        n_runs: reports.len(),
        metrics,
    })
}

impl RunAggregate {
    pub fn to_table(&self) -> String {
        let mut header = String::new();
        let mut values = String::new();
        for (m, v) in &self.metrics {
            header.push_str(&format!(" {:>16}", m.header()));
            values.push_str(&format!(" {:>16}", v.to_string()));
        }
        format!("{:<12}{header}\n{:<12}{values}\n", "run set", self.label)
    }

    pub fn to_csv(&self) -> Result<String> {
        let csv_err = |e: csv::Error| Error::invalid(e.to_string());
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["metric", "mean", "std", "n_runs"]).map_err(csv_err)?;
        for (m, v) in &self.metrics {
            w.write_record([m.header(), &v.mean.to_string(), &v.std.to_string(), &self.n_runs.to_string()])
                .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Anything that provides one mean value per metric.
pub trait MetricSummary {
    fn metric_mean(&self, metric: Metric) -> Option<f64>;
}

impl MetricSummary for RunReport {
    fn metric_mean(&self, metric: Metric) -> Option<f64> {
        self.aggregate.get(&metric).copied()
    }
}

impl MetricSummary for RunAggregate {
    fn metric_mean(&self, metric: Metric) -> Option<f64> {
        self.metrics.get(&metric).map(|m| m.mean)
    }
}

impl MetricSummary for BTreeMap<Metric, f64> {
    fn metric_mean(&self, metric: Metric) -> Option<f64> {
        self.get(&metric).copied()
    }
}

/// Harmonic mean of SARI, ROUGE-L and BERT-F1 for one summary.
pub fn summary_selection_score<S: MetricSummary + ?Sized>(summary: &S) -> Result<f64> {
    let get = |m: Metric| {
        summary
            .metric_mean(m)
            .ok_or_else(|| Error::invalid(format!("missing required metric {m}")))
    };
    selection_score(get(Metric::Sari)?, get(Metric::RougeL)?, get(Metric::BertF1)?)
}

/// Returns the configuration with the highest selection score and that score.
/// Ties go to the lexicographically smallest identifier.
pub fn select_best<S: MetricSummary>(candidates: &[(String, S)]) -> Result<(String, f64)> {
    let mut best: Option<(&str, f64)> = None;
    for (config, summary) in candidates {
        let score = summary_selection_score(summary)
            .map_err(|e| Error::invalid(format!("{config}: {e}")))?;
        best = match best {
            Some((b, s)) if s > score || (s == score && b <= config.as_str()) => Some((b, s)),
            _ => Some((config.as_str(), score)),
        };
    }
    best.map(|(c, s)| (c.to_string(), s))
        .ok_or_else(|| Error::invalid("no candidates to select from"))
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::from_header(s)
            .or_else(|| serde_json::from_value(serde_json::Value::String(s.to_string())).ok())
            .ok_or_else(|| Error::invalid(format!("unknown metric {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pair(id: &str, source: &str, target: &str) -> AlignedPair {
        AlignedPair {
            id: id.into(),
            book_id: "b".into(),
            source: source.into(),
            target: target.into(),
            split: None,
            domain_tag: None,
        }
    }

    fn run(outputs: &[(&str, &str)]) -> SystemRun {
        SystemRun {
            run_id: "r".into(),
            model_label: "m".into(),
            outputs: outputs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        }
    }

    fn summary(sari: f64, rouge_l: f64, bert: f64) -> BTreeMap<Metric, f64> {
        BTreeMap::from([(Metric::Sari, sari), (Metric::RougeL, rouge_l), (Metric::BertF1, bert)])
    }

    #[test]
    fn reads_run_file() {
        let text = "{\"id\":\"1\",\"output\":\"Le chat.\"}\n\n{\"id\":\"2\",\"output\":\"\"}\n";
        let r = SystemRun::read(text.as_bytes(), "t", "run", "model").unwrap();
        assert_eq!(r.outputs.len(), 2);
        let dup = "{\"id\":\"1\",\"output\":\"a\"}\n{\"id\":\"1\",\"output\":\"b\"}\n";
        assert!(SystemRun::read(dup.as_bytes(), "t", "run", "model").is_err());
    }

    #[test]
    fn missing_and_stray_outputs() {
        let a = pair("1", "Le chat dort.", "Chat dort.");
        let b = pair("2", "Le chien mange.", "Chien mange.");
        let partial = run(&[("1", "Chat dort.")]);
        assert!(score_run(&[&a, &b], &partial, None, ScoreOptions::default()).is_err());
        let opts = ScoreOptions {
            allow_partial: true,
            ..ScoreOptions::default()
        };
        let rep = score_run(&[&a, &b], &partial, None, opts).unwrap();
        assert_eq!(rep.per_document.len(), 1);
        let stray = run(&[("1", "x"), ("2", "y"), ("3", "z")]);
        assert!(score_run(&[&a, &b], &stray, None, ScoreOptions::default()).is_err());
    }

    #[test]
    fn empty_output_leaves_kmre_and_novelty_undefined() {
        let a = pair("1", "Le chat dort.", "Chat dort.");
        let b = pair("2", "Le chien mange.", "Chien mange.");
        let rep = score_run(&[&a, &b], &run(&[("1", ""), ("2", "Le chien.")]), None, ScoreOptions::default())
            .unwrap();
        assert_eq!(rep.per_document["1"].kmre, None);
        assert_eq!(rep.per_document["1"].compression, 100.0);
        assert_eq!(rep.aggregate[&Metric::Novelty], rep.per_document["2"].novelty.unwrap());
        assert!(!rep.aggregate.contains_key(&Metric::BertF1));
    }

    #[test]
    fn missing_embedding_is_an_error() {
        let a = pair("1", "Le chat dort.", "Chat dort.");
        let table = EmbeddingTable::new(2);
        let err = score_run(&[&a], &run(&[("1", "Chat.")]), Some(&table), ScoreOptions::default())
            .unwrap_err();
        assert!(err.to_string().contains("missing embedding"));
    }

    #[test]
    fn aggregate_two_runs() {
        let mk = |rl: f64| {
            let mut r = RunReport::new("x", "m", BTreeMap::new());
            r.aggregate.insert(Metric::RougeL, rl);
            r
        };
        let agg = aggregate_runs("cfg", &[mk(20.0), mk(24.0)]).unwrap();
        assert_eq!(agg.metrics[&Metric::RougeL], MeanStd { mean: 22.0, std: 2.0 });
        let mut other = mk(1.0);
        other.aggregate.insert(Metric::Sari, 1.0);
        assert!(aggregate_runs("cfg", &[mk(20.0), other]).is_err());
        assert!(aggregate_runs("cfg", &[]).is_err());
    }

    #[test]
    fn selection() {
        let single = vec![("only".to_string(), summary(10.0, 20.0, 30.0))];
        assert_eq!(select_best(&single).unwrap().0, "only");

        let cands = vec![
            ("spiky".to_string(), summary(80.0, 80.0, 20.0)),
            ("flat".to_string(), summary(50.0, 50.0, 50.0)),
        ];
        let (best, score) = select_best(&cands).unwrap();
        assert_eq!(best, "flat");
        assert_relative_eq!(score, 50.0, epsilon = 1e-12);
        assert_relative_eq!(
            summary_selection_score(&cands[0].1).unwrap(),
            40.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn selection_ties_and_errors() {
        let cands = vec![
            ("b".to_string(), summary(50.0, 50.0, 50.0)),
            ("a".to_string(), summary(50.0, 50.0, 50.0)),
        ];
        assert_eq!(select_best(&cands).unwrap().0, "a");
        let missing = vec![(
            "x".to_string(),
            BTreeMap::from([(Metric::Sari, 1.0), (Metric::RougeL, 1.0)]),
        )];
        assert!(select_best(&missing).is_err());
    }

    #[test]
    fn metric_names_round_trip() {
        for m in Metric::ALL {
            assert_eq!(m.header().parse::<Metric>().unwrap(), m);
        }
        assert_eq!("rougeL".parse::<Metric>().unwrap(), Metric::RougeL);
    }
}
