use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::{DocScores, Metric, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" | "aligned-table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::invalid(format!("unknown format {other:?}"))),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::invalid(e.to_string())
}

/// Renders a run report. Columns always follow [`Metric::ALL`]; missing
/// values are left blank. Output depends only on the report contents.
pub fn emit_report(report: &RunReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::invalid(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["id"];
            header.extend(Metric::ALL.iter().map(Metric::header));
            w.write_record(&header).map_err(csv_err)?;
            for (id, doc) in &report.per_document {
                let mut rec = vec![id.clone()];
                rec.extend(
                    Metric::ALL
                        .iter()
                        .map(|&m| doc.get(m).map(|v| v.to_string()).unwrap_or_default()),
                );
                w.write_record(&rec).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        ReportFormat::Table => {
            let id_width = report
                .per_document
                .keys()
                .map(|k| k.chars().count())
                .max()
                .unwrap_or(0)
                .max(4);
            let mut out = format!("{:<id_width$}", "id");
            for m in Metric::ALL {
                out.push_str(&format!(" {:>12}", m.header()));
            }
            out.push('\n');
            let cell = |v: Option<f64>| v.map(|v| format!("{v:.2}")).unwrap_or_else(|| "–".into());
            for (id, doc) in &report.per_document {
                out.push_str(&format!("{:<id_width$}", id));
                for m in Metric::ALL {
                    out.push_str(&format!(" {:>12}", cell(doc.get(m))));
                }
                out.push('\n');
            }
            if !report.per_document.is_empty() {
                out.push_str(&format!("{:<id_width$}", "mean"));
                for m in Metric::ALL {
                    out.push_str(&format!(" {:>12}", cell(report.aggregate.get(&m).copied())));
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}

/// Reads back the per-document rows written by the CSV format.
pub fn parse_report_csv(text: &str) -> Result<BTreeMap<String, DocScores>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_err)?.clone();
    let expected: Vec<&str> = std::iter::once("id")
        .chain(Metric::ALL.iter().map(Metric::header))
        .collect();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::invalid(format!("unexpected report header {headers:?}")));
    }
    let mut out = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_err)?;
        let field = |m: Metric| -> Result<Option<f64>> {
            let idx = 1 + Metric::ALL.iter().position(|&x| x == m).expect("known metric");
            let raw = rec.get(idx).unwrap_or("");
            if raw.is_empty() {
                Ok(None)
            } else {
                raw.parse()
                    .map(Some)
                    .map_err(|e| Error::invalid(format!("bad value {raw:?}: {e}")))
            }
        };
        let required = |m: Metric| field(m)?.ok_or_else(|| Error::invalid(format!("missing {m}")));
        out.insert(
            rec.get(0).unwrap_or("").to_string(),
            DocScores {
                rouge1: required(Metric::Rouge1)?,
                rouge2: required(Metric::Rouge2)?,
                rouge_l: required(Metric::RougeL)?,
                bert_f1: field(Metric::BertF1)?,
                sari: required(Metric::Sari)?,
                kmre: field(Metric::Kmre)?,
                compression: required(Metric::Compression)?,
                novelty: field(Metric::Novelty)?,
            },
        );
    }
    Ok(out)
}
