use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::CorpusStats;

/// One statistic across datasets; `None` where it does not apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub name: String,
    pub means: Vec<Option<f64>>,
    pub stds: Vec<Option<f64>>,
}

/// Statistics of several corpora side by side, with target-minus-source
/// delta rows for each corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub labels: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

pub fn compare_corpora(stats: &[(String, CorpusStats)]) -> Result<ComparisonTable> {
    if stats.len() < 2 {
        return Err(Error::invalid("comparison needs at least two corpora"));
    }
    let labels = stats.iter().map(|(l, _)| l.clone()).collect();
    let mut rows = Vec::new();

    let template = stats[0].1.rows();
    for (idx, (label, _, target)) in template.iter().enumerate() {
        let collect = |pick: &dyn Fn(&CorpusStats) -> (f64, f64)| {
            let (means, stds) = stats
                .iter()
                .map(|(_, s)| {
                    let (m, d) = pick(s);
                    (Some(m), Some(d))
                })
                .unzip();
            (means, stds)
        };
        let source_name = if target.is_some() {
            format!("{label} (source)")
        } else {
            label.to_string()
        };
        let (means, stds) = collect(&|s| {
            let row = &s.rows()[idx];
            (row.1.mean, row.1.std)
        });
        rows.push(ComparisonRow {
            name: source_name,
            means,
            stds,
        });
        if target.is_some() {
            let (means, stds) = collect(&|s| {
                let t = s.rows()[idx].2.expect("paired row");
                (t.mean, t.std)
            });
            rows.push(ComparisonRow {
                name: format!("{label} (target)"),
                means,
                stds,
            });
        }
    }

    type Delta = (&'static str, fn(&CorpusStats) -> f64);
    let deltas: [Delta; 4] = [
        ("Δ Num. of words", |s| s.words.delta()),
        ("Δ Num. of sentences", |s| s.sentences.delta()),
        ("Δ KMRE", |s| s.kmre.delta()),
        ("Δ LIX", |s| s.lix.delta()),
    ];
    for (name, f) in deltas {
        rows.push(ComparisonRow {
            name: name.to_string(),
            means: stats.iter().map(|(_, s)| Some(f(s))).collect(),
            stds: vec![None; stats.len()],
        });
    }

    Ok(ComparisonTable { labels, rows })
}

impl ComparisonTable {
    pub fn row(&self, name: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Per-row difference of the means in column `b` minus column `a`.
    pub fn column_delta(&self, a: usize, b: usize) -> Vec<(String, Option<f64>)> {
        self.rows
            .iter()
            .map(|r| {
                let d = match (r.means.get(a).copied().flatten(), r.means.get(b).copied().flatten()) {
                    (Some(x), Some(y)) => Some(y - x),
                    _ => None,
                };
                (r.name.clone(), d)
            })
            .collect()
    }

    pub fn to_table(&self) -> String {
        let width = self.rows.iter().map(|r| r.name.chars().count()).max().unwrap_or(0).max(8);
        let mut out = format!("{:<width$}", "");
        for l in &self.labels {
            out.push_str(&format!(" {:>20}", l));
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{:<width$}", r.name));
            for (m, s) in r.means.iter().zip(&r.stds) {
                let cell = match (m, s) {
                    (Some(m), Some(s)) if *s != 0.0 => format!("{m:.2} ± {s:.2}"),
                    (Some(m), _) if m.fract() == 0.0 && !r.name.starts_with('Δ') => format!("{m}"),
                    (Some(m), _) => format!("{m:+.2}"),
                    (None, _) => "–".to_string(),
                };
                out.push_str(&format!(" {:>20}", cell));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let csv_err = |e: csv::Error| Error::invalid(e.to_string());
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["statistic".to_string()];
        for l in &self.labels {
            header.push(format!("{l} mean"));
            header.push(format!("{l} std"));
        }
        w.write_record(&header).map_err(csv_err)?;
        let cell = |v: &Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            let mut rec = vec![r.name.clone()];
            for (m, s) in r.means.iter().zip(&r.stds) {
                rec.push(cell(m));
                rec.push(cell(s));
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
