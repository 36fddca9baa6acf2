use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Questionnaire, Scale};

/// Format tag of the first line of an annotation export.
pub const EXPORT_FORMAT: &str = "etr-annotations";
pub const EXPORT_VERSION: u32 = 1;

/// One annotator's answers for one item. A criterion that is absent or
/// `null` is a missing answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub annotator_id: String,
    pub item_id: String,
    pub answers: BTreeMap<String, Option<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl AnnotationRecord {
    pub fn answer(&self, criterion: &str) -> Option<i64> {
        self.answers.get(criterion).copied().flatten()
    }

    /// Answers with missing entries dropped.
    pub fn given_answers(&self) -> BTreeMap<&str, i64> {
        self.answers
            .iter()
            .filter_map(|(k, v)| v.map(|v| (k.as_str(), v)))
            .collect()
    }

    /// True when both records carry the same given answers; timestamps are ignored.
    pub fn same_answers(&self, other: &AnnotationRecord) -> bool {
        self.given_answers() == other.given_answers()
    }

    /// Checks every answer against the questionnaire and returns all problems found.
    pub fn validate(&self, questionnaire: &Questionnaire) -> std::result::Result<(), Vec<String>> {
        let mut reasons = Vec::new();
        if self.annotator_id.trim().is_empty() {
            reasons.push("empty annotator id".to_string());
        }
        if self.item_id.trim().is_empty() {
            reasons.push("empty item id".to_string());
        }
        for (id, value) in &self.answers {
            let Some(criterion) = questionnaire.criterion(id) else {
                reasons.push(format!("unknown criterion {id:?}"));
                continue;
            };
            if let Some(v) = value {
                if !criterion.scale.contains(*v) {
                    let range = match criterion.scale {
                        Scale::Binary => "0–1",
                        Scale::Likert5 => "0–4",
                    };
                    reasons.push(format!("{id}: value {v} out of range {range}"));
                }
            }
        }
        if reasons.is_empty() {
            Ok(())
        } else {
            Err(reasons)
        }
    }
}

/// First line of an annotation export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportHeader {
    pub format: String,
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub campaign_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub questionnaire: Option<Questionnaire>,
}

impl ExportHeader {
    pub fn new(campaign_id: Option<String>, questionnaire: Option<Questionnaire>) -> Self {
        ExportHeader {
            format: EXPORT_FORMAT.to_string(),
            version: EXPORT_VERSION,
            campaign_id,
            questionnaire,
        }
    }
}

/// Writes the header line followed by the records sorted by
/// `(annotator_id, item_id)`.
pub fn write_export<W: Write>(
    mut out: W,
    header: &ExportHeader,
    records: &[AnnotationRecord],
) -> std::io::Result<()> {
    serde_json::to_writer(&mut out, header)?;
    out.write_all(b"\n")?;
    let mut sorted: Vec<&AnnotationRecord> = records.iter().collect();
    sorted.sort_by(|a, b| (&a.annotator_id, &a.item_id).cmp(&(&b.annotator_id, &b.item_id)));
    for r in sorted {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads an annotation export. The header line is optional so that bare
/// record streams are accepted too.
pub fn read_export<R: BufRead>(
    reader: R,
    origin: &str,
) -> Result<(Option<ExportHeader>, Vec<AnnotationRecord>)> {
    let mut header = None;
    let mut records = Vec::new();
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
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        if value.get("format").is_some() {
            if header.is_some() || !records.is_empty() {
                return Err(parse_err("header must be the first record".into()));
            }
            let h: ExportHeader =
                serde_json::from_value(value).map_err(|e| parse_err(e.to_string()))?;
            if h.format != EXPORT_FORMAT {
                return Err(parse_err(format!("unknown export format {:?}", h.format)));
            }
            if let Some(q) = &h.questionnaire {
                q.clone().validated().map_err(|e| parse_err(e.to_string()))?;
            }
            header = Some(h);
        } else {
            records.push(serde_json::from_value(value).map_err(|e| parse_err(e.to_string()))?);
        }
    }
    Ok((header, records))
}

pub fn load_export(path: &Path) -> Result<(Option<ExportHeader>, Vec<AnnotationRecord>)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_export(std::io::BufReader::new(file), &path.display().to_string())
}
