use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::Quartiles;

use super::{alpha, AnnotationRecord, Category, Criterion, Level, Questionnaire, ReliabilityMatrix, Scale};

// Records indexed by (annotator, item), after validation and duplicate checks.
struct Indexed<'a> {
    annotators: Vec<String>,
    items: Vec<String>,
    by_cell: HashMap<(&'a str, &'a str), &'a AnnotationRecord>,
}

fn index_records<'a>(records: &'a [AnnotationRecord], q: &Questionnaire) -> Result<Indexed<'a>> {
    let mut annotators = BTreeSet::new();
    let mut items = BTreeSet::new();
    let mut by_cell = HashMap::new();
    for r in records {
        if let Err(reasons) = r.validate(q) {
            return Err(Error::invalid(format!(
                "record ({}, {}): {}",
                r.annotator_id,
                r.item_id,
                reasons.join("; ")
            )));
        }
        if by_cell.insert((r.annotator_id.as_str(), r.item_id.as_str()), r).is_some() {
            return Err(Error::DuplicateId(format!("{}/{}", r.annotator_id, r.item_id)));
        }
        annotators.insert(r.annotator_id.clone());
        items.insert(r.item_id.clone());
    }
    Ok(Indexed {
        annotators: annotators.into_iter().collect(),
        items: items.into_iter().collect(),
        by_cell,
    })
}

impl Indexed<'_> {
    fn matrix(&self, units: Vec<String>, cell: impl Fn(&str, usize) -> Option<f64>) -> ReliabilityMatrix {
        let cells = self
            .annotators
            .iter()
            .map(|a| (0..units.len()).map(|u| cell(a, u)).collect())
            .collect();
        ReliabilityMatrix {
            annotators: self.annotators.clone(),
            units,
            cells,
        }
    }

    fn answer(&self, annotator: &str, item: &str, criterion: &str) -> Option<i64> {
        self.by_cell
            .get(&(annotator, item))
            .and_then(|r| r.answer(criterion))
    }
}

fn default_level(c: &Criterion) -> Level {
    match c.scale {
        Scale::Binary => Level::Nominal,
        Scale::Likert5 => Level::Interval,
    }
}

/// Reliability matrix of one criterion: annotators by items, both sorted.
pub fn criterion_matrix(records: &[AnnotationRecord], q: &Questionnaire, criterion_id: &str) -> Result<ReliabilityMatrix> {
    if q.criterion(criterion_id).is_none() {
        return Err(Error::invalid(format!("unknown criterion {criterion_id:?}")));
    }
    let idx = index_records(records, q)?;
    Ok(idx.matrix(idx.items.clone(), |a, u| {
        idx.answer(a, &idx.items[u], criterion_id).map(|v| v as f64)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionAlpha {
    pub criterion_id: String,
    pub category: Category,
    pub level: Level,
    /// `None` when alpha is undefined for this criterion.
    pub alpha: Option<f64>,
    pub pairable_units: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionAlphas {
    pub per_criterion: Vec<CriterionAlpha>,
    /// Mean over the criteria with a defined alpha.
    pub macro_alpha: Option<f64>,
}

impl CriterionAlphas {
    pub fn defined(&self) -> usize {
        self.per_criterion.iter().filter(|c| c.alpha.is_some()).count()
    }

    pub fn get(&self, criterion_id: &str) -> Option<&CriterionAlpha> {
        self.per_criterion.iter().find(|c| c.criterion_id == criterion_id)
    }
}

fn macro_mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    Some(mean.clamp(sorted[0], sorted[sorted.len() - 1]))
}

/// Alpha for every criterion of the questionnaire, with items as units.
/// Binary criteria use the nominal level and Likert criteria the interval
/// level unless `level` overrides both. Criteria without enough data get
/// `None` and are left out of the macro average.
pub fn per_criterion_alpha(records: &[AnnotationRecord], q: &Questionnaire, level: Option<Level>) -> Result<CriterionAlphas> {
    let idx = index_records(records, q)?;
    if idx.annotators.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} annotator(s), at least two are needed",
            idx.annotators.len()
        )));
    }
    let per_criterion: Vec<CriterionAlpha> = q
        .criteria
        .par_iter()
        .map(|c| {
            let matrix = idx.matrix(idx.items.clone(), |a, u| {
                idx.answer(a, &idx.items[u], &c.id).map(|v| v as f64)
            });
            let level = level.unwrap_or_else(|| default_level(c));
            let value = match alpha(&matrix, level) {
                Ok(v) => Some(v),
                Err(Error::InsufficientData(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(CriterionAlpha {
                criterion_id: c.id.clone(),
                category: c.category,
                level,
                alpha: value,
                pairable_units: matrix.pairable_units(),
            })
        })
        .collect::<Result<_>>()?;
    let defined: Vec<f64> = per_criterion.iter().filter_map(|c| c.alpha).collect();
    Ok(CriterionAlphas {
        macro_alpha: macro_mean(&defined),
        per_criterion,
    })
}

fn binarize(c: &Criterion, value: i64, threshold: i64) -> f64 {
    match c.scale {
        Scale::Binary => value as f64,
        Scale::Likert5 => {
            if value >= threshold {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Annotators by `item::category` units. Likert answers become 1 when they
/// reach `threshold`; each cell is the weighted mean of the binary answers
/// given in that category, or missing when none were given.
pub fn binarize_and_aggregate(records: &[AnnotationRecord], q: &Questionnaire, threshold: i64) -> Result<ReliabilityMatrix> {
    if !(1..=4).contains(&threshold) {
        return Err(Error::invalid(format!("binarization threshold {threshold} is not in 1..=4")));
    }
    let idx = index_records(records, q)?;
    let categories = q.categories();
    let mut units = Vec::new();
    let mut keys = Vec::new();
    for item in &idx.items {
        for cat in &categories {
            units.push(format!("{item}::{cat}"));
            keys.push((item.as_str(), *cat));
        }
    }
    Ok(idx.matrix(units, |a, u| {
        let (item, cat) = keys[u];
        let mut num = 0.0;
        let mut den = 0.0;
        for c in q.criteria.iter().filter(|c| c.category == cat) {
            if let Some(v) = idx.answer(a, item, &c.id) {
                num += c.weight * binarize(c, v, threshold);
                den += c.weight;
            }
        }
        (den > 0.0).then(|| num / den)
    }))
}

/// Nominal alpha on the binarized category aggregates cut at 0.5.
pub fn binarized_alpha(records: &[AnnotationRecord], q: &Questionnaire, threshold: i64) -> Result<f64> {
    let matrix = binarize_and_aggregate(records, q, threshold)?;
    alpha(&matrix.thresholded(0.5), Level::Nominal)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    /// Category code, or the criterion id for General criteria.
    pub label: String,
    pub category: Category,
    pub summary: Option<Quartiles>,
}

/// Dispersion of the answers per ETR category and per General criterion.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CategoryScores {
    pub rows: Vec<ScoreRow>,
}

const SCORE_COLUMNS: [&str; 8] = ["n", "mean", "min", "q1", "median", "q3", "max", "iqr"];

impl CategoryScores {
    pub fn row(&self, label: &str) -> Option<&ScoreRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    fn cells(summary: &Option<Quartiles>) -> Vec<Option<f64>> {
        match summary {
            Some(s) => vec![
                Some(s.n as f64),
                Some(s.mean),
                Some(s.min),
                Some(s.q1),
                Some(s.median),
                Some(s.q3),
                Some(s.max),
                Some(s.iqr()),
            ],
            None => {
                let mut v = vec![None; SCORE_COLUMNS.len()];
                v[0] = Some(0.0);
                v
            }
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("label,category,{}\n", SCORE_COLUMNS.join(","));
        for r in &self.rows {
            let cells: Vec<String> = Self::cells(&r.summary)
                .into_iter()
                .map(|c| c.map(|v| v.to_string()).unwrap_or_default())
                .collect();
            let _ = writeln!(out, "{},{},{}", r.label, r.category, cells.join(","));
        }
        out
    }

    pub fn to_table(&self) -> String {
        let width = self.rows.iter().map(|r| r.label.chars().count()).max().unwrap_or(0).max(8);
        let mut out = format!("{:<width$} {:<13}", "label", "category");
        for c in SCORE_COLUMNS {
            let _ = write!(out, " {c:>7}");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{:<width$} {:<13}", r.label, r.category.code());
            for (i, c) in Self::cells(&r.summary).into_iter().enumerate() {
                let cell = match c {
                    Some(v) if i == 0 => format!("{v:.0}"),
                    Some(v) => format!("{v:.2}"),
                    None => "–".into(),
                };
                let _ = write!(out, " {cell:>7}");
            }
            out.push('\n');
        }
        out
    }
}

/// Per-category summary over all (annotator, item) pairs. For IC, SC, WC and
/// Illustrations each pair contributes the weighted mean of its answers in
/// the category; General criteria are summarised one by one.
pub fn category_scores(records: &[AnnotationRecord], q: &Questionnaire) -> Result<CategoryScores> {
    let refs: Vec<&AnnotationRecord> = records.iter().collect();
    Ok(scores_of(&refs, q))
}

/// [`category_scores`] computed separately for each group. Records for which
/// `group_of` returns `None` are dropped.
pub fn category_scores_by<F>(records: &[AnnotationRecord], q: &Questionnaire, group_of: F) -> Result<BTreeMap<String, CategoryScores>>
where
    F: Fn(&AnnotationRecord) -> Option<String>,
{
    index_records(records, q)?;
    let mut groups: BTreeMap<String, Vec<&AnnotationRecord>> = BTreeMap::new();
    for r in records {
        if let Some(g) = group_of(r) {
            groups.entry(g).or_default().push(r);
        }
    }
    Ok(groups.into_iter().map(|(g, rs)| (g, scores_of(&rs, q))).collect())
}

fn scores_of(records: &[&AnnotationRecord], q: &Questionnaire) -> CategoryScores {
    let mut rows = Vec::new();
    for cat in q.categories() {
        let criteria: Vec<&Criterion> = q.criteria.iter().filter(|c| c.category == cat).collect();
        if cat == Category::General {
            for c in criteria {
                let values: Vec<f64> = records
                    .iter()
                    .filter_map(|r| r.answer(&c.id))
                    .map(|v| v as f64)
                    .collect();
                rows.push(ScoreRow {
                    label: c.id.clone(),
                    category: cat,
                    summary: Quartiles::of(&values),
                });
            }
            continue;
        }
        let values: Vec<f64> = records
            .iter()
            .filter_map(|r| {
                let mut num = 0.0;
                let mut den = 0.0;
                for c in &criteria {
                    if let Some(v) = r.answer(&c.id) {
                        num += c.weight * v as f64;
                        den += c.weight;
                    }
                }
                (den > 0.0).then(|| num / den)
            })
            .collect();
        rows.push(ScoreRow {
            label: cat.code().to_string(),
            category: cat,
            summary: Quartiles::of(&values),
        });
    }
    CategoryScores { rows }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarizedAlpha {
    pub threshold: i64,
    pub alpha: Option<f64>,
}

/// Everything the `agreement` command and the campaign service report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub annotators: usize,
    pub items: usize,
    /// Level forced on every criterion, if any.
    pub level: Option<Level>,
    pub criteria: CriterionAlphas,
    pub binarized: Option<BinarizedAlpha>,
    pub category_scores: CategoryScores,
}

pub fn agreement_report(
    records: &[AnnotationRecord],
    q: &Questionnaire,
    level: Option<Level>,
    threshold: Option<i64>,
) -> Result<AgreementReport> {
    let idx = index_records(records, q)?;
    let criteria = per_criterion_alpha(records, q, level)?;
    if criteria.per_criterion.iter().all(|c| c.pairable_units == 0) {
        return Err(Error::InsufficientData("no item was rated by two annotators".into()));
    }
    let binarized = match threshold {
        Some(t) => Some(BinarizedAlpha {
            threshold: t,
            alpha: match binarized_alpha(records, q, t) {
                Ok(v) => Some(v),
                Err(Error::InsufficientData(_)) => None,
                Err(e) => return Err(e),
            },
        }),
        None => None,
    };
    Ok(AgreementReport {
        annotators: idx.annotators.len(),
        items: idx.items.len(),
        level,
        criteria,
        binarized,
        category_scores: category_scores(records, q)?,
    })
}

fn fmt_alpha(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.3}")).unwrap_or_else(|| "undefined".into())
}

impl AgreementReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("criterion,category,level,alpha,pairable_units\n");
        for c in &self.criteria.per_criterion {
            let a = c.alpha.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{},{}", c.criterion_id, c.category, c.level, a, c.pairable_units);
        }
        let m = self.criteria.macro_alpha.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(out, "macro,,,{m},");
        if let Some(b) = &self.binarized {
            let a = b.alpha.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(out, "binarized@{},,nominal,{a},", b.threshold);
        }
        out
    }

    pub fn to_table(&self) -> String {
        let width = self
            .criteria
            .per_criterion
            .iter()
            .map(|c| c.criterion_id.chars().count())
            .max()
            .unwrap_or(0)
            .max(9);
        let mut out = format!("{:<width$} {:<13} {:<8} {:>9} {:>6}\n", "criterion", "category", "level", "alpha", "units");
        for c in &self.criteria.per_criterion {
            let _ = writeln!(
                out,
                "{:<width$} {:<13} {:<8} {:>9} {:>6}",
                c.criterion_id,
                c.category.code(),
                c.level.to_string(),
                fmt_alpha(c.alpha),
                c.pairable_units
            );
        }
        let _ = writeln!(
            out,
            "\nannotators: {}  items: {}\nmacro alpha over {}/{} criteria: {}",
            self.annotators,
            self.items,
            self.criteria.defined(),
            self.criteria.per_criterion.len(),
            fmt_alpha(self.criteria.macro_alpha)
        );
        if let Some(b) = &self.binarized {
            let _ = writeln!(out, "binarized aggregate alpha (threshold {}): {}", b.threshold, fmt_alpha(b.alpha));
        }
        out.push('\n');
        out.push_str(&self.category_scores.to_table());
        out
    }
}
