#![allow(dead_code)]

use std::collections::BTreeMap;

use etr_core::agreement::{AnnotationRecord, Questionnaire};
use etr_service::{CampaignSpec, DatasetTag, PoolItem, SamplingPolicy};

pub fn pool(models: &[&str], in_domain: usize, out_domain: usize) -> Vec<PoolItem> {
    let mut out = Vec::new();
    for m in models {
        for (tag, n) in [(DatasetTag::EtrFr, in_domain), (DatasetTag::EtrFrPolitic, out_domain)] {
            for i in 0..n {
                out.push(PoolItem {
                    item_id: format!("{m}-{tag}-{i:02}"),
                    model_label: m.to_string(),
                    dataset_tag: tag,
                    source: format!("Texte source numéro {i}."),
                    candidate: format!("Texte facile {i}."),
                });
            }
        }
    }
    out
}

pub fn spec(id: &str, models: &[&str], roster: &[&str]) -> CampaignSpec {
    CampaignSpec {
        campaign_id: Some(id.to_string()),
        questionnaire: None,
        pool: pool(models, 20, 10),
        roster: roster.iter().map(|s| s.to_string()).collect(),
        policy: SamplingPolicy::with_seed(7),
    }
}

/// A full answer set whose values depend on `salt`.
pub fn answers(q: &Questionnaire, salt: usize) -> BTreeMap<String, Option<i64>> {
    q.criteria
        .iter()
        .enumerate()
        .map(|(i, c)| (c.id.clone(), Some(((i + salt) as i64) % (c.scale.max() + 1))))
        .collect()
}

pub fn record(q: &Questionnaire, annotator: &str, item: &str, salt: usize) -> AnnotationRecord {
    AnnotationRecord {
        annotator_id: annotator.to_string(),
        item_id: item.to_string(),
        answers: answers(q, salt),
        timestamp: None,
    }
}
