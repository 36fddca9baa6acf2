use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use etr_core::agreement::Questionnaire;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DatasetTag {
    #[serde(rename = "etr-fr")]
    EtrFr,
    #[serde(rename = "etr-fr-politic")]
    EtrFrPolitic,
}

impl DatasetTag {
    pub const ALL: [DatasetTag; 2] = [DatasetTag::EtrFr, DatasetTag::EtrFrPolitic];

    pub fn as_str(&self) -> &'static str {
        match self {
            DatasetTag::EtrFr => "etr-fr",
            DatasetTag::EtrFrPolitic => "etr-fr-politic",
        }
    }
}

impl fmt::Display for DatasetTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One system output that may be shown to annotators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolItem {
    pub item_id: String,
    pub model_label: String,
    pub dataset_tag: DatasetTag,
    pub source: String,
    pub candidate: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PresentationOrder {
    /// Seeded shuffle of the whole assignment.
    #[default]
    Shuffled,
    /// All in-domain items first, then out-of-domain, each by item id.
    Blocked,
}

fn default_in_domain() -> usize {
    20
}

fn default_out_domain() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPolicy {
    #[serde(default = "default_in_domain")]
    pub per_model_in_domain: usize,
    #[serde(default = "default_out_domain")]
    pub per_model_out_domain: usize,
    pub seed: u64,
    #[serde(default)]
    pub order: PresentationOrder,
}

impl SamplingPolicy {
    pub fn with_seed(seed: u64) -> Self {
        SamplingPolicy {
            per_model_in_domain: default_in_domain(),
            per_model_out_domain: default_out_domain(),
            seed,
            order: PresentationOrder::default(),
        }
    }

    fn count(&self, tag: DatasetTag) -> usize {
        match tag {
            DatasetTag::EtrFr => self.per_model_in_domain,
            DatasetTag::EtrFrPolitic => self.per_model_out_domain,
        }
    }
}

/// Body of `POST /campaigns`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignSpec {
    #[serde(default)]
    pub campaign_id: Option<String>,
    #[serde(default)]
    pub questionnaire: Option<Questionnaire>,
    pub pool: Vec<PoolItem>,
    pub roster: Vec<String>,
    pub policy: SamplingPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotator {
    pub id: String,
    pub token: String,
}

/// A persisted campaign. The assignment is shared by every annotator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub campaign_id: String,
    pub questionnaire: Questionnaire,
    pub pool: Vec<PoolItem>,
    pub roster: Vec<Annotator>,
    pub policy: SamplingPolicy,
    pub assignment: Vec<String>,
}

/// What an annotator sees: no model label, no dataset tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlindItem {
    pub item_id: String,
    pub source: String,
    pub candidate: String,
}

pub(crate) fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 128
        && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.')
        && !id.starts_with('.')
}

impl Campaign {
    /// Validates the spec, samples the assignment and issues one token per
    /// annotator from `issue_token`.
    pub fn build(spec: CampaignSpec, campaign_id: String, mut issue_token: impl FnMut() -> String) -> Result<Campaign> {
        if !valid_id(&campaign_id) {
            return Err(ServiceError::Invalid(format!("campaign id {campaign_id:?} must be [A-Za-z0-9._-]")));
        }
        let questionnaire = spec.questionnaire.unwrap_or_else(Questionnaire::default_form).validated()?;
        if spec.roster.is_empty() {
            return Err(ServiceError::Invalid("empty roster".into()));
        }
        let mut seen = BTreeSet::new();
        for a in &spec.roster {
            if a.trim().is_empty() {
                return Err(ServiceError::Invalid("empty annotator id".into()));
            }
            if !seen.insert(a.as_str()) {
                return Err(ServiceError::Invalid(format!("duplicate annotator {a:?}")));
            }
        }
        let mut ids = BTreeSet::new();
        for item in &spec.pool {
            if item.item_id.trim().is_empty() {
                return Err(ServiceError::Invalid("empty item id in pool".into()));
            }
            if !ids.insert(item.item_id.as_str()) {
                return Err(ServiceError::Invalid(format!("duplicate item {:?} in pool", item.item_id)));
            }
        }
        let assignment = sample(&spec.pool, &spec.policy)?;
        let roster = spec
            .roster
            .into_iter()
            .map(|id| Annotator { id, token: issue_token() })
            .collect();
        Ok(Campaign {
            campaign_id,
            questionnaire,
            pool: spec.pool,
            roster,
            policy: spec.policy,
            assignment,
        })
    }

    pub fn annotator(&self, id: &str) -> Option<&Annotator> {
        self.roster.iter().find(|a| a.id == id)
    }

    pub fn annotator_for_token(&self, token: &str) -> Option<&str> {
        self.roster
            .iter()
            .find(|a| constant_time_eq(a.token.as_bytes(), token.as_bytes()))
            .map(|a| a.id.as_str())
    }

    pub fn is_assigned(&self, item_id: &str) -> bool {
        self.assignment.iter().any(|i| i == item_id)
    }

    pub fn pool_item(&self, item_id: &str) -> Option<&PoolItem> {
        self.pool.iter().find(|p| p.item_id == item_id)
    }

    /// The assignment in presentation order, stripped of model labels.
    pub fn blind_items(&self) -> Vec<BlindItem> {
        self.assignment
            .iter()
            .filter_map(|id| self.pool_item(id))
            .map(|p| BlindItem {
                item_id: p.item_id.clone(),
                source: p.source.clone(),
                candidate: p.candidate.clone(),
            })
            .collect()
    }
}

pub(crate) fn constant_time_eq(a: &[u8], b: &[u8]) -> bool {
    a.len() == b.len() && a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y)) == 0
}

/// Draws the policy counts per (model, tag) from the pool. Groups are visited
/// in sorted order and item ids are sorted inside each group, so the result
/// depends only on the pool contents and the seed.
pub fn sample(pool: &[PoolItem], policy: &SamplingPolicy) -> Result<Vec<String>> {
    let mut groups: BTreeMap<(&str, DatasetTag), Vec<&str>> = BTreeMap::new();
    let models: BTreeSet<&str> = pool.iter().map(|p| p.model_label.as_str()).collect();
    for p in pool {
        groups.entry((p.model_label.as_str(), p.dataset_tag)).or_default().push(&p.item_id);
    }
    if models.is_empty() {
        return Err(ServiceError::Invalid("empty pool".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let mut chosen: Vec<(DatasetTag, String)> = Vec::new();
    for model in models {
        for tag in DatasetTag::ALL {
            let needed = policy.count(tag);
            let mut ids = groups.remove(&(model, tag)).unwrap_or_default();
            if ids.len() < needed {
                return Err(ServiceError::InsufficientPool {
                    model: model.to_string(),
                    tag: tag.to_string(),
                    needed,
                    available: ids.len(),
                });
            }
            ids.sort_unstable();
            let mut picks = rand::seq::index::sample(&mut rng, ids.len(), needed).into_vec();
            picks.sort_unstable();
            chosen.extend(picks.into_iter().map(|i| (tag, ids[i].to_string())));
        }
    }
    match policy.order {
        PresentationOrder::Shuffled => chosen.shuffle(&mut rng),
        PresentationOrder::Blocked => chosen.sort(),
    }
    Ok(chosen.into_iter().map(|(_, id)| id).collect())
}
