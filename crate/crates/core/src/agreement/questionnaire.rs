use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_QUESTIONNAIRE: &str = include_str!("../../data/questionnaire.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    /// Information choices.
    #[serde(rename = "IC")]
    InformationChoices,
    /// Sentence construction.
    #[serde(rename = "SC")]
    SentenceConstruction,
    /// Word choice.
    #[serde(rename = "WC")]
    WordChoice,
    Illustrations,
    General,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::InformationChoices,
        Category::SentenceConstruction,
        Category::WordChoice,
        Category::Illustrations,
        Category::General,
    ];

    pub fn code(&self) -> &'static str {
        match self {
            Category::InformationChoices => "IC",
            Category::SentenceConstruction => "SC",
            Category::WordChoice => "WC",
            Category::Illustrations => "Illustrations",
            Category::General => "General",
        }
    }

    /// The scale every criterion of this category must use.
    pub fn expected_scale(&self) -> Scale {
        match self {
            Category::General => Scale::Likert5,
            _ => Scale::Binary,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// 0 = not respected, 1 = respected.
    Binary,
    /// Integer ratings 0 to 4.
    Likert5,
}

impl Scale {
    pub fn max(&self) -> i64 {
        match self {
            Scale::Binary => 1,
            Scale::Likert5 => 4,
        }
    }

    pub fn contains(&self, value: i64) -> bool {
        (0..=self.max()).contains(&value)
    }
}

fn default_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: String,
    pub category: Category,
    pub scale: Scale,
    pub prompt: String,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Questionnaire {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub version: String,
    pub criteria: Vec<Criterion>,
}

impl Questionnaire {
    /// The shipped evaluation form: 29 binary checklist criteria and 8
    /// General criteria on a 0-4 scale.
    pub fn default_form() -> Self {
        Questionnaire::from_toml(DEFAULT_QUESTIONNAIRE).expect("built-in questionnaire is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let parsed = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str::<Questionnaire>(&text)
                .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?,
            _ => toml::from_str::<Questionnaire>(&text)
                .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?,
        };
        parsed.validated()
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str::<Questionnaire>(text)
            .map_err(|e| Error::invalid(e.to_string()))?
            .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.criteria.is_empty() {
            return Err(Error::invalid("questionnaire has no criteria"));
        }
        let mut seen = HashSet::new();
        for c in &self.criteria {
            if c.id.trim().is_empty() {
                return Err(Error::invalid("criterion with empty id"));
            }
            if !seen.insert(c.id.as_str()) {
                return Err(Error::invalid(format!("duplicate criterion id {:?}", c.id)));
            }
            if c.scale != c.category.expected_scale() {
                return Err(Error::invalid(format!(
                    "criterion {:?}: category {} requires the {:?} scale",
                    c.id,
                    c.category,
                    c.category.expected_scale()
                )));
            }
            if !(c.weight > 0.0 && c.weight.is_finite()) {
                return Err(Error::invalid(format!(
                    "criterion {:?}: weight must be positive",
                    c.id
                )));
            }
        }
        Ok(self)
    }

    pub fn criterion(&self, id: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.id == id)
    }

    pub fn count_scale(&self, scale: Scale) -> usize {
        self.criteria.iter().filter(|c| c.scale == scale).count()
    }

    /// Categories that have at least one criterion, in canonical order.
    pub fn categories(&self) -> Vec<Category> {
        Category::ALL
            .into_iter()
            .filter(|cat| self.criteria.iter().any(|c| c.category == *cat))
            .collect()
    }
}
