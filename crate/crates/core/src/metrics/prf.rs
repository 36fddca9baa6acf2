use serde::{Deserialize, Serialize};

/// Precision, recall and their harmonic mean, all in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn new(precision: f64, recall: f64) -> Self {
        Prf {
            precision,
            recall,
            f1: f1(precision, recall),
        }
    }

    /// Precision and recall from a match count and the two denominators.
    /// An empty denominator yields 0 for that side.
    pub fn from_counts(matched: usize, candidate_total: usize, reference_total: usize) -> Self {
        Prf::new(ratio(matched, candidate_total), ratio(matched, reference_total))
    }

    pub fn zero() -> Self {
        Prf::default()
    }
}

pub(crate) fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub(crate) fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}
