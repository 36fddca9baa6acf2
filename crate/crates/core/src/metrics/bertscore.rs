use crate::error::{Error, Result};

use super::Prf;

/// Optional importance weights, one per token on each side.
#[derive(Debug, Clone, Copy)]
pub struct IdfWeights<'a> {
    pub candidate: &'a [f64],
    pub reference: &'a [f64],
}

fn normalized(vectors: &[Vec<f64>], dim: usize) -> Result<Vec<Vec<f64>>> {
    vectors
        .iter()
        .map(|v| {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::DegenerateEmbedding);
            }
            Ok(v.iter().map(|x| x / norm).collect())
        })
        .collect()
}

fn weighted_mean(values: &[f64], weights: Option<&[f64]>) -> Result<f64> {
    match weights {
        None => Ok(values.iter().sum::<f64>() / values.len() as f64),
        Some(w) => {
            if w.len() != values.len() {
                return Err(Error::invalid(format!(
                    "{} idf weights for {} tokens",
                    w.len(),
                    values.len()
                )));
            }
            if w.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
                return Err(Error::invalid("idf weights must be finite and non-negative"));
            }
            let total: f64 = w.iter().sum();
            if total <= 0.0 {
                return Err(Error::invalid("idf weights sum to zero"));
            }
            Ok(values.iter().zip(w).map(|(v, w)| v * w).sum::<f64>() / total)
        }
    }
}

/// BERTScore from per-token embeddings by greedy cosine matching.
///
/// Each token is matched to its most similar token on the other side;
/// recall averages over reference tokens and precision over candidate
/// tokens. No baseline rescaling is applied.
pub fn bertscore(
    candidate: &[Vec<f64>],
    reference: &[Vec<f64>],
    idf: Option<IdfWeights<'_>>,
) -> Result<Prf> {
    if candidate.is_empty() || reference.is_empty() {
        return Err(Error::EmptyText);
    }
    let dim = candidate[0].len();
    let cand = normalized(candidate, dim)?;
    let refs = normalized(reference, dim)?;

    let sim = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut best_for_cand = vec![f64::NEG_INFINITY; cand.len()];
    let mut best_for_ref = vec![f64::NEG_INFINITY; refs.len()];
    for (i, c) in cand.iter().enumerate() {
        for (j, r) in refs.iter().enumerate() {
            let s = sim(c, r);
            best_for_cand[i] = best_for_cand[i].max(s);
            best_for_ref[j] = best_for_ref[j].max(s);
        }
    }

    let precision = weighted_mean(&best_for_cand, idf.map(|w| w.candidate))?;
    let recall = weighted_mean(&best_for_ref, idf.map(|w| w.reference))?;
    Ok(Prf::new(precision, recall))
}
