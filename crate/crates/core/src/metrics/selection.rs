use crate::error::{Error, Result};

/// Harmonic mean of SARI, ROUGE-L F1 and BERTScore F1 (all on the same scale).
pub fn selection_score(sari: f64, rouge_l_f1: f64, bert_f1: f64) -> Result<f64> {
    let inputs = [sari, rouge_l_f1, bert_f1];
    if inputs.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
        return Err(Error::UndefinedHarmonicMean(inputs));
    }
    Ok(3.0 / inputs.iter().map(|x| 1.0 / x).sum::<f64>())
}
