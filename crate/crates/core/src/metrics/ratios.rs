use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::text::fold_case;

/// Percentage of target token occurrences whose case-folded form is absent
/// from the source.
pub fn novelty(source: &[String], target: &[String]) -> Result<f64> {
    if target.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let seen: HashSet<String> = source.iter().map(|t| fold_case(t)).collect();
    let new = target
        .iter()
        .filter(|t| !seen.contains(&fold_case(t)))
        .count();
    Ok(100.0 * new as f64 / target.len() as f64)
}

/// Percentage reduction in word count; negative when the target is longer.
pub fn compression_ratio(source: &[String], target: &[String]) -> Result<f64> {
    if source.is_empty() {
        return Err(Error::EmptySource);
    }
    Ok(100.0 * (1.0 - target.len() as f64 / source.len() as f64))
}
