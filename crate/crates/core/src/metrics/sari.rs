use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::ngrams;

use super::prf::f1;

/// Highest n-gram order scored by SARI.
pub const SARI_MAX_ORDER: usize = 4;

/// Add, keep and delete scores for one n-gram order, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SariOrder {
    pub f_add: f64,
    pub f_keep: f64,
    pub p_del: f64,
}

impl SariOrder {
    pub fn mean(&self) -> f64 {
        (self.f_add + self.f_keep + self.p_del) / 3.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SariBreakdown {
    /// Orders 1 through 4.
    pub per_order: [SariOrder; SARI_MAX_ORDER],
    /// Mean of the per-order means, on the 0-100 scale.
    pub total: f64,
}

type GramSet<'a> = HashSet<&'a [String]>;

fn gram_set(tokens: &[String], n: usize) -> GramSet<'_> {
    ngrams(tokens, n).keys().collect()
}

// Scores one operation. `system` holds the n-grams the candidate produced for
// the operation, `gold` those the references call for. Both empty means the
// candidate matched an empty target and scores 1; any other empty denominator
// scores 0.
fn operation_f1(system: &GramSet<'_>, gold: &GramSet<'_>) -> f64 {
    if system.is_empty() && gold.is_empty() {
        return 1.0;
    }
    let hits = system.intersection(gold).count();
    let precision = if system.is_empty() {
        0.0
    } else {
        hits as f64 / system.len() as f64
    };
    let recall = if gold.is_empty() {
        0.0
    } else {
        hits as f64 / gold.len() as f64
    };
    f1(precision, recall)
}

fn operation_precision(system: &GramSet<'_>, gold: &GramSet<'_>) -> f64 {
    if system.is_empty() && gold.is_empty() {
        return 1.0;
    }
    if system.is_empty() {
        return 0.0;
    }
    system.intersection(gold).count() as f64 / system.len() as f64
}

/// SARI over n-gram types for orders 1 to 4.
///
/// For each order, with `S`, `C` the source and candidate n-gram sets and
/// `R` the union of the reference sets:
/// * add: candidate `C \ S` against reference `R \ S`, scored by F1;
/// * keep: candidate `C ∩ S` against reference `R ∩ S`, scored by F1;
/// * delete: candidate `S \ C` against reference `S \ R`, precision only.
pub fn sari(source: &[String], candidate: &[String], references: &[&[String]]) -> Result<SariBreakdown> {
    if references.is_empty() {
        return Err(Error::NoReferences);
    }
    let mut per_order = [SariOrder {
        f_add: 0.0,
        f_keep: 0.0,
        p_del: 0.0,
    }; SARI_MAX_ORDER];

    for (idx, slot) in per_order.iter_mut().enumerate() {
        let n = idx + 1;
        let src = gram_set(source, n);
        let cand = gram_set(candidate, n);
        let mut refs: GramSet<'_> = HashSet::new();
        for r in references {
            refs.extend(ngrams(r, n).keys());
        }

        let cand_add: GramSet<'_> = cand.difference(&src).copied().collect();
        let ref_add: GramSet<'_> = refs.difference(&src).copied().collect();
        let cand_keep: GramSet<'_> = cand.intersection(&src).copied().collect();
        let ref_keep: GramSet<'_> = refs.intersection(&src).copied().collect();
        let cand_del: GramSet<'_> = src.difference(&cand).copied().collect();
        let ref_del: GramSet<'_> = src.difference(&refs).copied().collect();

        *slot = SariOrder {
            f_add: operation_f1(&cand_add, &ref_add),
            f_keep: operation_f1(&cand_keep, &ref_keep),
            p_del: operation_precision(&cand_del, &ref_del),
        };
    }

    let total = 100.0 * per_order.iter().map(SariOrder::mean).sum::<f64>() / SARI_MAX_ORDER as f64;
    Ok(SariBreakdown { per_order, total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn s(text: &str) -> Vec<String> {
        text.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn no_references_is_an_error() {
        let x = s("a b");
        assert!(matches!(sari(&x, &x, &[]), Err(Error::NoReferences)));
    }

    #[test]
    fn identity_is_perfect() {
        let x = s("le chat dort bien");
        let out = sari(&x, &x, &[&x]).unwrap();
        for order in &out.per_order {
            assert_eq!(order.f_keep, 1.0);
            assert_eq!(order.p_del, 1.0);
            assert_eq!(order.f_add, 1.0);
        }
        assert_eq!(out.total, 100.0);
    }

    // Values frozen from the set-enumeration oracle in tests/metric_oracles.rs.
    #[test]
    fn disjoint_candidate_on_three_tokens() {
        let src = s("a b c");
        let cand = s("x y z");
        let out = sari(&src, &cand, &[&src]).unwrap();
        assert_relative_eq!(out.total, 25.0);
        assert!(out.total < 34.0);
    }

    #[test]
    fn candidate_equal_to_reference() {
        let src = s("a b c");
        let reference = s("a d c");
        let out = sari(&src, &reference, &[&reference]).unwrap();
        for order in &out.per_order {
            assert_eq!(order.f_add, 1.0);
            assert_eq!(order.p_del, 1.0);
        }
    }

    #[test]
    fn multiple_references_union() {
        let src = s("a b");
        let cand = s("a c");
        let r1 = s("a c");
        let r2 = s("a d");
        let out = sari(&src, &cand, &[&r1, &r2]).unwrap();
        // Unigrams: add {c} vs {c, d} -> P=1, R=1/2; keep {a} vs {a}; del {b} vs {b}.
        assert_relative_eq!(out.per_order[0].f_add, 2.0 / 3.0);
        assert_relative_eq!(out.per_order[0].f_keep, 1.0);
        assert_relative_eq!(out.per_order[0].p_del, 1.0);
    }
}
