use crate::text::ngrams;

use super::Prf;

/// ROUGE-N with clipped n-gram counts.
pub fn rouge_n(candidate: &[String], reference: &[String], n: usize) -> Prf {
    let cand = ngrams(candidate, n);
    let refs = ngrams(reference, n);
    let matched: usize = cand
        .counts()
        .iter()
        .map(|(gram, &c)| c.min(refs.count(gram)))
        .sum();
    Prf::from_counts(matched, cand.total(), refs.total())
}

/// ROUGE-L over the longest common subsequence of the two token sequences.
pub fn rouge_l(candidate: &[String], reference: &[String]) -> Prf {
    let lcs = lcs_len(candidate, reference);
    Prf::from_counts(lcs, candidate.len(), reference.len())
}

/// Length of the longest common subsequence, two-row dynamic programming.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut curr = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            curr[j + 1] = if x == y {
                prev[j] + 1
            } else {
                curr[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}
