use std::collections::{BTreeSet, HashMap};

use super::tokenize::tokenize;

/// Multiset of contiguous n-grams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramBag<'a> {
    n: usize,
    counts: HashMap<&'a [String], usize>,
}

impl<'a> NGramBag<'a> {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &HashMap<&'a [String], usize> {
        &self.counts
    }

    pub fn count(&self, gram: &[String]) -> usize {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    /// Sum of all multiplicities.
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &'a [String]> + '_ {
        self.counts.keys().copied()
    }
}

/// Counts every window of `n` consecutive tokens. `n` must be at least 1.
pub fn ngrams(tokens: &[String], n: usize) -> NGramBag<'_> {
    assert!(n >= 1, "n-gram order must be at least 1");
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            *counts.entry(window).or_insert(0) += 1;
        }
    }
    NGramBag { n, counts }
}

/// Distinct case-folded tokens over all texts.
pub fn vocabulary<S: AsRef<str>>(texts: &[S]) -> BTreeSet<String> {
    texts
        .iter()
        .flat_map(|t| tokenize(t.as_ref(), true).into_tokens())
        .collect()
}
