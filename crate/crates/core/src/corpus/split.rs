use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Corpus, Split};

/// Share of non-test pairs assigned to validation when not overridden.
pub const DEFAULT_VAL_FRACTION: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub assignments: BTreeMap<String, Split>,
    pub seed: u64,
    pub test_books: Vec<String>,
}

impl SplitAssignment {
    pub fn count(&self, split: Split) -> usize {
        self.assignments.values().filter(|&&s| s == split).count()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })
    }
}

/// Reserves whole books for test and splits the remaining pairs of each book
/// between train and validation.
///
/// The validation total is `round(val_fraction * non_test_pairs)`, shared
/// between books by largest remainder so that every book contributes its
/// proportional share. Which pairs go to validation is decided by a seeded
/// shuffle of each book's ids.
pub fn stratified_split(
    corpus: &Corpus,
    test_books: &[String],
    val_fraction: f64,
    seed: u64,
) -> Result<SplitAssignment> {
    if !(val_fraction > 0.0 && val_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "validation fraction must be in (0, 1), got {val_fraction}"
        )));
    }
    let known = corpus.book_ids();
    let test: BTreeSet<&str> = test_books.iter().map(String::as_str).collect();
    if let Some(unknown) = test.iter().find(|b| !known.contains(*b)) {
        return Err(Error::invalid(format!("unknown book id {unknown:?}")));
    }

    let mut assignments = BTreeMap::new();
    let mut by_book: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for p in corpus.pairs() {
        if test.contains(p.book_id.as_str()) {
            assignments.insert(p.id.clone(), Split::Test);
        } else {
            by_book.entry(&p.book_id).or_default().push(&p.id);
        }
    }

    let remaining: usize = by_book.values().map(Vec::len).sum();
    let target_total = (val_fraction * remaining as f64).round() as usize;
    let mut quotas: Vec<(&str, usize, f64)> = by_book
        .iter()
        .map(|(book, ids)| {
            let q = val_fraction * ids.len() as f64;
            (*book, q.floor() as usize, q - q.floor())
        })
        .collect();
    let assigned: usize = quotas.iter().map(|q| q.1).sum();
    let mut order: Vec<usize> = (0..quotas.len()).collect();
    order.sort_by(|&a, &b| quotas[b].2.total_cmp(&quotas[a].2).then(quotas[a].0.cmp(quotas[b].0)));
    for &i in order.iter().take(target_total.saturating_sub(assigned)) {
        quotas[i].1 += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (book, n_val, _) in quotas {
        let mut ids = by_book[book].clone();
        ids.sort_unstable();
        ids.shuffle(&mut rng);
        for (k, id) in ids.into_iter().enumerate() {
            let split = if k < n_val { Split::Validation } else { Split::Train };
            assignments.insert(id.to_string(), split);
        }
    }

    Ok(SplitAssignment {
        assignments,
        seed,
        test_books: test.into_iter().map(String::from).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::AlignedPair;

    fn corpus(books: &[(&str, usize)]) -> Corpus {
        let mut pairs = Vec::new();
        for (book, n) in books {
            for i in 0..*n {
                pairs.push(AlignedPair {
                    id: format!("{book}-{i:03}"),
                    book_id: book.to_string(),
                    source: "Le chat dort.".into(),
                    target: "Chat dort.".into(),
                    split: None,
                    domain_tag: None,
                });
            }
        }
        Corpus::new(pairs).unwrap()
    }

    #[test]
    fn exact_half_split() {
        let c = corpus(&[("a", 4)]);
        let s = stratified_split(&c, &[], 0.5, 7).unwrap();
        assert_eq!(s.count(Split::Train), 2);
        assert_eq!(s.count(Split::Validation), 2);
    }

    #[test]
    fn deterministic_for_seed() {
        let c = corpus(&[("a", 20), ("b", 13), ("c", 9)]);
        let books = vec!["c".to_string()];
        let x = stratified_split(&c, &books, 0.2, 42).unwrap();
        let y = stratified_split(&c, &books, 0.2, 42).unwrap();
        assert_eq!(x, y);
        let z = stratified_split(&c, &books, 0.2, 43).unwrap();
        assert_ne!(x.assignments, z.assignments);
    }

    #[test]
    fn test_books_never_leak() {
        let c = corpus(&[("a", 10), ("b", 10), ("t", 5)]);
        let s = stratified_split(&c, &["t".into()], 0.3, 1).unwrap();
        assert_eq!(s.assignments.len(), 25);
        for p in c.pairs() {
            assert_eq!(p.book_id == "t", s.assignments[&p.id] == Split::Test);
        }
        assert_eq!(s.count(Split::Validation), 6);
    }

    #[test]
    fn proportional_per_book() {
        let c = corpus(&[("a", 100), ("b", 40), ("c", 7)]);
        let s = stratified_split(&c, &[], 0.15, 3).unwrap();
        let per_book = |b: &str| {
            c.pairs()
                .iter()
                .filter(|p| p.book_id == b && s.assignments[&p.id] == Split::Validation)
                .count()
        };
        assert_eq!(per_book("a"), 15);
        assert_eq!(per_book("b"), 6);
        assert_eq!(per_book("c"), 1);
        assert_eq!(s.count(Split::Validation), 22);
    }

    #[test]
    fn errors() {
        let c = corpus(&[("a", 4)]);
        assert!(stratified_split(&c, &["zz".into()], 0.5, 0).is_err());
        assert!(stratified_split(&c, &[], 0.0, 0).is_err());
        assert!(stratified_split(&c, &[], 1.0, 0).is_err());
    }
}
