use rand::seq::IndexedRandom;
use rand::Rng;

pub use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Tokens drawn from `w0..w{vocab-1}`.
pub fn tokens<R: Rng>(rng: &mut R, vocab: usize, min_len: usize, max_len: usize) -> Vec<String> {
    let len = rng.random_range(min_len..=max_len);
    (0..len).map(|_| format!("w{}", rng.random_range(0..vocab))).collect()
}

/// Annotators by units; each cell is missing with probability `missing`.
pub fn rating_matrix<R: Rng>(
    rng: &mut R,
    annotators: usize,
    units: usize,
    values: &[f64],
    missing: f64,
) -> Vec<Vec<Option<f64>>> {
    (0..annotators)
        .map(|_| {
            (0..units)
                .map(|_| {
                    if rng.random_bool(missing) {
                        None
                    } else {
                        values.choose(rng).copied()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn vectors<R: Rng>(rng: &mut R, count: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

/// A random orthogonal matrix from Gram-Schmidt on random rows.
pub fn rotation<R: Rng>(rng: &mut R, dim: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while basis.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.iter().map(|x| x / norm).collect());
        }
    }
    basis
}

pub fn apply(matrix: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    matrix
        .iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

const CONSONANTS: &[char] = &['b', 'd', 'f', 'l', 'm', 'p', 'r', 't', 'v'];
const VOWELS: &[char] = &['a', 'i', 'o', 'u'];

/// A lowercase word of consonant+vowel syllables, without `e` or `y`, so
/// each syllable is exactly one vowel group.
pub fn cv_word<R: Rng>(rng: &mut R, syllables: usize) -> String {
    let mut w = String::new();
    for _ in 0..syllables {
        w.push(*CONSONANTS.choose(rng).unwrap());
        w.push(*VOWELS.choose(rng).unwrap());
    }
    w
}

/// Consonant, vowel, consonant: three letters, one syllable.
pub fn cvc_word<R: Rng>(rng: &mut R) -> String {
    let mut w = cv_word(rng, 1);
    w.push(*CONSONANTS.choose(rng).unwrap());
    w
}

pub fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Sentences of CV words, each capitalised and ended by a full stop.
pub fn cv_text<R: Rng>(rng: &mut R, max_sentences: usize, max_words: usize) -> Vec<Vec<String>> {
    (0..rng.random_range(1..=max_sentences))
        .map(|_| {
            (0..rng.random_range(1..=max_words))
                .map(|_| {
                    let n = rng.random_range(1..=3);
                    cv_word(rng, n)
                })
                .collect()
        })
        .collect()
}

pub fn render(sentences: &[Vec<String>]) -> String {
    sentences
        .iter()
        .map(|s| {
            let mut words = s.clone();
            words[0] = capitalize(&words[0]);
            format!("{}.", words.join(" "))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Between 1 and `max_count` random vectors.
pub fn vector_set<R: Rng>(rng: &mut R, max_count: usize, dim: usize) -> Vec<Vec<f64>> {
    let count = rng.random_range(1..=max_count);
    vectors(rng, count, dim)
}
