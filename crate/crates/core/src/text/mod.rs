//! Deterministic segmentation primitives: word tokens, sentences, French
//! syllables and n-grams.

mod ngrams;
mod sentences;
mod syllables;
mod tokenize;

pub use ngrams::{ngrams, vocabulary, NGramBag};
pub use sentences::{default_segmenter, split_sentences, Segmenter, SentenceSeq};
pub use syllables::count_syllables_fr;
pub use tokenize::{fold_case, tokenize, TokenSeq};
