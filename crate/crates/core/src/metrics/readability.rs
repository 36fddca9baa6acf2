use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{count_syllables_fr, default_segmenter, tokenize, Segmenter};

/// Words with more than this many letters count as long for LIX.
pub const LIX_LONG_WORD_LETTERS: usize = 6;

const KMRE_BASE: f64 = 209.0;
const KMRE_SENTENCE_WEIGHT: f64 = 1.15;
const KMRE_SYLLABLE_WEIGHT: f64 = 0.68;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadabilityScores {
    pub kmre: f64,
    pub lix: f64,
}

/// Surface counts of a text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TextProfile {
    pub words: usize,
    pub sentences: usize,
    pub syllables: usize,
    pub long_words: usize,
}

impl TextProfile {
    pub fn of(text: &str) -> Self {
        TextProfile::with_segmenter(text, default_segmenter())
    }

    pub fn with_segmenter(text: &str, segmenter: &Segmenter) -> Self {
        let tokens = tokenize(text, false);
        TextProfile {
            words: tokens.len(),
            sentences: segmenter.split(text).len(),
            syllables: tokens.iter().map(|t| count_syllables_fr(t)).sum(),
            long_words: tokens
                .char_lengths()
                .iter()
                .filter(|&&n| n > LIX_LONG_WORD_LETTERS)
                .count(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.words == 0 || self.sentences == 0 {
            Err(Error::EmptyText)
        } else {
            Ok(())
        }
    }

    /// Mean words per sentence.
    pub fn sentence_length(&self) -> Result<f64> {
        self.check()?;
        Ok(self.words as f64 / self.sentences as f64)
    }

    /// Kandel-Moles reading ease: higher is easier.
    pub fn kmre(&self) -> Result<f64> {
        self.check()?;
        Ok(kmre_from_counts(self.words, self.sentences, self.syllables))
    }

    pub fn lix(&self) -> Result<f64> {
        self.check()?;
        Ok(lix_from_counts(self.words, self.sentences, self.long_words))
    }

    pub fn readability(&self) -> Result<ReadabilityScores> {
        Ok(ReadabilityScores {
            kmre: self.kmre()?,
            lix: self.lix()?,
        })
    }
}

/// `209 - 1.15 * words/sentence - 0.68 * syllables per 100 words`.
pub fn kmre_from_counts(words: usize, sentences: usize, syllables: usize) -> f64 {
    let words_per_sentence = words as f64 / sentences as f64;
    let syllables_per_100_words = 100.0 * syllables as f64 / words as f64;
    KMRE_BASE - KMRE_SENTENCE_WEIGHT * words_per_sentence - KMRE_SYLLABLE_WEIGHT * syllables_per_100_words
}

/// `words/sentence + 100 * long_words/words`.
pub fn lix_from_counts(words: usize, sentences: usize, long_words: usize) -> f64 {
    words as f64 / sentences as f64 + 100.0 * long_words as f64 / words as f64
}

pub fn kmre(text: &str) -> Result<f64> {
    TextProfile::of(text).kmre()
}

pub fn lix(text: &str) -> Result<f64> {
    TextProfile::of(text).lix()
}
