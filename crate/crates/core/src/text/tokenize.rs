use std::ops::Deref;

use serde::{Deserialize, Serialize};

/// Clitics that elide before a vowel. The apostrophe stays attached to them.
const ELIDED_CLITICS: &[&str] = &[
    "c", "d", "j", "l", "m", "n", "s", "t", "qu", "jusqu", "lorsqu", "puisqu", "quoiqu",
    "presqu", "quelqu",
];

/// Word tokens of a text, punctuation removed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSeq {
    tokens: Vec<String>,
    char_lengths: Vec<usize>,
}

impl TokenSeq {
    /// Builds a sequence from pre-split tokens. Empty tokens and tokens with
    /// whitespace are rejected by the caller's contract; they are dropped here.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens
            .into_iter()
            .map(Into::into)
            .filter(|t| !t.is_empty() && !t.chars().any(char::is_whitespace))
            .collect();
        let char_lengths = tokens.iter().map(|t| letter_count(t)).collect();
        TokenSeq {
            tokens,
            char_lengths,
        }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Alphabetic characters per token.
    pub fn char_lengths(&self) -> &[usize] {
        &self.char_lengths
    }

    pub fn into_tokens(self) -> Vec<String> {
        self.tokens
    }

    fn push(&mut self, token: String) {
        self.char_lengths.push(letter_count(&token));
        self.tokens.push(token);
    }
}

impl Deref for TokenSeq {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.tokens
    }
}

fn letter_count(token: &str) -> usize {
    token.chars().filter(|c| c.is_alphabetic()).count()
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

// Combining diacritics continue a word but never start one (decomposed accents).
fn is_combining_mark(c: char) -> bool {
    matches!(c, '\u{0300}'..='\u{036F}' | '\u{1AB0}'..='\u{1AFF}' | '\u{1DC0}'..='\u{1DFF}')
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{02BC}')
}

fn is_hyphen(c: char) -> bool {
    matches!(c, '-' | '\u{2010}' | '\u{2011}')
}

/// Lowercases with the per-character Unicode mapping. Accents are preserved.
pub fn fold_case(s: &str) -> String {
    s.chars().flat_map(char::to_lowercase).collect()
}

fn is_clitic(word: &str) -> bool {
    let folded = fold_case(word);
    ELIDED_CLITICS.contains(&folded.as_str())
}

/// Splits `text` into word tokens.
///
/// A token is a maximal run of letters and digits, optionally joined by
/// internal hyphens ("peut-être") or internal apostrophes ("aujourd'hui").
/// Elided clitics are split off after their apostrophe, which they keep:
/// "l'été" gives `["l'", "été"]`. Typographic apostrophes are normalised
/// to `'`. Everything else is treated as a separator.
pub fn tokenize(text: &str, fold: bool) -> TokenSeq {
    let chars: Vec<char> = text.chars().collect();
    let mut out = TokenSeq::default();
    let mut current = String::new();
    let mut i = 0;

    let flush = |current: &mut String, out: &mut TokenSeq| {
        if !current.is_empty() {
            let token = std::mem::take(current);
            out.push(if fold { fold_case(&token) } else { token });
        }
    };

    while i < chars.len() {
        let c = chars[i];
        if is_word_char(c) || (!current.is_empty() && is_combining_mark(c)) {
            current.push(c);
            i += 1;
            continue;
        }
        if current.is_empty() {
            i += 1;
            continue;
        }
        let next_is_word = chars.get(i + 1).is_some_and(|&n| is_word_char(n));
        if is_apostrophe(c) {
            if is_clitic(&current) {
                current.push('\'');
                flush(&mut current, &mut out);
            } else if next_is_word {
                current.push('\'');
            } else {
                flush(&mut current, &mut out);
            }
            i += 1;
        } else if is_hyphen(c) && next_is_word {
            current.push(c);
            i += 1;
        } else {
            flush(&mut current, &mut out);
            i += 1;
        }
    }
    flush(&mut current, &mut out);
    out
}
