use std::collections::HashSet;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUILTIN_ABBREVIATIONS: &str = include_str!("../../data/abbreviations.txt");

/// Sentences of a text with their byte offsets into the original string.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceSeq {
    pub sentences: Vec<String>,
    /// Start byte offset of each sentence in the original text.
    pub boundaries: Vec<usize>,
}

impl SentenceSeq {
    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

/// Rule-based sentence splitter configured with an abbreviation list.
#[derive(Debug, Clone)]
pub struct Segmenter {
    abbreviations: HashSet<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Segmenter::from_abbreviation_list(BUILTIN_ABBREVIATIONS)
    }
}

/// Shared segmenter with the built-in abbreviation list.
pub fn default_segmenter() -> &'static Segmenter {
    static DEFAULT: OnceLock<Segmenter> = OnceLock::new();
    DEFAULT.get_or_init(Segmenter::default)
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | '…')
}

fn is_closing(c: char) -> bool {
    matches!(c, '"' | '\'' | '»' | '”' | '’' | ')' | ']' | '}')
}

fn is_spaced_closing(c: char) -> bool {
    matches!(c, '»' | '”' | ')' | ']' | '}')
}

fn is_bullet(line: &str) -> bool {
    let line = line.trim_start();
    let mut chars = line.chars();
    match chars.next() {
        Some('-' | '•' | '*' | '–' | '—' | '·' | '▪' | '►') => {
            chars.next().is_some_and(char::is_whitespace)
        }
        Some(c) if c.is_ascii_digit() => {
            let rest = line.trim_start_matches(|c: char| c.is_ascii_digit());
            let mut rest = rest.chars();
            matches!(rest.next(), Some('.' | ')')) && rest.next().is_some_and(char::is_whitespace)
        }
        _ => false,
    }
}

impl Segmenter {
    /// Parses a list with one abbreviation per line; blank lines and `#`
    /// comments are skipped and the trailing period is optional.
    pub fn from_abbreviation_list(list: &str) -> Self {
        let abbreviations = list
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.trim_end_matches('.').to_string())
            .filter(|l| !l.is_empty())
            .collect();
        Segmenter { abbreviations }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let list = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Segmenter::from_abbreviation_list(&list))
    }

    pub fn is_abbreviation(&self, word: &str) -> bool {
        self.abbreviations.contains(word.trim_end_matches('.'))
    }

    /// Word (whitespace-delimited, leading punctuation trimmed) that ends at byte `end`.
    fn word_before<'a>(&self, text: &'a str, end: usize) -> &'a str {
        let head = &text[..end];
        let start = head
            .char_indices()
            .rev()
            .find(|(_, c)| c.is_whitespace())
            .map(|(i, c)| i + c.len_utf8())
            .unwrap_or(0);
        head[start..].trim_start_matches(|c: char| !c.is_alphanumeric())
    }

    /// Splits `text` into sentences.
    ///
    /// A sentence ends after a run of `.`, `!`, `?` or `…` (plus closing
    /// quotes or brackets) that is followed by whitespace, unless the next
    /// word starts with a lowercase letter or the period closes a known
    /// abbreviation. Bullet lines and blank-line paragraph breaks also end
    /// a sentence. Splits only ever happen on whitespace.
    pub fn split(&self, text: &str) -> SentenceSeq {
        let mut out = SentenceSeq::default();
        let mut start: Option<usize> = None;
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut i = 0;

        let emit = |from: usize, to: usize, out: &mut SentenceSeq| {
            let piece = &text[from..to];
            let trimmed = piece.trim_end();
            if !trimmed.is_empty() {
                out.sentences.push(trimmed.to_string());
                out.boundaries.push(from);
            }
        };

        while i < chars.len() {
            let (pos, c) = chars[i];
            if start.is_none() {
                if !c.is_whitespace() {
                    start = Some(pos);
                }
                i += 1;
                continue;
            }
            let from = start.unwrap();

            if c == '\n' {
                let line_start = text[..pos].rfind('\n').map(|p| p + 1).unwrap_or(0);
                let this_line = &text[line_start..pos];
                let next_line = text[pos + 1..].split('\n').next().unwrap_or("");
                let blank_follows = next_line.trim().is_empty();
                if blank_follows || is_bullet(this_line) || is_bullet(next_line) {
                    emit(from, pos, &mut out);
                    start = None;
                }
                i += 1;
                continue;
            }

            if !is_terminator(c) {
                i += 1;
                continue;
            }

            // Consume the terminator group and any closing marks, including
            // French-spaced closers such as " »".
            let mut j = i;
            while j < chars.len() && is_terminator(chars[j].1) {
                j += 1;
            }
            let group_len = j - i;
            loop {
                while j < chars.len() && is_closing(chars[j].1) {
                    j += 1;
                }
                let mut k = j;
                while k < chars.len() && matches!(chars[k].1, ' ' | '\u{a0}' | '\u{202f}') {
                    k += 1;
                }
                if k > j && k < chars.len() && is_spaced_closing(chars[k].1) {
                    j = k + 1;
                } else {
                    break;
                }
            }
            let end = chars.get(j).map(|&(p, _)| p).unwrap_or(text.len());
            let at_end = j >= chars.len();
            let followed_by_space = at_end || chars[j].1.is_whitespace();
            if !followed_by_space {
                i = j;
                continue;
            }
            let lowercase_next = chars[j..]
                .iter()
                .map(|&(_, c)| c)
                .find(|c| c.is_alphanumeric())
                .is_some_and(char::is_lowercase);
            let abbreviation =
                c == '.' && group_len == 1 && self.is_abbreviation(self.word_before(text, pos));
            if at_end || !(lowercase_next || abbreviation) {
                emit(from, end, &mut out);
                start = None;
            }
            i = j;
        }
        if let Some(from) = start {
            emit(from, text.len(), &mut out);
        }
        out
    }
}

/// Splits with the built-in abbreviation list.
pub fn split_sentences(text: &str) -> SentenceSeq {
    default_segmenter().split(text)
}
