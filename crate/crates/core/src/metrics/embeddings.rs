use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    dim: usize,
}

/// One text's tokens and their vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedText {
    pub id: String,
    pub tokens: Vec<String>,
    pub vectors: Vec<Vec<f64>>,
}

/// Per-text token embeddings read from a line-delimited file.
///
/// The first non-blank line is a header `{"dim": d}`; each following line is
/// `{"id": ..., "tokens": [...], "vectors": [[...], ...]}` with one vector of
/// dimension `d` per token.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dim: usize,
    texts: HashMap<String, EmbeddedText>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            texts: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.texts.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&EmbeddedText> {
        self.texts.get(id)
    }

    pub fn insert(&mut self, text: EmbeddedText) -> Result<()> {
        self.validate(&text).map_err(Error::Invalid)?;
        if self.texts.contains_key(&text.id) {
            return Err(Error::DuplicateId(text.id));
        }
        self.texts.insert(text.id.clone(), text);
        Ok(())
    }

    fn validate(&self, text: &EmbeddedText) -> std::result::Result<(), String> {
        if text.vectors.len() != text.tokens.len() {
            return Err(format!(
                "{}: {} vectors for {} tokens",
                text.id,
                text.vectors.len(),
                text.tokens.len()
            ));
        }
        for v in &text.vectors {
            if v.len() != self.dim {
                return Err(format!(
                    "{}: vector of dimension {}, header declares {}",
                    text.id,
                    v.len(),
                    self.dim
                ));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(format!("{}: non-finite vector component", text.id));
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(std::io::BufReader::new(file), &path.display().to_string())
    }

    pub fn read<R: BufRead>(reader: R, origin: &str) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: origin.to_string(),
            line,
            message,
        };
        let mut table: Option<EmbeddingTable> = None;
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.trim().is_empty() {
                continue;
            }
            match table.as_mut() {
                None => {
                    let header: Header = serde_json::from_str(&line)
                        .map_err(|e| parse_err(lineno, format!("bad header: {e}")))?;
                    if header.dim == 0 {
                        return Err(parse_err(lineno, "dimension must be positive".into()));
                    }
                    table = Some(EmbeddingTable::new(header.dim));
                }
                Some(t) => {
                    let text: EmbeddedText = serde_json::from_str(&line)
                        .map_err(|e| parse_err(lineno, e.to_string()))?;
                    t.insert(text).map_err(|e| parse_err(lineno, e.to_string()))?;
                }
            }
        }
        table.ok_or_else(|| parse_err(0, "missing header record".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str) -> Result<EmbeddingTable> {
        EmbeddingTable::read(s.as_bytes(), "test")
    }

    #[test]
    fn parses_records() {
        let t = read(
            "{\"dim\":2}\n{\"id\":\"a\",\"tokens\":[\"x\",\"y\"],\"vectors\":[[1,0],[0.5,0.5]]}\n",
        )
        .unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.get("a").unwrap().vectors[1], [0.5, 0.5]);
    }

    #[test]
    fn rejects_bad_records() {
        let wrong_dim = "{\"dim\":3}\n{\"id\":\"a\",\"tokens\":[\"x\"],\"vectors\":[[1,0]]}";
        assert!(matches!(read(wrong_dim), Err(Error::Parse { line: 2, .. })));
        let count = "{\"dim\":2}\n{\"id\":\"a\",\"tokens\":[\"x\",\"y\"],\"vectors\":[[1,0]]}";
        assert!(read(count).is_err());
        let dup = "{\"dim\":1}\n{\"id\":\"a\",\"tokens\":[\"x\"],\"vectors\":[[1]]}\n{\"id\":\"a\",\"tokens\":[\"x\"],\"vectors\":[[1]]}";
        assert!(matches!(read(dup), Err(Error::Parse { line: 3, .. })));
        assert!(read("").is_err());
    }
}
