use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textnorm::Token;

pub const DEFAULT_MIN_COUNT: u64 = 2;

/// Word ↔ index mapping. Indices are dense and ordered by descending count,
/// ties broken alphabetically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "VocabRepr", into = "VocabRepr")]
pub struct Vocab {
    words: Vec<String>,
    counts: Vec<u64>,
    min_count: u64,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct VocabRepr {
    min_count: u64,
    words: Vec<(String, u64)>,
}

impl From<Vocab> for VocabRepr {
    fn from(v: Vocab) -> Self {
        VocabRepr {
            min_count: v.min_count,
            words: v.words.into_iter().zip(v.counts).collect(),
        }
    }
}

impl TryFrom<VocabRepr> for Vocab {
    type Error = Error;

    fn try_from(r: VocabRepr) -> Result<Self> {
        Vocab::from_counts(r.words, r.min_count)
    }
}

impl Vocab {
    /// Builds a vocabulary from explicit (word, count) pairs in index order.
    pub fn from_counts(words: Vec<(String, u64)>, min_count: u64) -> Result<Self> {
        let mut index = HashMap::with_capacity(words.len());
        let mut out_words = Vec::with_capacity(words.len());
        let mut counts = Vec::with_capacity(words.len());
        for (i, (word, count)) in words.into_iter().enumerate() {
            if count < min_count {
                return Err(Error::Data(format!(
                    "{word:?} has count {count} < min_count {min_count}"
                )));
            }
            if index.insert(word.clone(), i).is_some() {
                return Err(Error::Data(format!("duplicate vocabulary word {word:?}")));
            }
            out_words.push(word);
            counts.push(count);
        }
        if out_words.is_empty() {
            return Err(Error::Data("vocabulary is empty".into()));
        }
        Ok(Vocab {
            words: out_words,
            counts,
            min_count,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, index: usize) -> &str {
        &self.words[index]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    /// Indices of the in-vocabulary tokens, in order.
    pub fn encode(&self, tokens: &[Token]) -> Vec<usize> {
        tokens.iter().filter_map(|t| self.index_of(t.as_str())).collect()
    }
}

/// Counts tokens across `sentences` and keeps those seen at least `min_count` times.
pub fn build_vocab(sentences: &[Vec<Token>], min_count: u64) -> Result<Vocab> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for token in sentences.iter().flatten() {
        *counts.entry(token.as_str()).or_default() += 1;
    }
    if counts.is_empty() {
        return Err(Error::Data(
            "cannot build a vocabulary from an empty token stream".into(),
        ));
    }
    let mut kept: Vec<(String, u64)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_count)
        .map(|(w, c)| (w.to_owned(), c))
        .collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    if kept.is_empty() {
        return Err(Error::Data(format!("no token occurs at least {min_count} times")));
    }
    Vocab::from_counts(kept, min_count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sentence(words: &[&str]) -> Vec<Token> {
        words.iter().map(|w| Token::new(*w).unwrap()).collect()
    }

    #[test]
    fn counting_and_threshold() {
        let corpus = vec![sentence(&["a", "b", "a"])];
        let v = build_vocab(&corpus, 1).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.index_of("a"), Some(0));
        assert_eq!(v.count(0), 2);
        assert_eq!(v.count(v.index_of("b").unwrap()), 1);
        assert_eq!(build_vocab(&corpus, 2).unwrap().len(), 1);
        assert!(build_vocab(&[], 1).is_err());
        assert!(build_vocab(&[Vec::new()], 1).is_err());
    }

    #[test]
    fn ties_are_alphabetical() {
        let v = build_vocab(&[sentence(&["c", "b", "a", "c"])], 1).unwrap();
        assert_eq!(v.words(), ["c", "a", "b"]);
    }

    #[test]
    fn serde_round_trip() {
        let v = build_vocab(&[sentence(&["iyi", "kötü", "iyi"])], 1).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(serde_json::from_str::<Vocab>(&json).unwrap(), v);
    }
}
