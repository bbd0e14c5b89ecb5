use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use crate::bundled::LEXICON as BUNDLED;
use crate::error::{Error, Result};
use crate::spellkit::keyboard::FOREIGN_LETTERS;
use crate::textnorm::turkish_lowercase;

#[derive(Debug, Clone)]
pub(crate) struct Entry {
    pub word: String,
    pub chars: Vec<char>,
    pub frequency: u64,
}

/// Correctly spelled words with corpus frequencies; the candidate source for correction.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: Vec<Entry>,
    index: HashMap<String, usize>,
    by_len: BTreeMap<usize, Vec<usize>>,
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.iter().eq(other.iter())
    }
}

pub fn is_lexicon_word(word: &str) -> bool {
    !word.is_empty()
        && word.chars().all(|c| c.is_alphabetic() && !FOREIGN_LETTERS.contains(&c))
        && turkish_lowercase(word) == word
}

impl Lexicon {
    pub fn from_counts<S: Into<String>>(counts: impl IntoIterator<Item = (S, u64)>) -> Result<Self> {
        let mut map: BTreeMap<String, u64> = BTreeMap::new();
        for (word, frequency) in counts {
            let word = word.into();
            if !is_lexicon_word(&word) {
                return Err(Error::Data(format!("{word:?} is not a valid lexicon word")));
            }
            if frequency == 0 {
                return Err(Error::Data(format!("frequency of {word:?} must be at least 1")));
            }
            if map.insert(word.clone(), frequency).is_some() {
                return Err(Error::Data(format!("duplicate lexicon word {word:?}")));
            }
        }
        Lexicon::from_map(map)
    }

    fn from_map(map: BTreeMap<String, u64>) -> Result<Self> {
        if map.is_empty() {
            return Err(Error::Data("lexicon is empty".into()));
        }
        let entries: Vec<Entry> = map
            .into_iter()
            .map(|(word, frequency)| Entry {
                chars: word.chars().collect(),
                word,
                frequency,
            })
            .collect();
        let index = entries.iter().enumerate().map(|(i, e)| (e.word.clone(), i)).collect();
        let mut by_len: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            by_len.entry(e.chars.len()).or_default().push(i);
        }
        Ok(Lexicon { entries, index, by_len })
    }

    /// The bundled Turkish review-domain word list.
    pub fn turkish_default() -> Self {
        Lexicon::parse(BUNDLED, "builtin lexicon").expect("bundled lexicon is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Lexicon::parse(&text, &path.display().to_string())
    }

    /// `word<TAB>frequency` per line; blank and `#` lines are skipped.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let row = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, freq) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, row, "expected word<TAB>frequency"))?;
            if !is_lexicon_word(word) {
                return Err(Error::parse(origin, row, format!("invalid word {word:?}")));
            }
            let freq: u64 = freq
                .trim()
                .parse()
                .ok()
                .filter(|&f| f >= 1)
                .ok_or_else(|| Error::parse(origin, row, format!("invalid frequency {freq:?}")))?;
            if map.insert(word.to_owned(), freq).is_some() {
                return Err(Error::parse(origin, row, format!("duplicate word {word:?}")));
            }
        }
        Lexicon::from_map(map).map_err(|e| Error::Data(format!("{origin}: {e}")))
    }

    pub fn to_tsv(&self) -> String {
        self.iter().map(|(w, f)| format!("{w}\t{f}\n")).collect()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn frequency(&self, word: &str) -> Option<u64> {
        self.index.get(word).map(|&i| self.entries[i].frequency)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Words in lexicographic order with their frequencies.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|e| (e.word.as_str(), e.frequency))
    }

    /// Entries whose character length lies in `lo..=hi`.
    pub(crate) fn entries_with_len(&self, lo: usize, hi: usize) -> impl Iterator<Item = &Entry> {
        self.by_len
            .range(lo..=hi)
            .flat_map(|(_, ids)| ids.iter().map(|&i| &self.entries[i]))
    }
}
