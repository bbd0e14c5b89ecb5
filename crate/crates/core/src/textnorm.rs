//! Normalization shared by every dataset variant: Turkish-aware lowercasing,
//! tokenization and stopword / nonsense-token filtering.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bundled::STOPWORDS as DEFAULT_STOPWORDS;
use crate::error::{Error, Result};

/// A lowercase, letters-only word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Token(String);

impl Token {
    pub fn new(surface: impl Into<String>) -> Result<Self> {
        let surface = surface.into();
        if is_token_surface(&surface) {
            Ok(Token(surface))
        } else {
            Err(Error::Data(format!(
                "{surface:?} is not a token (lowercase letters only)"
            )))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    /// Length in characters.
    pub fn char_len(&self) -> usize {
        self.0.chars().count()
    }
}

fn is_token_surface(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphabetic() && !c.is_uppercase()) && turkish_lowercase(s) == s
}

impl TryFrom<String> for Token {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Token::new(value)
    }
}

impl From<Token> for String {
    fn from(token: Token) -> String {
        token.0
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Lowercases with the Turkish dotted/dotless i rules (`I` → `ı`, `İ` → `i`);
/// every other character follows the standard Unicode mapping.
pub fn turkish_lowercase(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            'I' => out.push('ı'),
            'İ' => out.push('i'),
            _ => out.extend(c.to_lowercase()),
        }
    }
    out
}

/// Lowercases, splits on whitespace and trims non-letter characters from both
/// ends of each piece. Pieces containing digits, or still containing non-letters
/// after trimming, are dropped.
pub fn tokenize(text: &str) -> Vec<Token> {
    let lowered = turkish_lowercase(text);
    lowered
        .split_whitespace()
        .filter_map(|piece| {
            if piece.chars().any(char::is_numeric) {
                return None;
            }
            let trimmed = piece.trim_matches(|c: char| !c.is_alphabetic());
            is_token_surface(trimmed).then(|| Token(trimmed.to_owned()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormConfig {
    stopwords: HashSet<String>,
    min_token_len: usize,
}

pub const DEFAULT_MIN_TOKEN_LEN: usize = 2;

impl NormConfig {
    pub fn new(stopwords: impl IntoIterator<Item = String>, min_token_len: usize) -> Result<Self> {
        if min_token_len == 0 {
            return Err(Error::Config("min_token_len must be positive".into()));
        }
        let stopwords: HashSet<String> = stopwords.into_iter().collect();
        if let Some(bad) = stopwords.iter().find(|w| turkish_lowercase(w) != **w) {
            return Err(Error::Config(format!("stopword {bad:?} is not lowercase")));
        }
        Ok(NormConfig {
            stopwords,
            min_token_len,
        })
    }

    /// No stopwords, only the length rule.
    pub fn without_stopwords() -> Self {
        NormConfig {
            stopwords: HashSet::new(),
            min_token_len: DEFAULT_MIN_TOKEN_LEN,
        }
    }

    /// The bundled Turkish function-word list with the default length rule.
    pub fn turkish_default() -> Self {
        let words = parse_stopwords(DEFAULT_STOPWORDS, "builtin stopwords").expect("bundled list is valid");
        NormConfig::new(words, DEFAULT_MIN_TOKEN_LEN).expect("bundled list is lowercase")
    }

    pub fn from_file(path: impl AsRef<Path>, min_token_len: usize) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        NormConfig::new(parse_stopwords(&text, &path.display().to_string())?, min_token_len)
    }

    pub fn stopwords(&self) -> &HashSet<String> {
        &self.stopwords
    }

    pub fn min_token_len(&self) -> usize {
        self.min_token_len
    }
}

impl Default for NormConfig {
    fn default() -> Self {
        NormConfig::turkish_default()
    }
}

/// One lowercase word per line; `#` starts a comment, blank lines are ignored.
pub fn parse_stopwords(text: &str, origin: &str) -> Result<Vec<String>> {
    let mut words = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.contains(char::is_whitespace) || turkish_lowercase(line) != line {
            return Err(Error::parse(origin, i + 1, format!("invalid stopword {line:?}")));
        }
        words.push(line.to_owned());
    }
    Ok(words)
}

/// Drops stopwords and tokens shorter than `min_token_len` characters.
pub fn filter_tokens(tokens: Vec<Token>, config: &NormConfig) -> Vec<Token> {
    tokens
        .into_iter()
        .filter(|t| t.char_len() >= config.min_token_len && !config.stopwords.contains(t.as_str()))
        .collect()
}

/// Lowercase, tokenize, filter: the steps common to every variant.
pub fn normalize(text: &str, config: &NormConfig) -> Vec<Token> {
    filter_tokens(tokenize(text), config)
}
