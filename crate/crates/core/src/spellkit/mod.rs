//! Lexicon-driven word correction with optional keyboard-adjacency
//! disambiguation between the two best suggestions.

pub mod distance;
mod keyboard;
mod lexicon;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use self::distance::{align, weighted_distance_halves, EditOp};
pub use self::keyboard::{is_turkish_letter, KeyboardMatrix, FOREIGN_LETTERS, TURKISH_LETTERS};
pub use self::lexicon::{is_lexicon_word, Lexicon};
use crate::error::{Error, Result};
use crate::textnorm::{turkish_lowercase, Token};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionCandidate {
    pub word: String,
    /// Weighted edit distance; ASCII/Turkish letter swaps count 0.5.
    pub edit_distance: f64,
    pub frequency: u64,
    pub keyboard_score: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorrectorConfig {
    pub use_keyboard: bool,
    pub max_suggestions: usize,
    pub max_edit_distance: u32,
}

impl Default for CorrectorConfig {
    fn default() -> Self {
        CorrectorConfig {
            use_keyboard: true,
            max_suggestions: 10,
            max_edit_distance: 2,
        }
    }
}

impl CorrectorConfig {
    pub fn with_keyboard(use_keyboard: bool) -> Self {
        CorrectorConfig {
            use_keyboard,
            ..CorrectorConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let floor = if self.use_keyboard { 2 } else { 1 };
        if self.max_suggestions < floor {
            return Err(Error::Config(format!(
                "max_suggestions must be at least {floor} (use_keyboard={})",
                self.use_keyboard
            )));
        }
        if self.max_edit_distance > 2 {
            return Err(Error::Config("max_edit_distance is capped at 2".into()));
        }
        Ok(())
    }
}

fn check_word(word: &str, role: &str) -> Result<()> {
    let ok = !word.is_empty()
        && word.chars().all(|c| c.is_alphabetic() && !c.is_uppercase())
        && turkish_lowercase(word) == word;
    if ok {
        Ok(())
    } else {
        Err(Error::Data(format!(
            "{role} word {word:?} must be non-empty lowercase letters"
        )))
    }
}

/// Fraction of substitutions in the minimal alignment of `typed` against
/// `candidate` whose typed letter is a keyboard neighbor of the intended one.
/// Alignments without substitutions score 1 for identical words and 0 otherwise.
pub fn keyboard_score(matrix: &KeyboardMatrix, typed: &str, candidate: &str) -> Result<f64> {
    check_word(typed, "typed")?;
    check_word(candidate, "candidate")?;
    let typed_chars: Vec<char> = typed.chars().collect();
    let cand_chars: Vec<char> = candidate.chars().collect();
    let subs: Vec<(char, char)> = align(&typed_chars, &cand_chars)
        .into_iter()
        .filter_map(|op| match op {
            EditOp::Substitute { typed, intended } => Some((typed, intended)),
            _ => None,
        })
        .collect();
    if subs.is_empty() {
        return Ok(if typed == candidate { 1.0 } else { 0.0 });
    }
    let adjacent = subs.iter().filter(|&&(t, i)| matrix.is_adjacent(t, i)).count();
    Ok(adjacent as f64 / subs.len() as f64)
}

fn rank(a: &CorrectionCandidate, b: &CorrectionCandidate) -> Ordering {
    a.edit_distance
        .total_cmp(&b.edit_distance)
        .then(b.frequency.cmp(&a.frequency))
        .then_with(|| a.word.cmp(&b.word))
}

/// Lexicon words within `max_edit_distance` of `token`, best first: by
/// distance, then frequency (descending), then alphabetically; at most
/// `max_suggestions`. A token already in the lexicon yields only itself.
pub fn suggest_candidates(
    lexicon: &Lexicon,
    token: &Token,
    config: &CorrectorConfig,
) -> Result<Vec<CorrectionCandidate>> {
    if lexicon.is_empty() {
        return Err(Error::Data("cannot suggest corrections from an empty lexicon".into()));
    }
    if let Some(frequency) = lexicon.frequency(token.as_str()) {
        return Ok(vec![CorrectionCandidate {
            word: token.as_str().to_owned(),
            edit_distance: 0.0,
            frequency,
            keyboard_score: None,
        }]);
    }
    let chars: Vec<char> = token.as_str().chars().collect();
    let max_dist = config.max_edit_distance as usize;
    let bound = config.max_edit_distance * 2;
    let lo = chars.len().saturating_sub(max_dist);
    let hi = chars.len() + max_dist;
    let mut out: Vec<CorrectionCandidate> = lexicon
        .entries_with_len(lo, hi)
        .filter_map(|entry| {
            weighted_distance_halves(&chars, &entry.chars, bound).map(|halves| CorrectionCandidate {
                word: entry.word.clone(),
                edit_distance: f64::from(halves) / 2.0,
                frequency: entry.frequency,
                keyboard_score: None,
            })
        })
        .collect();
    out.sort_by(rank);
    out.truncate(config.max_suggestions);
    Ok(out)
}

/// Picks between the two best-ranked candidates by keyboard score; the first
/// one wins ties. Later candidates are never consulted.
pub fn disambiguate(
    matrix: &KeyboardMatrix,
    typed: &Token,
    candidates: &[CorrectionCandidate],
) -> Result<CorrectionCandidate> {
    match candidates {
        [] => Err(Error::Data("disambiguate needs at least one candidate".into())),
        [only] => Ok(only.clone()),
        [first, second, ..] => {
            let s0 = keyboard_score(matrix, typed.as_str(), &first.word)?;
            let s1 = keyboard_score(matrix, typed.as_str(), &second.word)?;
            let (chosen, score) = if s1 > s0 { (second, s1) } else { (first, s0) };
            Ok(CorrectionCandidate {
                keyboard_score: Some(score),
                ..chosen.clone()
            })
        }
    }
}

/// Returns the best correction for `token`, or the token itself when no
/// lexicon word is close enough.
pub fn correct_token(lexicon: &Lexicon, matrix: &KeyboardMatrix, token: &Token, config: &CorrectorConfig) -> Token {
    let candidates = match suggest_candidates(lexicon, token, config) {
        Ok(c) if !c.is_empty() => c,
        _ => return token.clone(),
    };
    let chosen = if config.use_keyboard {
        match disambiguate(matrix, token, &candidates) {
            Ok(c) => c.word,
            Err(_) => candidates[0].word.clone(),
        }
    } else {
        candidates[0].word.clone()
    };
    Token::new(chosen).expect("lexicon words are valid tokens")
}

pub fn correct_sentence(
    lexicon: &Lexicon,
    matrix: &KeyboardMatrix,
    tokens: &[Token],
    config: &CorrectorConfig,
) -> Vec<Token> {
    tokens
        .iter()
        .map(|t| correct_token(lexicon, matrix, t, config))
        .collect()
}
