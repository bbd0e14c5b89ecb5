//! Dictionary-driven lemmatization: an exact surface→lemma table backed by a
//! small table of suffix rewrite rules. Verbs map to their infinitive and keep
//! negation (`-mamak` / `-memek`).

use std::collections::HashMap;
use std::path::Path;

use crate::bundled::{LEMMA_EXACT as BUNDLED_EXACT, LEMMA_RULES as BUNDLED_RULES};
use crate::error::{Error, Result};
use crate::textnorm::{turkish_lowercase, Token};

/// Vowel-harmony placeholder in rule replacements: `A` becomes `a` after a
/// back vowel and `e` after a front vowel.
pub const HARMONY_A: char = 'A';

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixRule {
    pub suffix: String,
    pub replacement: String,
    pub min_stem_len: usize,
}

impl SuffixRule {
    fn suffix_len(&self) -> usize {
        self.suffix.chars().count()
    }

    fn apply(&self, word: &str) -> Option<String> {
        let stem = word.strip_suffix(self.suffix.as_str())?;
        if stem.chars().count() < self.min_stem_len {
            return None;
        }
        let vowel_source = last_vowel(stem).or_else(|| last_vowel(&self.suffix));
        let harmonized = if vowel_source.is_some_and(is_front_vowel) {
            'e'
        } else {
            'a'
        };
        let mut out = String::with_capacity(stem.len() + self.replacement.len());
        out.push_str(stem);
        out.extend(
            self.replacement
                .chars()
                .map(|c| if c == HARMONY_A { harmonized } else { c }),
        );
        Some(out)
    }
}

const BACK_VOWELS: [char; 4] = ['a', 'ı', 'o', 'u'];
const FRONT_VOWELS: [char; 4] = ['e', 'i', 'ö', 'ü'];

fn is_front_vowel(c: char) -> bool {
    FRONT_VOWELS.contains(&c)
}

fn last_vowel(s: &str) -> Option<char> {
    s.chars()
        .rev()
        .find(|c| BACK_VOWELS.contains(c) || FRONT_VOWELS.contains(c))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaLexicon {
    exact: HashMap<String, String>,
    /// Longest suffix first; equal lengths keep their file order.
    rules: Vec<SuffixRule>,
}

impl LemmaLexicon {
    pub fn new(exact: HashMap<String, String>, mut rules: Vec<SuffixRule>) -> Result<Self> {
        for (surface, lemma) in &exact {
            for w in [surface, lemma] {
                if Token::new(w.as_str()).is_err() {
                    return Err(Error::Data(format!("lemma entry {w:?} is not a lowercase word")));
                }
            }
        }
        for rule in &rules {
            let replacement_ok = rule
                .replacement
                .chars()
                .all(|c| c == HARMONY_A || (c.is_alphabetic() && !c.is_uppercase()));
            if Token::new(rule.suffix.as_str()).is_err() || !replacement_ok {
                return Err(Error::Data(format!("malformed suffix rule {rule:?}")));
            }
        }
        rules.sort_by_key(|r| std::cmp::Reverse(r.suffix_len()));
        Ok(LemmaLexicon { exact, rules })
    }

    pub fn turkish_default() -> Self {
        let exact = parse_exact(BUNDLED_EXACT, "builtin lemma table").expect("bundled table parses");
        let rules = parse_rules(BUNDLED_RULES, "builtin suffix rules").expect("bundled rules parse");
        LemmaLexicon::new(exact, rules).expect("bundled lemma data is valid")
    }

    pub fn load(exact_path: impl AsRef<Path>, rules_path: impl AsRef<Path>) -> Result<Self> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
        let (exact_path, rules_path) = (exact_path.as_ref(), rules_path.as_ref());
        let exact = parse_exact(&read(exact_path)?, &exact_path.display().to_string())?;
        let rules = parse_rules(&read(rules_path)?, &rules_path.display().to_string())?;
        LemmaLexicon::new(exact, rules)
    }

    pub fn exact(&self) -> &HashMap<String, String> {
        &self.exact
    }

    pub fn rules(&self) -> &[SuffixRule] {
        &self.rules
    }

    fn lemma_of(&self, word: &str) -> Option<String> {
        if let Some(lemma) = self.exact.get(word) {
            return Some(lemma.clone());
        }
        self.rules.iter().find_map(|r| r.apply(word))
    }
}

fn content_lines<'a>(text: &'a str) -> impl Iterator<Item = (usize, &'a str)> + 'a {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

/// `surface<TAB>lemma` per line.
pub fn parse_exact(text: &str, origin: &str) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for (row, line) in content_lines(text) {
        let (surface, lemma) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(origin, row, "expected surface<TAB>lemma"))?;
        let (surface, lemma) = (turkish_lowercase(surface.trim()), turkish_lowercase(lemma.trim()));
        if surface.is_empty() || lemma.is_empty() {
            return Err(Error::parse(origin, row, "empty field"));
        }
        if map.insert(surface.clone(), lemma).is_some() {
            return Err(Error::parse(origin, row, format!("duplicate surface form {surface:?}")));
        }
    }
    Ok(map)
}

/// `suffix<TAB>replacement<TAB>min_stem_len` per line; the replacement may be empty.
pub fn parse_rules(text: &str, origin: &str) -> Result<Vec<SuffixRule>> {
    let mut rules = Vec::new();
    for (row, line) in content_lines(text) {
        let fields: Vec<&str> = line.split('\t').collect();
        let [suffix, replacement, min_stem] = fields[..] else {
            return Err(Error::parse(
                origin,
                row,
                "expected suffix<TAB>replacement<TAB>min_stem_len",
            ));
        };
        let min_stem_len = min_stem
            .trim()
            .parse()
            .map_err(|_| Error::parse(origin, row, format!("invalid min_stem_len {min_stem:?}")))?;
        rules.push(SuffixRule {
            suffix: suffix.trim().to_owned(),
            replacement: replacement.trim().to_owned(),
            min_stem_len,
        });
    }
    Ok(rules)
}

/// Exact table hit, else the first applicable suffix rule, else the token itself.
pub fn lemmatize_token(lex: &LemmaLexicon, token: &Token) -> Token {
    lex.lemma_of(token.as_str())
        .and_then(|l| Token::new(l).ok())
        .unwrap_or_else(|| token.clone())
}

pub fn lemmatize_sentence(lex: &LemmaLexicon, tokens: &[Token]) -> Vec<Token> {
    tokens.iter().map(|t| lemmatize_token(lex, t)).collect()
}
