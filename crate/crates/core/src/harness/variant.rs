use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{write_rows, Corpus, Label};
use crate::error::{Error, Result};
use crate::lemma::{lemmatize_token, LemmaLexicon};
use crate::spellkit::{correct_token, CorrectorConfig, KeyboardMatrix, Lexicon};
use crate::textnorm::{normalize, NormConfig, Token};

/// The six dataset variants of the ablation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "&'static str", try_from = "String")]
pub enum VariantId {
    /// Keyboard-aware correction, then lemmatization.
    Default,
    WordCorrection,
    Lemmatization,
    WordCorrectionNoKeyboard,
    WordCorrectionNoKeyboardPlusLemmatization,
    /// Only the steps shared by every variant (lowercase, tokenize, filter).
    NoOperation,
}

impl VariantId {
    pub const ALL: [VariantId; 6] = [
        VariantId::Default,
        VariantId::WordCorrection,
        VariantId::Lemmatization,
        VariantId::WordCorrectionNoKeyboard,
        VariantId::WordCorrectionNoKeyboardPlusLemmatization,
        VariantId::NoOperation,
    ];

    pub fn id(self) -> &'static str {
        match self {
            VariantId::Default => "default",
            VariantId::WordCorrection => "word-correction",
            VariantId::Lemmatization => "lemmatization",
            VariantId::WordCorrectionNoKeyboard => "word-correction-no-keyboard",
            VariantId::WordCorrectionNoKeyboardPlusLemmatization => "word-correction-no-keyboard-lemmatization",
            VariantId::NoOperation => "no-operation",
        }
    }

    /// Row label used in reports.
    pub fn title(self) -> &'static str {
        match self {
            VariantId::Default => "Default",
            VariantId::WordCorrection => "Word Correction",
            VariantId::Lemmatization => "Lemmatization",
            VariantId::WordCorrectionNoKeyboard => "Word Correction (No Keyboard)",
            VariantId::WordCorrectionNoKeyboardPlusLemmatization => "Word Correction (No Keyboard) + Lemmatization",
            VariantId::NoOperation => "No Operation",
        }
    }

    /// `Some(use_keyboard)` when the variant corrects spelling.
    pub fn correction(self) -> Option<bool> {
        match self {
            VariantId::Default | VariantId::WordCorrection => Some(true),
            VariantId::WordCorrectionNoKeyboard | VariantId::WordCorrectionNoKeyboardPlusLemmatization => Some(false),
            VariantId::Lemmatization | VariantId::NoOperation => None,
        }
    }

    pub fn lemmatizes(self) -> bool {
        matches!(
            self,
            VariantId::Default | VariantId::Lemmatization | VariantId::WordCorrectionNoKeyboardPlusLemmatization
        )
    }
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for VariantId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VariantId::ALL.into_iter().find(|v| v.id() == s).ok_or_else(|| {
            let ids: Vec<&str> = VariantId::ALL.iter().map(|v| v.id()).collect();
            Error::Config(format!("unknown variant {s:?}; expected one of {}", ids.join(", ")))
        })
    }
}

impl From<VariantId> for &'static str {
    fn from(v: VariantId) -> Self {
        v.id()
    }
}

impl TryFrom<String> for VariantId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Everything `apply_variant` needs.
#[derive(Debug, Clone)]
pub struct Resources {
    pub lexicon: Lexicon,
    pub keyboard: KeyboardMatrix,
    pub lemmas: LemmaLexicon,
    pub norm: NormConfig,
    /// Candidate limits for correction; `use_keyboard` is set by the variant.
    pub corrector: CorrectorConfig,
}

impl Resources {
    pub fn turkish_default() -> Self {
        Resources {
            lexicon: Lexicon::turkish_default(),
            keyboard: KeyboardMatrix::turkish_q(),
            lemmas: LemmaLexicon::turkish_default(),
            norm: NormConfig::turkish_default(),
            corrector: CorrectorConfig::default(),
        }
    }
}

/// A corpus after one variant's processing: token lists (possibly empty) with
/// the original labels, in the original order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessedCorpus {
    variant: VariantId,
    docs: Vec<Vec<Token>>,
    labels: Vec<Label>,
}

impl ProcessedCorpus {
    pub fn new(variant: VariantId, docs: Vec<Vec<Token>>, labels: Vec<Label>) -> Result<Self> {
        if docs.len() != labels.len() {
            return Err(Error::Dimension {
                expected: labels.len(),
                actual: docs.len(),
            });
        }
        Ok(ProcessedCorpus { variant, docs, labels })
    }

    pub fn variant(&self) -> VariantId {
        self.variant
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn docs(&self) -> &[Vec<Token>] {
        &self.docs
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Documents rejoined with single spaces.
    pub fn texts(&self) -> impl Iterator<Item = String> + '_ {
        self.docs.iter().map(|d| join_tokens(d))
    }

    pub fn select(&self, indices: &[usize]) -> ProcessedCorpus {
        ProcessedCorpus {
            variant: self.variant,
            docs: indices.iter().map(|&i| self.docs[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Writes the `text,label` dialect; documents left without tokens have empty text.
    pub fn write_csv_to<W: Write>(&self, writer: W) -> Result<()> {
        let texts: Vec<String> = self.texts().collect();
        write_rows(
            writer,
            texts
                .iter()
                .map(String::as_str)
                .zip(self.labels.iter().map(|l| l.as_u8())),
        )
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv_to(file)
    }

    /// Reads a file written by [`ProcessedCorpus::write_csv`]. Text must already be
    /// normalized: every space-separated piece has to be a valid token.
    pub fn read_csv<R: Read>(variant: VariantId, reader: R, origin: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = rdr
            .headers()
            .map_err(|e| Error::parse(origin, 0, format!("unreadable header: {e}")))?;
        if header.iter().ne(["text", "label"]) {
            return Err(Error::parse(origin, 0, "expected header `text,label`"));
        }
        let mut docs = Vec::new();
        let mut labels = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let row = i + 1;
            let record = record.map_err(|e| Error::parse(origin, row, e.to_string()))?;
            let label = record[1]
                .trim()
                .parse::<u8>()
                .ok()
                .and_then(Label::from_u8)
                .ok_or_else(|| Error::parse(origin, row, "label must be 0 or 1"))?;
            let tokens = record[0]
                .split(' ')
                .filter(|w| !w.is_empty())
                .map(|w| {
                    Token::new(w).map_err(|_| Error::parse(origin, row, format!("{w:?} is not a normalized token")))
                })
                .collect::<Result<Vec<_>>>()?;
            docs.push(tokens);
            labels.push(label);
        }
        Ok(ProcessedCorpus { variant, docs, labels })
    }

    pub fn load_csv(variant: VariantId, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        ProcessedCorpus::read_csv(variant, file, &path.display().to_string())
    }
}

pub fn join_tokens(tokens: &[Token]) -> String {
    tokens.iter().map(Token::as_str).collect::<Vec<_>>().join(" ")
}

/// Per-variant token processor. Correction and lemmatization are memoized per
/// distinct word, which is what makes whole-corpus runs cheap.
pub struct VariantProcessor<'a> {
    variant: VariantId,
    resources: &'a Resources,
    corrector: CorrectorConfig,
    memo: HashMap<Token, Token>,
}

impl<'a> VariantProcessor<'a> {
    pub fn new(variant: VariantId, resources: &'a Resources) -> Result<Self> {
        let corrector = CorrectorConfig {
            use_keyboard: variant.correction().unwrap_or(false),
            ..resources.corrector
        };
        if variant.correction().is_some() {
            corrector.validate()?;
        }
        Ok(VariantProcessor {
            variant,
            resources,
            corrector,
            memo: HashMap::new(),
        })
    }

    fn transform(&self, token: &Token) -> Token {
        let r = self.resources;
        let corrected = match self.variant.correction() {
            Some(_) => correct_token(&r.lexicon, &r.keyboard, token, &self.corrector),
            None => token.clone(),
        };
        if self.variant.lemmatizes() {
            lemmatize_token(&r.lemmas, &corrected)
        } else {
            corrected
        }
    }

    pub fn process(&mut self, text: &str) -> Vec<Token> {
        let tokens = normalize(text, &self.resources.norm);
        if self.variant == VariantId::NoOperation {
            return tokens;
        }
        tokens
            .into_iter()
            .map(|t| {
                if let Some(out) = self.memo.get(&t) {
                    return out.clone();
                }
                let out = self.transform(&t);
                self.memo.insert(t, out.clone());
                out
            })
            .collect()
    }
}

/// Lowercase, tokenize and filter every document, then apply the variant's
/// correction and/or lemmatization. Labels and order are preserved.
pub fn apply_variant(corpus: &Corpus, variant: VariantId, resources: &Resources) -> Result<ProcessedCorpus> {
    let mut processor = VariantProcessor::new(variant, resources)?;
    let docs = corpus.items().iter().map(|c| processor.process(c.text())).collect();
    ProcessedCorpus::new(variant, docs, corpus.labels())
}
