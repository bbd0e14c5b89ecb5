//! Labeled review corpora: CSV ingestion, seeded train/test splits and a
//! synthetic generator with ground-truth typo records.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::bundled::SYNTH_VOCAB as BUNDLED_SYNTH_VOCAB;
use crate::error::{Error, Result};
use crate::rng;
use crate::spellkit::KeyboardMatrix;

/// Binary sentiment. Encoded as `1` (positive) and `0` (negative) in every file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn from_u8(value: u8) -> Option<Self> {
        match value {
            0 => Some(Label::Negative),
            1 => Some(Label::Positive),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Label::Negative => 0,
            Label::Positive => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.as_u8())
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

impl From<Label> for u8 {
    fn from(label: Label) -> u8 {
        label.as_u8()
    }
}

impl TryFrom<u8> for Label {
    type Error = String;

    fn try_from(value: u8) -> std::result::Result<Self, Self::Error> {
        Label::from_u8(value).ok_or_else(|| format!("label must be 0 or 1, got {value}"))
    }
}

impl From<bool> for Label {
    fn from(positive: bool) -> Self {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// A raw review with its sentiment. The text is kept verbatim; it is only
/// required to contain something other than whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledComment {
    text: String,
    label: Label,
}

impl LabeledComment {
    pub fn new(text: impl Into<String>, label: Label) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::Data("comment text is empty".into()));
        }
        Ok(LabeledComment { text, label })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn label(&self) -> Label {
        self.label
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    items: Vec<LabeledComment>,
    provenance: String,
}

impl Corpus {
    /// An empty corpus to be filled with [`Corpus::push`].
    pub fn new(provenance: impl Into<String>) -> Self {
        Corpus {
            items: Vec::new(),
            provenance: provenance.into(),
        }
    }

    pub fn from_items(items: Vec<LabeledComment>, provenance: impl Into<String>) -> Self {
        Corpus {
            items,
            provenance: provenance.into(),
        }
    }

    pub fn push(&mut self, item: LabeledComment) {
        self.items.push(item);
    }

    pub fn items(&self) -> &[LabeledComment] {
        &self.items
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.items.iter().map(LabeledComment::label).collect()
    }

    /// Number of (negative, positive) items.
    pub fn label_counts(&self) -> (usize, usize) {
        let pos = self.items.iter().filter(|c| c.label.is_positive()).count();
        (self.items.len() - pos, pos)
    }

    /// Consumers that train or evaluate need at least two items covering both classes.
    pub fn ensure_usable(&self) -> Result<()> {
        let (neg, pos) = self.label_counts();
        if self.items.len() < 2 || neg == 0 || pos == 0 {
            return Err(Error::Data(format!(
                "corpus '{}' needs at least 2 items with both labels (negative={neg}, positive={pos})",
                self.provenance
            )));
        }
        Ok(())
    }

    pub fn select(&self, indices: &[usize], provenance: impl Into<String>) -> Corpus {
        Corpus {
            items: indices.iter().map(|&i| self.items[i].clone()).collect(),
            provenance: provenance.into(),
        }
    }

    pub fn split(&self, spec: &SplitSpec) -> Result<(Corpus, Corpus)> {
        let (train, test) = split_indices(self.items.len(), spec)?;
        Ok((
            self.select(&train, format!("{}#train", self.provenance)),
            self.select(&test, format!("{}#test", self.provenance)),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.9,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Result<Self> {
        let spec = SplitSpec { train_fraction, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

/// Minimum corpus size accepted by [`split_indices`].
pub const MIN_SPLIT_SIZE: usize = 10;

/// Seeded Fisher-Yates shuffle of `0..n`; the first `round(train_fraction * n)`
/// shuffled indices form the training part.
pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    spec.validate()?;
    if n < MIN_SPLIT_SIZE {
        return Err(Error::Data(format!(
            "corpus has {n} items; splitting needs at least {MIN_SPLIT_SIZE}"
        )));
    }
    let n_train = (spec.train_fraction * n as f64).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::Data(format!(
            "train_fraction {} leaves an empty partition for {n} items",
            spec.train_fraction
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::seeded(spec.seed));
    let test = order.split_off(n_train);
    Ok((order, test))
}

const CSV_HEADER: [&str; 2] = ["text", "label"];

pub fn load_csv(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, path.display().to_string())
}

/// Parses the `text,label` CSV dialect from any reader.
pub fn read_csv<R: Read>(reader: R, origin: impl Into<String>) -> Result<Corpus> {
    let origin = origin.into();
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::parse(&origin, 0, format!("unreadable header: {e}")))?;
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::parse(
            &origin,
            0,
            format!(
                "expected header `text,label`, found `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut corpus = Corpus::new(origin.clone());
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::parse(&origin, row, e.to_string()))?;
        let label_field = record[1].trim();
        let label = label_field
            .parse::<u8>()
            .ok()
            .and_then(Label::from_u8)
            .ok_or_else(|| Error::parse(&origin, row, format!("label must be 0 or 1, got {label_field:?}")))?;
        let item = LabeledComment::new(&record[0], label).map_err(|_| Error::parse(&origin, row, "empty text"))?;
        corpus.push(item);
    }
    Ok(corpus)
}

pub fn write_csv(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(corpus, file).map_err(|e| match e {
        Error::Data(msg) => Error::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_csv_to<W: Write>(corpus: &Corpus, writer: W) -> Result<()> {
    let rows = corpus.items.iter().map(|c| (c.text.as_str(), c.label.as_u8()));
    write_rows(writer, rows)
}

/// Shared writer for the `text,label` dialect (LF terminators, minimal RFC 4180 quoting).
pub(crate) fn write_rows<'a, W: Write>(writer: W, rows: impl Iterator<Item = (&'a str, u8)>) -> Result<()> {
    let mut wtr = csv_writer(writer);
    let fail = |e: csv::Error| Error::Data(format!("csv write failed: {e}"));
    wtr.write_record(CSV_HEADER).map_err(fail)?;
    for (text, label) in rows {
        wtr.write_record([text, &label.to_string()]).map_err(fail)?;
    }
    wtr.flush().map_err(|e| Error::Data(format!("csv write failed: {e}")))?;
    Ok(())
}

pub(crate) fn csv_writer<W: Write>(writer: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(writer)
}

/// Parameters of the synthetic review generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_docs: usize,
    pub vocab_pos: Vec<String>,
    pub vocab_neg: Vec<String>,
    pub vocab_neutral: Vec<String>,
    pub typo_rate: f64,
    pub seed: u64,
}

/// One injected keyboard typo: word `word` of document `doc` was typed as
/// `typed` instead of `original`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectedTypo {
    pub doc: usize,
    pub word: usize,
    pub original: String,
    pub typed: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    /// Every typo injected, in document then word order.
    pub typos: Vec<InjectedTypo>,
}

const MIN_DOC_WORDS: usize = 5;
const MAX_DOC_WORDS: usize = 15;
/// Probability that a word slot holds a sentiment word rather than a neutral one.
const SENTIMENT_SHARE: f64 = 0.4;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SyntheticSpecFile {
    n_docs: usize,
    #[serde(default)]
    typo_rate: f64,
    #[serde(default)]
    seed: u64,
    vocab_pos: Option<Vec<String>>,
    vocab_neg: Option<Vec<String>>,
    vocab_neutral: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct VocabLists {
    vocab_pos: Vec<String>,
    vocab_neg: Vec<String>,
    vocab_neutral: Vec<String>,
}

fn bundled_vocab() -> VocabLists {
    toml::from_str(BUNDLED_SYNTH_VOCAB).expect("bundled synthetic vocabulary parses")
}

impl SyntheticSpec {
    /// The bundled review vocabulary, whose words are all in the bundled lexicon.
    pub fn with_default_vocab(n_docs: usize, typo_rate: f64, seed: u64) -> Self {
        let v = bundled_vocab();
        SyntheticSpec {
            n_docs,
            vocab_pos: v.vocab_pos,
            vocab_neg: v.vocab_neg,
            vocab_neutral: v.vocab_neutral,
            typo_rate,
            seed,
        }
    }

    /// Parses a TOML spec. `n_docs` is required; omitted vocabulary lists
    /// fall back to the bundled ones.
    pub fn from_toml(text: &str, origin: &str) -> Result<Self> {
        let file: SyntheticSpecFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {}", e.message())))?;
        let defaults = bundled_vocab();
        Ok(SyntheticSpec {
            n_docs: file.n_docs,
            vocab_pos: file.vocab_pos.unwrap_or(defaults.vocab_pos),
            vocab_neg: file.vocab_neg.unwrap_or(defaults.vocab_neg),
            vocab_neutral: file.vocab_neutral.unwrap_or(defaults.vocab_neutral),
            typo_rate: file.typo_rate,
            seed: file.seed,
        })
    }

    pub fn validate(&self, keyboard: &KeyboardMatrix) -> Result<()> {
        if self.n_docs == 0 {
            return Err(Error::Config("n_docs must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.typo_rate) {
            return Err(Error::Config(format!(
                "typo_rate must lie in [0, 1], got {}",
                self.typo_rate
            )));
        }
        let lists = [
            ("vocab_pos", &self.vocab_pos),
            ("vocab_neg", &self.vocab_neg),
            ("vocab_neutral", &self.vocab_neutral),
        ];
        let mut seen: HashSet<&str> = HashSet::new();
        for (name, list) in lists {
            if list.is_empty() {
                return Err(Error::Config(format!("{name} is empty")));
            }
            let mut own: HashSet<&str> = HashSet::new();
            for word in list {
                if word.is_empty() || !word.chars().all(|c| keyboard.contains(c)) {
                    return Err(Error::Config(format!(
                        "{name}: word {word:?} must be non-empty and use keyboard-matrix letters only"
                    )));
                }
                if own.insert(word) && !seen.insert(word) {
                    return Err(Error::Config(format!(
                        "{name}: word {word:?} also appears in another list"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Generates a balanced corpus: positive documents mix `vocab_pos` with
/// `vocab_neutral`, negative ones `vocab_neg` with `vocab_neutral`. Each word
/// independently receives, with probability `typo_rate`, one substitution by a
/// key adjacent to one of its letters.
pub fn generate_synthetic(spec: &SyntheticSpec, keyboard: &KeyboardMatrix) -> Result<SyntheticCorpus> {
    spec.validate(keyboard)?;
    let mut rng = rng::seeded(spec.seed);

    let n_neg = spec.n_docs / 2;
    let mut labels: Vec<Label> = (0..spec.n_docs).map(|i| Label::from(i >= n_neg)).collect();
    labels.shuffle(&mut rng);

    let mut corpus = Corpus::new(format!("synthetic(seed={})", spec.seed));
    let mut typos = Vec::new();
    for (doc, &label) in labels.iter().enumerate() {
        let sentiment = match label {
            Label::Positive => &spec.vocab_pos,
            Label::Negative => &spec.vocab_neg,
        };
        let len = rng.random_range(MIN_DOC_WORDS..=MAX_DOC_WORDS);
        let forced = rng.random_range(0..len);
        let mut words = Vec::with_capacity(len);
        for slot in 0..len {
            let list = if slot == forced || rng.random_bool(SENTIMENT_SHARE) {
                sentiment
            } else {
                &spec.vocab_neutral
            };
            let original = list.choose(&mut rng).expect("validated non-empty").clone();
            let word = if spec.typo_rate > 0.0 && rng.random_bool(spec.typo_rate) {
                let typed = inject_typo(&original, keyboard, &mut rng);
                typos.push(InjectedTypo {
                    doc,
                    word: slot,
                    original,
                    typed: typed.clone(),
                });
                typed
            } else {
                original
            };
            words.push(word);
        }
        corpus.push(LabeledComment::new(words.join(" "), label)?);
    }
    Ok(SyntheticCorpus { corpus, typos })
}

fn inject_typo(word: &str, keyboard: &KeyboardMatrix, rng: &mut rng::Rng) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    let positions: Vec<usize> = (0..chars.len())
        .filter(|&i| !keyboard.neighbors(chars[i]).is_empty())
        .collect();
    let &pos = positions
        .choose(rng)
        .expect("every matrix letter has at least one neighbor");
    let &replacement = keyboard
        .neighbors(chars[pos])
        .choose(rng)
        .expect("non-empty neighbor list");
    chars[pos] = replacement;
    chars.into_iter().collect()
}
