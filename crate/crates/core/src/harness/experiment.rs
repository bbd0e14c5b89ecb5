use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::grid::{grid_search, GridResult, GridSpec};
use super::metrics::evaluate;
use super::report::{emit_report, write_rows_csv};
use super::variant::{apply_variant, ProcessedCorpus, Resources, VariantId, VariantProcessor};
use crate::bundled;
use crate::corpus::{split_indices, write_csv_to, Corpus, Label, SplitSpec};
use crate::embed::{build_vocab, encode_sequence, pool_sentence, train_sgns, EmbeddingMatrix, SgnsParams, Vocab};
use crate::error::{Error, Result};
use crate::lemma::{parse_exact, parse_rules, LemmaLexicon};
use crate::models::{train_model, FeatureSet, ModelKind, ModelParams, Sample, TrainedModel};
use crate::rng::derive_seed;
use crate::spellkit::{CorrectorConfig, KeyboardMatrix, Lexicon};
use crate::textnorm::{parse_stopwords, NormConfig, Token, DEFAULT_MIN_TOKEN_LEN};

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Resource files. Any path left out uses the bundled Turkish data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResourceConfig {
    pub lexicon: Option<PathBuf>,
    pub keyboard: Option<PathBuf>,
    pub lemma_exact: Option<PathBuf>,
    pub lemma_rules: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub min_token_len: usize,
    pub corrector: CorrectorConfig,
}

impl Default for ResourceConfig {
    fn default() -> Self {
        ResourceConfig {
            lexicon: None,
            keyboard: None,
            lemma_exact: None,
            lemma_rules: None,
            stopwords: None,
            min_token_len: DEFAULT_MIN_TOKEN_LEN,
            corrector: CorrectorConfig::default(),
        }
    }
}

/// Where a resource came from and the SHA-256 of its bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceDigest {
    pub source: String,
    pub sha256: String,
}

fn read_resource(path: &Option<PathBuf>, builtin: &'static str) -> Result<(String, ResourceDigest)> {
    let (text, source) = match path {
        Some(p) => (
            std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
            p.display().to_string(),
        ),
        None => (builtin.to_owned(), "bundled".to_owned()),
    };
    let sha256 = sha256_hex(text.as_bytes());
    Ok((text, ResourceDigest { source, sha256 }))
}

impl ResourceConfig {
    fn resolve(&mut self, base: &Path) {
        for p in [
            &mut self.lexicon,
            &mut self.keyboard,
            &mut self.lemma_exact,
            &mut self.lemma_rules,
            &mut self.stopwords,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    pub fn load(&self) -> Result<(Resources, BTreeMap<String, ResourceDigest>)> {
        let mut digests = BTreeMap::new();
        let (text, d) = read_resource(&self.lexicon, bundled::LEXICON)?;
        let lexicon = Lexicon::parse(&text, &d.source)?;
        digests.insert("lexicon".to_owned(), d);
        let (text, d) = read_resource(&self.keyboard, bundled::KEYBOARD)?;
        let keyboard = KeyboardMatrix::parse(&text, &d.source)?;
        digests.insert("keyboard".to_owned(), d);
        let (text, d) = read_resource(&self.lemma_exact, bundled::LEMMA_EXACT)?;
        let exact = parse_exact(&text, &d.source)?;
        digests.insert("lemma_exact".to_owned(), d);
        let (text, d) = read_resource(&self.lemma_rules, bundled::LEMMA_RULES)?;
        let rules = parse_rules(&text, &d.source)?;
        digests.insert("lemma_rules".to_owned(), d);
        let (text, d) = read_resource(&self.stopwords, bundled::STOPWORDS)?;
        let norm = NormConfig::new(parse_stopwords(&text, &d.source)?, self.min_token_len)?;
        digests.insert("stopwords".to_owned(), d);
        let resources = Resources {
            lexicon,
            keyboard,
            lemmas: LemmaLexicon::new(exact, rules)?,
            norm,
            corrector: self.corrector,
        };
        Ok((resources, digests))
    }
}

/// A full experiment: which variants and models to run, and every setting
/// they need. Stream seeds for the split, the embeddings and the GRU are all
/// derived from `seed`; the `seed` fields of `sgns` and `params.gru` are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub variants: Vec<VariantId>,
    pub models: Vec<ModelKind>,
    pub train_fraction: f64,
    pub sequence_len: usize,
    pub min_count: u64,
    /// Labeled CSV. Only consulted by callers that load the corpus from the config.
    pub corpus: Option<PathBuf>,
    /// Directory for materialized variants, reused across runs.
    pub cache_dir: Option<PathBuf>,
    pub resources: ResourceConfig,
    pub sgns: SgnsParams,
    pub params: ModelParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            variants: VariantId::ALL.to_vec(),
            models: ModelKind::ALL.to_vec(),
            train_fraction: 0.9,
            sequence_len: crate::embed::DEFAULT_SEQUENCE_LEN,
            min_count: crate::embed::DEFAULT_MIN_COUNT,
            corpus: None,
            cache_dir: None,
            resources: ResourceConfig::default(),
            sgns: SgnsParams::default(),
            params: ModelParams::default(),
        }
    }
}

/// Seeds actually used by a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub master: u64,
    pub split: u64,
    pub sgns: u64,
    pub gru: u64,
}

impl SeedRecord {
    pub fn from_master(master: u64) -> Self {
        SeedRecord {
            master,
            split: derive_seed(master, "split"),
            sgns: derive_seed(master, "sgns"),
            gru: derive_seed(master, "gru"),
        }
    }
}

impl ExperimentConfig {
    /// Parses TOML. Relative paths are resolved against `base_dir`.
    pub fn from_toml(text: &str, origin: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {}", e.message())))?;
        if let Some(base) = base_dir {
            config.resources.resolve(base);
            for p in [&mut config.corpus, &mut config.cache_dir].into_iter().flatten() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentConfig::from_toml(&text, &path.display().to_string(), path.parent())
    }

    pub fn validate(&self) -> Result<()> {
        fn distinct<T: Ord + Copy>(items: &[T]) -> bool {
            let mut v = items.to_vec();
            v.sort();
            v.windows(2).all(|w| w[0] != w[1])
        }
        if self.variants.is_empty() || !distinct(&self.variants) {
            return Err(Error::Config(
                "variants must be a non-empty list without repeats".into(),
            ));
        }
        if self.models.is_empty() || !distinct(&self.models) {
            return Err(Error::Config("models must be a non-empty list without repeats".into()));
        }
        SplitSpec::new(self.train_fraction, 0)?;
        if self.sequence_len == 0 {
            return Err(Error::Config("sequence_len must be positive".into()));
        }
        if self.min_count == 0 {
            return Err(Error::Config("min_count must be at least 1".into()));
        }
        self.sgns.validate()?;
        self.params.gru.validate()?;
        self.params.knn.validate()?;
        self.params.svm.validate()?;
        if self.variants.iter().any(|v| v.correction().is_some()) {
            let keyboard = self.variants.iter().any(|v| v.correction() == Some(true));
            CorrectorConfig {
                use_keyboard: keyboard,
                ..self.resources.corrector
            }
            .validate()?;
        }
        Ok(())
    }

    pub fn seeds(&self) -> SeedRecord {
        SeedRecord::from_master(self.seed)
    }

    pub fn sha256(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("config serializes"))
    }

    fn sgns_params(&self) -> SgnsParams {
        SgnsParams {
            seed: self.seeds().sgns,
            ..self.sgns.clone()
        }
    }

    fn model_params(&self) -> ModelParams {
        let mut params = self.params.clone();
        params.gru.seed = self.seeds().gru;
        params
    }
}

pub fn corpus_sha256(corpus: &Corpus) -> Result<String> {
    let mut bytes = Vec::new();
    write_csv_to(corpus, &mut bytes)?;
    Ok(sha256_hex(&bytes))
}

/// Pooled vectors (and, when `sequence_len` is set, padded sequences) for
/// the given documents.
pub fn featurize(
    docs: &[Vec<Token>],
    labels: &[Label],
    vocab: &Vocab,
    embeddings: &EmbeddingMatrix,
    sequence_len: Option<usize>,
) -> Result<FeatureSet> {
    let vectors = docs
        .iter()
        .map(|d| pool_sentence(embeddings, vocab, d).vector)
        .collect();
    let features = FeatureSet::new(vectors, labels.to_vec())?;
    match sequence_len {
        Some(len) => features.with_sequences(
            docs.iter()
                .map(|d| encode_sequence(embeddings, vocab, d, len))
                .collect(),
        ),
        None => Ok(features),
    }
}

/// One variant, materialized and embedded, split into train and test features.
#[derive(Debug, Clone)]
pub struct PreparedVariant {
    pub processed: ProcessedCorpus,
    pub vocab: Vocab,
    pub embeddings: EmbeddingMatrix,
    pub train: FeatureSet,
    pub test: FeatureSet,
}

/// The corpus and resources shared by every cell of a run.
pub struct ExperimentContext<'a> {
    pub config: &'a ExperimentConfig,
    pub corpus: &'a Corpus,
    pub corpus_sha256: String,
    pub resources: Resources,
    pub resource_digests: BTreeMap<String, ResourceDigest>,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

impl<'a> ExperimentContext<'a> {
    pub fn new(corpus: &'a Corpus, config: &'a ExperimentConfig) -> Result<Self> {
        config.validate()?;
        corpus.ensure_usable()?;
        let (resources, resource_digests) = config.resources.load()?;
        let (train_indices, test_indices) = split_indices(
            corpus.len(),
            &SplitSpec::new(config.train_fraction, config.seeds().split)?,
        )?;
        Ok(ExperimentContext {
            config,
            corpus,
            corpus_sha256: corpus_sha256(corpus)?,
            resources,
            resource_digests,
            train_indices,
            test_indices,
        })
    }

    fn cache_path(&self, variant: VariantId) -> Option<PathBuf> {
        let dir = self.config.cache_dir.as_ref()?;
        let key = serde_json::json!({
            "corpus": self.corpus_sha256,
            "resources": self.resource_digests,
            "min_token_len": self.config.resources.min_token_len,
            "corrector": self.config.resources.corrector,
            "variant": variant,
        });
        let digest = sha256_hex(key.to_string().as_bytes());
        Some(dir.join(format!("{variant}-{}.csv", &digest[..16])))
    }

    /// `apply_variant`, reading and writing the cache directory when configured.
    pub fn materialize(&self, variant: VariantId) -> Result<ProcessedCorpus> {
        let Some(path) = self.cache_path(variant) else {
            return apply_variant(self.corpus, variant, &self.resources);
        };
        if path.exists() {
            let cached = ProcessedCorpus::load_csv(variant, &path)?;
            if cached.labels() == self.corpus.labels().as_slice() {
                log::debug!("reusing materialized {variant} from {}", path.display());
                return Ok(cached);
            }
            log::warn!("ignoring stale cache file {}", path.display());
        }
        let processed = apply_variant(self.corpus, variant, &self.resources)?;
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        processed.write_csv(&path)?;
        Ok(processed)
    }

    /// Materializes the variant, trains embeddings on the training split only,
    /// then featurizes both splits.
    pub fn prepare(&self, variant: VariantId, with_sequences: bool) -> Result<PreparedVariant> {
        let processed = self.materialize(variant)?;
        let train_part = processed.select(&self.train_indices);
        let test_part = processed.select(&self.test_indices);
        let vocab = build_vocab(train_part.docs(), self.config.min_count)?;
        let embeddings = train_sgns(train_part.docs(), &vocab, &self.config.sgns_params())?;
        let seq_len = with_sequences.then_some(self.config.sequence_len);
        let train = featurize(train_part.docs(), train_part.labels(), &vocab, &embeddings, seq_len)?;
        let test = featurize(test_part.docs(), test_part.labels(), &vocab, &embeddings, seq_len)?;
        Ok(PreparedVariant {
            processed,
            vocab,
            embeddings,
            train,
            test,
        })
    }

    /// Trains one model on the prepared training split and scores it on the test split.
    pub fn run_cell(
        &self,
        variant: VariantId,
        kind: ModelKind,
        prepared: &PreparedVariant,
    ) -> Result<(ResultRow, TrainedModel)> {
        let start = Instant::now();
        let model = train_model(kind, &self.config.model_params(), &prepared.train)?;
        let eval = evaluate(&model, &prepared.test)?;
        let m = eval.metrics;
        let row = ResultRow {
            variant,
            model: kind,
            accuracy: m.map(|m| m.accuracy),
            precision: m.map(|m| m.precision),
            recall: m.map(|m| m.recall),
            f_measure: m.map(|m| m.f_measure),
            mse: eval.mse,
            runtime_s: start.elapsed().as_secs_f64(),
        };
        Ok((row, model))
    }

    pub fn bundle(&self, variant: VariantId, prepared: &PreparedVariant, model: TrainedModel) -> ModelBundle {
        ModelBundle {
            variant,
            resources: self.config.resources.clone(),
            resource_digests: self.resource_digests.clone(),
            sequence_len: self.config.sequence_len,
            vocab: prepared.vocab.clone(),
            embeddings: prepared.embeddings.clone(),
            model,
        }
    }
}

/// One (variant, model) result. Accuracy and its companions are absent for
/// linear regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub variant: VariantId,
    pub model: ModelKind,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f_measure: Option<f64>,
    pub mse: f64,
    pub runtime_s: f64,
}

impl ResultRow {
    /// Equality ignoring `runtime_s`.
    pub fn same_scores(&self, other: &ResultRow) -> bool {
        ResultRow {
            runtime_s: 0.0,
            ..self.clone()
        } == ResultRow {
            runtime_s: 0.0,
            ..other.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub variant: VariantId,
    pub model: ModelKind,
    pub status: CellStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seeds: SeedRecord,
    pub config_sha256: String,
    pub corpus_sha256: String,
    pub corpus_size: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub resources: BTreeMap<String, ResourceDigest>,
    pub cells: Vec<CellRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRun {
    pub rows: Vec<ResultRow>,
    pub manifest: Manifest,
}

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RESULTS_FILE: &str = "results.csv";
pub const REPORT_FILE: &str = "report.txt";

impl ExperimentRun {
    /// Writes the manifest, the long-form results CSV and the text report.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let manifest = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, manifest + "\n").map_err(|e| Error::io(&path, e))?;
        let path = dir.join(RESULTS_FILE);
        let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        write_rows_csv(&self.rows, file)?;
        if !self.rows.is_empty() {
            let path = dir.join(REPORT_FILE);
            std::fs::write(&path, emit_report(&self.rows)?.text).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

/// Runs every configured (variant, model) cell. A failing cell, or a variant
/// that cannot be prepared, is recorded in the manifest and the rest proceed.
pub fn run_experiment(corpus: &Corpus, config: &ExperimentConfig) -> Result<ExperimentRun> {
    let ctx = ExperimentContext::new(corpus, config)?;
    let with_sequences = config.models.iter().any(|m| m.needs_sequences());
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for &variant in &config.variants {
        let outcomes: Vec<(ModelKind, std::result::Result<ResultRow, String>)> =
            match ctx.prepare(variant, with_sequences) {
                Ok(prepared) => config
                    .models
                    .par_iter()
                    .map(|&kind| {
                        let outcome = ctx.run_cell(variant, kind, &prepared).map(|(row, _)| row);
                        (kind, outcome.map_err(|e| e.to_string()))
                    })
                    .collect(),
                Err(e) => {
                    log::warn!("variant {variant} failed: {e}");
                    config.models.iter().map(|&kind| (kind, Err(e.to_string()))).collect()
                }
            };
        for (model, outcome) in outcomes {
            match outcome {
                Ok(row) => {
                    log::info!("{variant} / {model}: accuracy {:?}, mse {:.4}", row.accuracy, row.mse);
                    rows.push(row);
                    cells.push(CellRecord {
                        variant,
                        model,
                        status: CellStatus::Ok,
                        error: None,
                    });
                }
                Err(e) => {
                    log::warn!("{variant} / {model} failed: {e}");
                    cells.push(CellRecord {
                        variant,
                        model,
                        status: CellStatus::Failed,
                        error: Some(e),
                    });
                }
            }
        }
    }
    Ok(ExperimentRun {
        rows,
        manifest: Manifest {
            seeds: config.seeds(),
            config_sha256: config.sha256(),
            corpus_sha256: ctx.corpus_sha256.clone(),
            corpus_size: corpus.len(),
            train_size: ctx.train_indices.len(),
            test_size: ctx.test_indices.len(),
            resources: ctx.resource_digests.clone(),
            cells,
        },
    })
}

/// Trains a single (variant, model) cell and returns its scores with a
/// self-contained bundle for later prediction.
pub fn train_single(
    corpus: &Corpus,
    config: &ExperimentConfig,
    variant: VariantId,
    kind: ModelKind,
) -> Result<(ResultRow, ModelBundle)> {
    let ctx = ExperimentContext::new(corpus, config)?;
    let prepared = ctx.prepare(variant, kind.needs_sequences())?;
    let (row, model) = ctx.run_cell(variant, kind, &prepared)?;
    Ok((row, ctx.bundle(variant, &prepared, model)))
}

/// Grid search on the training split of one variant.
pub fn tune(corpus: &Corpus, config: &ExperimentConfig, variant: VariantId, grid: &GridSpec) -> Result<GridResult> {
    let ctx = ExperimentContext::new(corpus, config)?;
    let prepared = ctx.prepare(variant, grid.model.needs_sequences())?;
    grid_search(&prepared.train, grid, &config.model_params())
}

pub const BUNDLE_FORMAT: &str = "yorum-bundle";
pub const BUNDLE_VERSION: u32 = 1;

/// Everything needed to score raw text: preprocessing settings, vocabulary,
/// embeddings and the trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub variant: VariantId,
    pub resources: ResourceConfig,
    /// Resource hashes at training time; loading fails if the files changed.
    pub resource_digests: BTreeMap<String, ResourceDigest>,
    pub sequence_len: usize,
    pub vocab: Vocab,
    pub embeddings: EmbeddingMatrix,
    pub model: TrainedModel,
}

#[derive(Serialize, Deserialize)]
struct BundleFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    bundle: ModelBundle,
}

/// The hard label (if the model has one) and real-valued score for a text.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub tokens: Vec<Token>,
    pub score: f64,
    pub label: Option<Label>,
}

impl ModelBundle {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(&BundleFile {
            format: BUNDLE_FORMAT.into(),
            version: BUNDLE_VERSION,
            bundle: self.clone(),
        })
        .map_err(|e| Error::Data(format!("cannot serialize bundle: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: BundleFile =
            serde_json::from_str(text).map_err(|e| Error::Data(format!("invalid model bundle: {e}")))?;
        if file.format != BUNDLE_FORMAT || file.version != BUNDLE_VERSION {
            return Err(Error::Data(format!(
                "unsupported bundle {} v{}; expected {BUNDLE_FORMAT} v{BUNDLE_VERSION}",
                file.format, file.version
            )));
        }
        if file.bundle.vocab.len() != file.bundle.embeddings.rows() {
            return Err(Error::Data("bundle vocabulary and embeddings disagree in size".into()));
        }
        Ok(file.bundle)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        ModelBundle::from_json(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn predictor(&self) -> Result<Predictor<'_>> {
        let (resources, digests) = self.resources.load()?;
        for (name, d) in &digests {
            if self
                .resource_digests
                .get(name)
                .is_some_and(|old| old.sha256 != d.sha256)
            {
                return Err(Error::Data(format!(
                    "resource {name} ({}) changed since training",
                    d.source
                )));
            }
        }
        Ok(Predictor {
            bundle: self,
            resources,
        })
    }
}

pub struct Predictor<'a> {
    bundle: &'a ModelBundle,
    resources: Resources,
}

impl Predictor<'_> {
    pub fn predict(&self, text: &str) -> Result<Prediction> {
        let b = self.bundle;
        let tokens = VariantProcessor::new(b.variant, &self.resources)?.process(text);
        let pooled = pool_sentence(&b.embeddings, &b.vocab, &tokens);
        let sequence = b
            .model
            .kind()
            .needs_sequences()
            .then(|| encode_sequence(&b.embeddings, &b.vocab, &tokens, b.sequence_len));
        let out = b.model.output(Sample {
            vector: &pooled.vector,
            sequence: sequence.as_ref(),
        })?;
        Ok(Prediction {
            tokens,
            score: out.score,
            label: out.label,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_synthetic, SyntheticSpec};

    fn small_config() -> ExperimentConfig {
        let mut c = ExperimentConfig {
            seed: 3,
            sgns: SgnsParams {
                dim: 16,
                epochs: 2,
                ..SgnsParams::default()
            },
            ..ExperimentConfig::default()
        };
        c.params.gru.hidden = vec![4];
        c.params.gru.epochs = 2;
        c.sequence_len = 12;
        c
    }

    fn synthetic(n: usize, typo_rate: f64) -> Corpus {
        generate_synthetic(
            &SyntheticSpec::with_default_vocab(n, typo_rate, 5),
            &KeyboardMatrix::turkish_q(),
        )
        .unwrap()
        .corpus
    }

    #[test]
    fn config_toml_defaults_and_errors() {
        let c = ExperimentConfig::from_toml("", "mem", None).unwrap();
        assert_eq!(c, ExperimentConfig::default());
        let text = "seed = 9\nvariants = [\"default\", \"no-operation\"]\nmodels = [\"naive-bayes\"]\n[sgns]\ndim = 8\n[params.knn]\nk = 3\n[resources]\nlexicon = \"lex.tsv\"\n";
        let c = ExperimentConfig::from_toml(text, "mem", Some(Path::new("/cfg"))).unwrap();
        assert_eq!(c.variants, vec![VariantId::Default, VariantId::NoOperation]);
        assert_eq!((c.sgns.dim, c.params.knn.k), (8, 3));
        assert_eq!(c.resources.lexicon.as_deref(), Some(Path::new("/cfg/lex.tsv")));
        for bad in [
            "sed = 1",
            "models = []",
            "variants = [\"default\", \"default\"]",
            "[params.knn]\nk = 4",
            "train_fraction = 1.5",
        ] {
            assert!(
                matches!(ExperimentConfig::from_toml(bad, "mem", None), Err(Error::Config(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn bundled_resources_match_defaults() {
        let (r, digests) = ResourceConfig::default().load().unwrap();
        let d = Resources::turkish_default();
        assert_eq!(
            (r.lexicon, r.keyboard, r.lemmas, r.norm),
            (d.lexicon, d.keyboard, d.lemmas, d.norm)
        );
        assert_eq!(digests.len(), 5);
        assert_eq!(digests["lexicon"].sha256, sha256_hex(bundled::LEXICON.as_bytes()));
    }

    #[test]
    fn cross_product_rows_and_determinism() {
        let corpus = synthetic(120, 0.2);
        let config = ExperimentConfig {
            variants: vec![VariantId::Default, VariantId::NoOperation],
            models: vec![ModelKind::NaiveBayes, ModelKind::LinearRegression],
            ..small_config()
        };
        let a = run_experiment(&corpus, &config).unwrap();
        assert_eq!(a.rows.len(), 4);
        for r in &a.rows {
            assert_eq!(r.accuracy.is_none(), r.model == ModelKind::LinearRegression);
        }
        let b = run_experiment(&corpus, &config).unwrap();
        assert!(a.rows.iter().zip(&b.rows).all(|(x, y)| x.same_scores(y)));
        assert_eq!(a.manifest, b.manifest);
        assert_eq!(a.manifest.train_size + a.manifest.test_size, 120);
    }

    #[test]
    fn failing_cells_are_recorded() {
        let corpus = synthetic(40, 0.0);
        let mut config = ExperimentConfig {
            variants: vec![VariantId::NoOperation],
            models: vec![ModelKind::Knn, ModelKind::NaiveBayes],
            ..small_config()
        };
        // More neighbours than training items.
        config.params.knn.k = 99;
        let run = run_experiment(&corpus, &config).unwrap();
        assert_eq!(run.rows.len(), 1);
        assert_eq!(run.manifest.cells[0].status, CellStatus::Failed);
        assert!(run.manifest.cells[0].error.is_some());
        assert_eq!(run.manifest.cells[1].status, CellStatus::Ok);
    }

    #[test]
    fn cache_is_reused() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = synthetic(60, 0.3);
        let config = ExperimentConfig {
            cache_dir: Some(dir.path().to_owned()),
            ..small_config()
        };
        let ctx = ExperimentContext::new(&corpus, &config).unwrap();
        let first = ctx.materialize(VariantId::Default).unwrap();
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        let second = ctx.materialize(VariantId::Default).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn bundle_round_trip_predicts_like_the_model() {
        let corpus = synthetic(100, 0.0);
        let config = small_config();
        let (row, bundle) = train_single(&corpus, &config, VariantId::Default, ModelKind::Gru).unwrap();
        assert!(row.accuracy.is_some());
        let back = ModelBundle::from_json(&bundle.to_json().unwrap()).unwrap();
        assert_eq!(back, bundle);
        let p = back
            .predictor()
            .unwrap()
            .predict("Yemek harika ve çok lezzetliydi")
            .unwrap();
        assert!(p.label.is_some());
        assert!((0.0..=1.0).contains(&p.score));
        assert!(ModelBundle::from_json("{\"format\":\"other\"}").is_err());
    }
}
