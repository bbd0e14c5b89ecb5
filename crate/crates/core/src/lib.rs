//! Turkish review sentiment toolkit.
//!
//! The pipeline mirrors a method-ablation study: raw comments are normalized
//! ([`textnorm`]), optionally spell-corrected with keyboard-aware
//! disambiguation ([`spellkit`]) and lemmatized ([`lemma`]), embedded with
//! skip-gram negative sampling ([`embed`]), then fed to five classifier
//! families ([`models`]). [`harness`] materializes the six dataset variants,
//! runs experiments and computes the metrics.

pub mod bundled;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod harness;
pub mod lemma;
pub mod models;
pub(crate) mod rng;
pub mod spellkit;
pub mod textnorm;

pub use corpus::{Corpus, Label, LabeledComment, SplitSpec, SyntheticSpec};
pub use embed::{EmbeddingMatrix, SgnsParams, Vocab};
pub use error::{Error, ErrorKind, Result};
pub use harness::{ExperimentConfig, ModelBundle, ProcessedCorpus, Resources, ResultRow, VariantId};
pub use lemma::LemmaLexicon;
pub use models::{FeatureSet, ModelKind, ModelParams, TrainedModel};
pub use spellkit::{CorrectionCandidate, CorrectorConfig, KeyboardMatrix, Lexicon};
pub use textnorm::{NormConfig, Token};
