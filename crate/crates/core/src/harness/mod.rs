//! Experiment harness: the six dataset variants, train/evaluate runs over a
//! (variant, model) matrix, metrics, grid search and reports.
//!
//! A run directory holds `manifest.json` (seeds, config and resource hashes,
//! per-cell status), `results.csv` (one row per successful cell) and
//! `report.txt` (the variant × model matrix).

mod experiment;
mod grid;
mod metrics;
mod report;
mod variant;

pub use experiment::{
    corpus_sha256, featurize, run_experiment, train_single, tune, CellRecord, CellStatus, ExperimentConfig,
    ExperimentContext, ExperimentRun, Manifest, ModelBundle, Prediction, Predictor, PreparedVariant, ResourceConfig,
    ResourceDigest, ResultRow, SeedRecord, BUNDLE_FORMAT, BUNDLE_VERSION, MANIFEST_FILE, REPORT_FILE, RESULTS_FILE,
};
pub use grid::{apply_point, fold_assignment, grid_search, GridParam, GridResult, GridRow, GridSpec};
pub use metrics::{confusion, evaluate, metrics, mse, ConfusionMatrix, Evaluation, MetricsReport};
pub use report::{emit_report, load_rows_csv, read_rows_csv, write_rows_csv, Report};
pub use variant::{apply_variant, join_tokens, ProcessedCorpus, Resources, VariantId, VariantProcessor};
