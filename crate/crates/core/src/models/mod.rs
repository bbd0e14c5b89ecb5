//! The classifier families: Gaussian naive Bayes, k-nearest neighbours, linear
//! regression, a polynomial-kernel SVM and a GRU network. All share
//! [`FeatureSet`] inputs and can be stored as a tagged JSON document.
//!
//! Model file format:
//!
//! ```json
//! {"format": "yorum-model", "version": 1,
//!  "model": {"type": "svm", "params": {...}, "support_vectors": [[...]], ...}}
//! ```
//!
//! `type` is one of `naive-bayes`, `knn`, `linear-regression`, `svm`, `gru`;
//! the remaining fields are that model's hyperparameters and parameter arrays.
//! Floats are written in shortest round-trip form, so loading is exact.

mod features;
mod gru;
mod knn;
mod linreg;
mod nb;
mod svm;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::embed::sigmoid;
use crate::error::{Error, Result};

pub use features::{FeatureSet, Sample};
pub use gru::{fit_gru, train_gru, GruConfig, GruNetwork};
pub use knn::{train_knn, KnnModel, KnnParams};
pub use linreg::{train_linreg, LinRegModel, LinRegParams, RIDGE_JITTER};
pub use nb::{train_gaussian_nb, GaussianNbModel, NbParams, SmoothingBasis};
pub use svm::{train_svm, SvmModel, SvmParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    NaiveBayes,
    Knn,
    LinearRegression,
    Svm,
    Gru,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::NaiveBayes,
        ModelKind::Knn,
        ModelKind::LinearRegression,
        ModelKind::Svm,
        ModelKind::Gru,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::NaiveBayes => "naive-bayes",
            ModelKind::Knn => "knn",
            ModelKind::LinearRegression => "linear-regression",
            ModelKind::Svm => "svm",
            ModelKind::Gru => "gru",
        }
    }

    /// Regression models are scored by MSE only.
    pub fn is_regression(self) -> bool {
        self == ModelKind::LinearRegression
    }

    pub fn needs_sequences(self) -> bool {
        self == ModelKind::Gru
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<&str> = ModelKind::ALL.iter().map(|k| k.name()).collect();
            Error::Config(format!("unknown model {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

/// Hyperparameters for every model family.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub naive_bayes: NbParams,
    pub knn: KnnParams,
    pub linear_regression: LinRegParams,
    pub svm: SvmParams,
    pub gru: GruConfig,
}

pub fn train_model(kind: ModelKind, params: &ModelParams, features: &FeatureSet) -> Result<TrainedModel> {
    Ok(match kind {
        ModelKind::NaiveBayes => TrainedModel::NaiveBayes(train_gaussian_nb(features, &params.naive_bayes)?),
        ModelKind::Knn => TrainedModel::Knn(train_knn(features, &params.knn)?),
        ModelKind::LinearRegression => {
            TrainedModel::LinearRegression(train_linreg(features, &params.linear_regression)?)
        }
        ModelKind::Svm => TrainedModel::Svm(train_svm(features, &params.svm)?),
        ModelKind::Gru => TrainedModel::Gru(train_gru(features, &params.gru)?),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum TrainedModel {
    NaiveBayes(GaussianNbModel),
    Knn(KnnModel),
    LinearRegression(LinRegModel),
    Svm(SvmModel),
    Gru(GruNetwork),
}

/// A model's real-valued output together with its hard label, if it has one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelOutput {
    /// NB posterior, GRU sigmoid, logistic of the SVM decision value, the
    /// 0/1 k-NN vote, or the raw regression output.
    pub score: f64,
    pub label: Option<Label>,
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            TrainedModel::NaiveBayes(_) => ModelKind::NaiveBayes,
            TrainedModel::Knn(_) => ModelKind::Knn,
            TrainedModel::LinearRegression(_) => ModelKind::LinearRegression,
            TrainedModel::Svm(_) => ModelKind::Svm,
            TrainedModel::Gru(_) => ModelKind::Gru,
        }
    }

    pub fn output(&self, sample: Sample<'_>) -> Result<ModelOutput> {
        Ok(match self {
            TrainedModel::NaiveBayes(m) => {
                let (label, score) = m.predict(sample.vector)?;
                ModelOutput {
                    score,
                    label: Some(label),
                }
            }
            TrainedModel::Knn(m) => {
                let label = m.predict(sample.vector)?;
                ModelOutput {
                    score: label.as_f64(),
                    label: Some(label),
                }
            }
            TrainedModel::LinearRegression(m) => ModelOutput {
                score: m.predict(sample.vector)?,
                label: None,
            },
            TrainedModel::Svm(m) => {
                let f = m.decision(sample.vector)?;
                ModelOutput {
                    score: sigmoid(f),
                    label: Some(Label::from(f > 0.0)),
                }
            }
            TrainedModel::Gru(m) => {
                let p = m.predict_proba(sample.require_sequence()?)?;
                ModelOutput {
                    score: p,
                    label: Some(Label::from(p > 0.5)),
                }
            }
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(&ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            model: self.clone(),
        })
        .map_err(|e| Error::Data(format!("cannot serialize model: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::Data(format!("invalid model file: {e}")))?;
        file.check()?;
        Ok(file.model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        TrainedModel::from_json(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}

pub const MODEL_FORMAT: &str = "yorum-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: TrainedModel,
}

impl ModelFile {
    fn check(&self) -> Result<()> {
        if self.format != MODEL_FORMAT || self.version != MODEL_VERSION {
            return Err(Error::Data(format!(
                "unsupported model file {} v{}; expected {MODEL_FORMAT} v{MODEL_VERSION}",
                self.format, self.version
            )));
        }
        Ok(())
    }
}

/// Hard 0/1 decision. Linear regression has none and is rejected.
pub fn predict_binary(model: &TrainedModel, sample: Sample<'_>) -> Result<Label> {
    model
        .output(sample)?
        .label
        .ok_or_else(|| Error::Config("linear regression is evaluated by MSE only and has no class prediction".into()))
}
