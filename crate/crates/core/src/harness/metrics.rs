use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::models::{FeatureSet, TrainedModel};

/// Counts under the standard convention: a false positive is a positive
/// prediction on a negative item.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn record(&mut self, prediction: Label, truth: Label) {
        match (prediction, truth) {
            (Label::Positive, Label::Positive) => self.tp += 1,
            (Label::Negative, Label::Negative) => self.tn += 1,
            (Label::Positive, Label::Negative) => self.fp += 1,
            (Label::Negative, Label::Positive) => self.fn_ += 1,
        }
    }
}

fn check_lengths(predictions: usize, truths: usize) -> Result<()> {
    if predictions != truths {
        return Err(Error::Dimension {
            expected: truths,
            actual: predictions,
        });
    }
    if truths == 0 {
        return Err(Error::Data("cannot score an empty prediction list".into()));
    }
    Ok(())
}

pub fn confusion(predictions: &[Label], truths: &[Label]) -> Result<ConfusionMatrix> {
    check_lengths(predictions.len(), truths.len())?;
    let mut cm = ConfusionMatrix::default();
    for (&p, &t) in predictions.iter().zip(truths) {
        cm.record(p, t);
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    /// Set when a ratio had a zero denominator and was reported as 0.
    pub precision_undefined: bool,
    pub recall_undefined: bool,
    pub f_measure_undefined: bool,
}

fn ratio(num: f64, den: f64) -> (f64, bool) {
    if den == 0.0 {
        (0.0, true)
    } else {
        (num / den, false)
    }
}

/// Accuracy, precision, recall and their harmonic mean. An empty matrix yields
/// accuracy 0 with every flag set.
pub fn metrics(cm: &ConfusionMatrix) -> MetricsReport {
    let [tp, tn, fp, fn_] = [cm.tp, cm.tn, cm.fp, cm.fn_].map(|c| c as f64);
    let (accuracy, _) = ratio(tp + tn, tp + tn + fp + fn_);
    let (precision, precision_undefined) = ratio(tp, tp + fp);
    let (recall, recall_undefined) = ratio(tp, tp + fn_);
    let (f_measure, f_undefined) = ratio(2.0 * precision * recall, precision + recall);
    MetricsReport {
        accuracy,
        precision,
        recall,
        f_measure,
        precision_undefined,
        recall_undefined,
        f_measure_undefined: f_undefined || precision_undefined || recall_undefined,
    }
}

/// Mean squared error.
pub fn mse(predictions: &[f64], truths: &[f64]) -> Result<f64> {
    check_lengths(predictions.len(), truths.len())?;
    let sum: f64 = predictions.iter().zip(truths).map(|(p, t)| (p - t) * (p - t)).sum();
    let value = sum / truths.len() as f64;
    if !value.is_finite() {
        return Err(Error::Numeric("mean squared error is not finite".into()));
    }
    Ok(value)
}

/// Test-set scores of one trained model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// Absent for linear regression, which has no class prediction.
    pub confusion: Option<ConfusionMatrix>,
    pub metrics: Option<MetricsReport>,
    /// Squared error of the model's score against the 0/1 label.
    pub mse: f64,
}

pub fn evaluate(model: &TrainedModel, features: &FeatureSet) -> Result<Evaluation> {
    let mut scores = Vec::with_capacity(features.len());
    let mut predictions = Vec::with_capacity(features.len());
    for sample in features.samples() {
        let out = model.output(sample)?;
        scores.push(out.score);
        predictions.extend(out.label);
    }
    let mse = mse(&scores, &features.targets())?;
    let confusion = if model.kind().is_regression() {
        None
    } else {
        Some(confusion(&predictions, features.labels())?)
    };
    Ok(Evaluation {
        confusion,
        metrics: confusion.as_ref().map(metrics),
        mse,
    })
}
