use serde::{Deserialize, Serialize};

use super::features::{check_vector, FeatureSet};
use crate::corpus::Label;
use crate::embed::sigmoid;
use crate::error::{Error, Result};

/// Which variance `var_smoothing` is multiplied by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothingBasis {
    /// Largest per-feature variance of the whole training matrix (sklearn).
    #[default]
    AllData,
    /// Largest per-feature variance within either class.
    WithinClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NbParams {
    pub var_smoothing: f64,
    pub smoothing_basis: SmoothingBasis,
}

impl Default for NbParams {
    fn default() -> Self {
        NbParams {
            var_smoothing: 0.151,
            smoothing_basis: SmoothingBasis::AllData,
        }
    }
}

/// Floor that keeps variances positive when every feature is constant.
const MIN_VARIANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNbModel {
    pub params: NbParams,
    /// Indexed by class (negative, positive).
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
    pub priors: [f64; 2],
}

fn mean_var(rows: &[&[f64]], dim: usize) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let mut mean = vec![0.0; dim];
    for r in rows {
        for (m, x) in mean.iter_mut().zip(r.iter()) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; dim];
    for r in rows {
        for ((v, x), m) in var.iter_mut().zip(r.iter()).zip(&mean) {
            *v += (x - m) * (x - m);
        }
    }
    var.iter_mut().for_each(|v| *v /= n);
    (mean, var)
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

pub fn train_gaussian_nb(features: &FeatureSet, params: &NbParams) -> Result<GaussianNbModel> {
    features.ensure_trainable()?;
    if !(params.var_smoothing >= 0.0 && params.var_smoothing.is_finite()) {
        return Err(Error::Config(format!("invalid var_smoothing {}", params.var_smoothing)));
    }
    let dim = features.dim();
    let split = |want: Label| -> Vec<&[f64]> {
        features
            .vectors()
            .iter()
            .zip(features.labels())
            .filter(|(_, &l)| l == want)
            .map(|(v, _)| v.as_slice())
            .collect()
    };
    let (neg, pos) = (split(Label::Negative), split(Label::Positive));
    let (mean0, mut var0) = mean_var(&neg, dim);
    let (mean1, mut var1) = mean_var(&pos, dim);
    let basis = match params.smoothing_basis {
        SmoothingBasis::AllData => {
            let all: Vec<&[f64]> = features.vectors().iter().map(Vec::as_slice).collect();
            max_of(&mean_var(&all, dim).1)
        }
        SmoothingBasis::WithinClass => max_of(&var0).max(max_of(&var1)),
    };
    let epsilon = params.var_smoothing * basis;
    for v in var0.iter_mut().chain(var1.iter_mut()) {
        *v = (*v + epsilon).max(MIN_VARIANCE);
    }
    let n = features.len() as f64;
    Ok(GaussianNbModel {
        params: params.clone(),
        means: [mean0, mean1],
        variances: [var0, var1],
        priors: [neg.len() as f64 / n, pos.len() as f64 / n],
    })
}

impl GaussianNbModel {
    pub fn dim(&self) -> usize {
        self.means[0].len()
    }

    /// `log P(class) + Σ_j log N(x_j; μ, σ²)` for both classes.
    pub fn joint_log_likelihood(&self, x: &[f64]) -> Result<[f64; 2]> {
        check_vector(x, self.dim())?;
        let ll = |c: usize| {
            let mut s = self.priors[c].ln();
            for ((xi, m), v) in x.iter().zip(&self.means[c]).zip(&self.variances[c]) {
                s -= 0.5 * (2.0 * std::f64::consts::PI * v).ln() + (xi - m) * (xi - m) / (2.0 * v);
            }
            s
        };
        Ok([ll(0), ll(1)])
    }

    pub fn posteriors(&self, x: &[f64]) -> Result<[f64; 2]> {
        let [l0, l1] = self.joint_log_likelihood(x)?;
        Ok([sigmoid(l0 - l1), sigmoid(l1 - l0)])
    }

    /// Hard label and positive-class posterior; equal likelihoods go to negative.
    pub fn predict(&self, x: &[f64]) -> Result<(Label, f64)> {
        let [l0, l1] = self.joint_log_likelihood(x)?;
        Ok((Label::from(l1 > l0), sigmoid(l1 - l0)))
    }
}
