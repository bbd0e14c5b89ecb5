use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::metrics::evaluate;
use crate::error::{Error, Result};
use crate::models::{train_model, FeatureSet, ModelKind, ModelParams};
use crate::rng;

/// One hyperparameter and the values to try, e.g. `var_smoothing` for
/// `naive-bayes`. Names are the field names of that model's parameter table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParam {
    pub name: String,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub model: ModelKind,
    #[serde(rename = "param", default)]
    pub params: Vec<GridParam>,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_folds() -> usize {
    3
}

impl GridSpec {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self> {
        let spec: GridSpec = toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        GridSpec::from_toml(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        if self.params.is_empty() || self.params.iter().any(|p| p.values.is_empty()) {
            return Err(Error::Config(
                "grid must name at least one parameter, each with at least one value".into(),
            ));
        }
        if self.folds < 2 {
            return Err(Error::Config(format!("folds must be at least 2, got {}", self.folds)));
        }
        Ok(())
    }

    /// Every grid point in declaration order; the last parameter varies fastest.
    pub fn points(&self) -> Vec<Vec<(String, Value)>> {
        let mut points = vec![Vec::new()];
        for p in &self.params {
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    p.values.iter().map(move |v| {
                        let mut point = prefix.clone();
                        point.push((p.name.clone(), v.clone()));
                        point
                    })
                })
                .collect();
        }
        points
    }
}

fn section(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::NaiveBayes => "naive_bayes",
        ModelKind::Knn => "knn",
        ModelKind::LinearRegression => "linear_regression",
        ModelKind::Svm => "svm",
        ModelKind::Gru => "gru",
    }
}

/// `base` with the given fields of `kind`'s parameter table replaced.
pub fn apply_point(base: &ModelParams, kind: ModelKind, point: &[(String, Value)]) -> Result<ModelParams> {
    let mut tree = serde_json::to_value(base).map_err(|e| Error::Config(e.to_string()))?;
    let table = tree
        .get_mut(section(kind))
        .and_then(Value::as_object_mut)
        .ok_or_else(|| Error::Config(format!("{kind} has no parameter table")))?;
    for (name, value) in point {
        match table.get_mut(name) {
            Some(slot) => *slot = value.clone(),
            None => return Err(Error::Config(format!("{kind} has no parameter {name:?}"))),
        }
    }
    serde_json::from_value(tree).map_err(|e| Error::Config(format!("invalid grid value for {kind}: {e}")))
}

/// Seeded assignment of `0..n` to `folds` near-equal folds.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::seeded(seed));
    let mut fold = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        fold[i] = pos % folds;
    }
    fold
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub point: Vec<(String, Value)>,
    pub fold_scores: Vec<f64>,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub model: ModelKind,
    /// Mean held-out accuracy, or mean MSE for linear regression.
    pub metric: String,
    pub rows: Vec<GridRow>,
    pub best_index: usize,
    pub best: ModelParams,
}

impl GridResult {
    pub fn best_row(&self) -> &GridRow {
        &self.rows[self.best_index]
    }
}

/// K-fold cross-validated search. Maximizes mean accuracy (minimizes mean MSE
/// for linear regression); ties go to the earliest point.
pub fn grid_search(features: &FeatureSet, grid: &GridSpec, base: &ModelParams) -> Result<GridResult> {
    grid.validate()?;
    if features.len() < grid.folds {
        return Err(Error::Data(format!(
            "{} samples cannot fill {} folds",
            features.len(),
            grid.folds
        )));
    }
    let fold = fold_assignment(features.len(), grid.folds, grid.seed);
    let splits: Vec<(FeatureSet, FeatureSet)> = (0..grid.folds)
        .map(|k| {
            let train: Vec<usize> = (0..features.len()).filter(|&i| fold[i] != k).collect();
            let held: Vec<usize> = (0..features.len()).filter(|&i| fold[i] == k).collect();
            let train = features.subset(&train);
            if train.ensure_trainable().is_err() {
                return Err(Error::Data(format!("fold {k}: training part has a single class")));
            }
            Ok((train, features.subset(&held)))
        })
        .collect::<Result<_>>()?;

    let minimize = grid.model.is_regression();
    let points = grid.points();
    let params = points
        .iter()
        .map(|p| apply_point(base, grid.model, p))
        .collect::<Result<Vec<_>>>()?;
    let rows = points
        .into_par_iter()
        .zip(params.par_iter())
        .map(|(point, params)| {
            let fold_scores = splits
                .iter()
                .map(|(train, held)| {
                    let model = train_model(grid.model, params, train)?;
                    let eval = evaluate(&model, held)?;
                    Ok(match eval.metrics {
                        Some(m) if !minimize => m.accuracy,
                        _ => eval.mse,
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            let mean = fold_scores.iter().sum::<f64>() / fold_scores.len() as f64;
            Ok(GridRow {
                point,
                fold_scores,
                mean,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best_index = 0;
    for (i, row) in rows.iter().enumerate() {
        let better = if minimize {
            row.mean < rows[best_index].mean
        } else {
            row.mean > rows[best_index].mean
        };
        if better {
            best_index = i;
        }
    }
    Ok(GridResult {
        model: grid.model,
        metric: if minimize { "mse" } else { "accuracy" }.into(),
        best: params[best_index].clone(),
        rows,
        best_index,
    })
}
