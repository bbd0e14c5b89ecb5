use serde::{Deserialize, Serialize};

use super::features::{check_vector, FeatureSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinRegParams {
    pub fit_intercept: bool,
    /// Z-score every column with training statistics before fitting.
    pub normalize: bool,
}

impl Default for LinRegParams {
    fn default() -> Self {
        LinRegParams {
            fit_intercept: true,
            normalize: true,
        }
    }
}

/// Added to the Gram diagonal when it is not positive definite.
pub const RIDGE_JITTER: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinRegModel {
    pub params: LinRegParams,
    /// Weights in the standardized feature space.
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

/// In-place Cholesky factorization of a row-major `n × n` SPD matrix into its
/// lower factor. Returns `false` if a pivot is not positive.
fn cholesky(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    true
}

fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    y
}

pub(crate) fn standardization(features: &FeatureSet, center: bool, scale: bool) -> (Vec<f64>, Vec<f64>) {
    let (n, dim) = (features.len() as f64, features.dim());
    let mut means = vec![0.0; dim];
    let mut stds = vec![1.0; dim];
    if center || scale {
        for v in features.vectors() {
            for (m, x) in means.iter_mut().zip(v) {
                *m += x;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
    }
    if scale {
        let mut var = vec![0.0; dim];
        for v in features.vectors() {
            for ((s, x), m) in var.iter_mut().zip(v).zip(&means) {
                *s += (x - m) * (x - m);
            }
        }
        for (s, v) in stds.iter_mut().zip(var) {
            let sd = (v / n).sqrt();
            *s = if sd > 0.0 { sd } else { 1.0 };
        }
    }
    if !center {
        means.iter_mut().for_each(|m| *m = 0.0);
    }
    (means, stds)
}

pub fn train_linreg(features: &FeatureSet, params: &LinRegParams) -> Result<LinRegModel> {
    features.ensure_trainable()?;
    let dim = features.dim();
    let center = params.fit_intercept;
    let (means, stds) = standardization(features, center, params.normalize);
    let rows: Vec<Vec<f64>> = features
        .vectors()
        .iter()
        .map(|v| v.iter().zip(&means).zip(&stds).map(|((x, m), s)| (x - m) / s).collect())
        .collect();
    let y = features.targets();
    let y_mean = if center {
        y.iter().sum::<f64>() / y.len() as f64
    } else {
        0.0
    };

    let mut gram = vec![0.0; dim * dim];
    let mut rhs = vec![0.0; dim];
    for (r, &t) in rows.iter().zip(&y) {
        for i in 0..dim {
            rhs[i] += r[i] * (t - y_mean);
            for j in 0..=i {
                gram[i * dim + j] += r[i] * r[j];
            }
        }
    }
    for i in 0..dim {
        for j in 0..i {
            gram[j * dim + i] = gram[i * dim + j];
        }
    }
    let mut factor = gram.clone();
    if !cholesky(&mut factor, dim) {
        log::debug!("Gram matrix is singular; adding ridge jitter {RIDGE_JITTER}");
        factor = gram;
        for i in 0..dim {
            factor[i * dim + i] += RIDGE_JITTER;
        }
        if !cholesky(&mut factor, dim) {
            return Err(Error::Numeric(
                "normal equations are degenerate even with ridge jitter".into(),
            ));
        }
    }
    let weights = cholesky_solve(&factor, dim, &rhs);
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::Numeric("linear regression produced non-finite weights".into()));
    }
    Ok(LinRegModel {
        params: params.clone(),
        weights,
        intercept: y_mean,
        means,
        stds,
    })
}

impl LinRegModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Unthresholded regression output.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        check_vector(x, self.dim())?;
        Ok(self.intercept
            + x.iter()
                .zip(&self.means)
                .zip(&self.stds)
                .zip(&self.weights)
                .map(|(((x, m), s), w)| (x - m) / s * w)
                .sum::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Label;
    use rand::Rng;

    /// Targets are 0/1 labels, so "y = x" is the line through (0,0) and (1,1).
    fn line_data() -> FeatureSet {
        FeatureSet::new(
            vec![vec![0.0], vec![1.0], vec![0.0], vec![1.0]],
            [0, 1, 0, 1].map(|b| Label::from(b == 1)).to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn interpolates_exact_line() {
        let params = LinRegParams {
            normalize: false,
            ..LinRegParams::default()
        };
        let m = train_linreg(&line_data(), &params).unwrap();
        assert!((m.weights[0] - 1.0).abs() < 1e-12);
        assert!((m.predict(&[0.0]).unwrap()).abs() < 1e-12);
        assert!((m.predict(&[1.0]).unwrap() - 1.0).abs() < 1e-12);
        let normalized = train_linreg(&line_data(), &LinRegParams::default()).unwrap();
        assert!((normalized.predict(&[1.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(normalized.predict(&[0.0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn constant_features_give_mean_predictor() {
        // Balanced labels on identical features: target mean is 0.5.
        let f = FeatureSet::new(
            vec![vec![2.0, 3.0]; 4],
            [true, false, true, false].map(Label::from).to_vec(),
        )
        .unwrap();
        let m = train_linreg(&f, &LinRegParams::default()).unwrap();
        assert!(m.weights.iter().all(|w| w.abs() < 1e-12));
        assert_eq!(m.intercept, 0.5);
        assert!((m.predict(&[-7.0, 100.0]).unwrap() - 0.5).abs() < 1e-9);
    }

    fn random_system(seed: u64) -> FeatureSet {
        let mut rng = crate::rng::seeded(seed);
        let vectors: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let labels = (0..20)
            .map(|i| Label::from(i % 2 == 0 || rng.random_bool(0.3)))
            .collect();
        FeatureSet::new(vectors, labels).unwrap()
    }

    #[test]
    fn normal_equation_optimality() {
        for seed in 0..5 {
            let f = random_system(seed);
            let m = train_linreg(&f, &LinRegParams::default()).unwrap();
            // Gradient of the squared loss over [standardized X | 1] at the solution.
            let mut grad = [0.0; 4];
            for (v, y) in f.vectors().iter().zip(f.targets()) {
                let r = m.predict(v).unwrap() - y;
                for j in 0..3 {
                    grad[j] += (v[j] - m.means[j]) / m.stds[j] * r;
                }
                grad[3] += r;
            }
            let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            assert!(norm < 1e-8, "seed {seed}: {norm}");
        }
    }

    #[test]
    fn residuals_match_gaussian_elimination_oracle() {
        let f = random_system(11);
        let params = LinRegParams {
            normalize: false,
            ..LinRegParams::default()
        };
        let m = train_linreg(&f, &params).unwrap();
        // Solve [X 1]ᵀ[X 1] β = [X 1]ᵀ y directly with partial pivoting.
        let n = 4;
        let mut a = vec![vec![0.0; n + 1]; n];
        for (v, y) in f.vectors().iter().zip(f.targets()) {
            let row = [v[0], v[1], v[2], 1.0];
            for i in 0..n {
                for j in 0..n {
                    a[i][j] += row[i] * row[j];
                }
                a[i][n] += row[i] * y;
            }
        }
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
            a.swap(c, p);
            for r in 0..n {
                if r != c {
                    let factor = a[r][c] / a[c][c];
                    for k in c..=n {
                        a[r][k] -= factor * a[c][k];
                    }
                }
            }
        }
        let beta: Vec<f64> = (0..n).map(|i| a[i][n] / a[i][i]).collect();
        for v in f.vectors() {
            let oracle = beta[0] * v[0] + beta[1] * v[1] + beta[2] * v[2] + beta[3];
            assert!((m.predict(v).unwrap() - oracle).abs() < 1e-9);
        }
    }

    #[test]
    fn no_intercept() {
        let params = LinRegParams {
            fit_intercept: false,
            normalize: false,
        };
        let f = FeatureSet::new(vec![vec![1.0], vec![2.0]], vec![Label::Negative, Label::Positive]).unwrap();
        let m = train_linreg(&f, &params).unwrap();
        assert_eq!(m.intercept, 0.0);
        // argmin (w - 0)² + (2w - 1)² = 2/5
        assert!((m.weights[0] - 0.4).abs() < 1e-12);
    }
}
