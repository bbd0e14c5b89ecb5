//! Soft-margin kernel SVM trained with sequential minimal optimization,
//! using second-order working-set selection.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::features::{check_vector, FeatureSet};
use crate::corpus::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    pub c: f64,
    pub gamma: f64,
    pub coef0: f64,
    pub degree: u32,
    /// Stop once the maximal KKT violation drops below this. Individual
    /// margins then satisfy the KKT conditions only to within a few `tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Training sets above this size are refused; the dual problem is quadratic in N.
    pub max_train_size: usize,
    pub cache_mb: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 0.1,
            gamma: 0.1,
            coef0: 1.0,
            degree: 3,
            tol: 1e-3,
            max_iter: 1_000_000,
            max_train_size: 5_000,
            cache_mb: 256,
        }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.c, self.gamma, self.tol].iter().all(|v| *v > 0.0 && v.is_finite());
        if !positive || self.degree == 0 || self.max_iter == 0 || !self.coef0.is_finite() {
            return Err(Error::Config(format!("invalid SVM parameters {self:?}")));
        }
        Ok(())
    }

    pub fn kernel(&self, a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        (self.gamma * dot + self.coef0).powi(self.degree as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub params: SvmParams,
    pub support_vectors: Vec<Vec<f64>>,
    /// `α_i y_i` per support vector.
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
}

const TAU: f64 = 1e-12;

/// Least-recently-used cache of kernel rows.
struct KernelCache<'a> {
    x: &'a [Vec<f64>],
    params: &'a SvmParams,
    capacity: usize,
    rows: HashMap<usize, Arc<Vec<f64>>>,
    order: VecDeque<usize>,
}

impl<'a> KernelCache<'a> {
    fn new(x: &'a [Vec<f64>], params: &'a SvmParams) -> Self {
        let row_bytes = x.len().max(1) * std::mem::size_of::<f64>();
        let capacity = (params.cache_mb * (1 << 20) / row_bytes).max(2);
        KernelCache {
            x,
            params,
            capacity,
            rows: HashMap::new(),
            order: VecDeque::new(),
        }
    }

    fn row(&mut self, i: usize) -> Arc<Vec<f64>> {
        if let Some(r) = self.rows.get(&i) {
            let r = Arc::clone(r);
            if let Some(pos) = self.order.iter().position(|&k| k == i) {
                self.order.remove(pos);
            }
            self.order.push_back(i);
            return r;
        }
        let xi = &self.x[i];
        let row: Vec<f64> = self.x.par_iter().map(|xj| self.params.kernel(xi, xj)).collect();
        let row = Arc::new(row);
        if self.rows.len() >= self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.rows.remove(&old);
            }
        }
        self.rows.insert(i, Arc::clone(&row));
        self.order.push_back(i);
        row
    }
}

pub fn train_svm(features: &FeatureSet, params: &SvmParams) -> Result<SvmModel> {
    params.validate()?;
    features.ensure_trainable()?;
    let n = features.len();
    if n > params.max_train_size {
        return Err(Error::Data(format!(
            "{n} training documents exceed the SVM limit of {}; subsample or raise svm.max_train_size",
            params.max_train_size
        )));
    }
    let x = features.vectors();
    let y: Vec<f64> = features
        .labels()
        .iter()
        .map(|l| if l.is_positive() { 1.0 } else { -1.0 })
        .collect();
    let c = params.c;
    let qd: Vec<f64> = x.iter().map(|v| params.kernel(v, v)).collect();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut cache = KernelCache::new(x, params);
    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;

    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iter {
        // i maximizes -y_t ∇_t over the "can move up" set.
        let mut g_max = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            let in_up = if y[t] > 0.0 { !upper(alpha[t]) } else { !lower(alpha[t]) };
            if in_up && -y[t] * grad[t] >= g_max {
                g_max = -y[t] * grad[t];
                i_sel = Some(t);
            }
        }
        let Some(i) = i_sel else {
            converged = true;
            break;
        };
        let k_i = cache.row(i);
        // j minimizes the second-order objective decrease over the "can move down" set.
        let mut g_max2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut best_obj = f64::INFINITY;
        for t in 0..n {
            let in_low = if y[t] > 0.0 { !lower(alpha[t]) } else { !upper(alpha[t]) };
            if !in_low {
                continue;
            }
            let yg = y[t] * grad[t];
            g_max2 = g_max2.max(yg);
            let grad_diff = g_max + yg;
            if grad_diff > 0.0 {
                let quad = qd[i] + qd[t] - 2.0 * k_i[t];
                let obj = -(grad_diff * grad_diff) / if quad > 0.0 { quad } else { TAU };
                if obj <= best_obj {
                    best_obj = obj;
                    j_sel = Some(t);
                }
            }
        }
        let Some(j) = j_sel.filter(|_| g_max + g_max2 >= params.tol) else {
            converged = true;
            break;
        };
        iterations += 1;
        let k_j = cache.row(j);

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let quad = (qd[i] + qd[j] - 2.0 * k_i[j]).max(TAU);
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * k_i[t] * di + y[j] * k_j[t] * dj);
        }
    }
    if !converged {
        log::warn!(
            "SVM stopped at the iteration cap ({}) before reaching tolerance {}; using the current solution",
            params.max_iter,
            params.tol
        );
    }

    // Bias from free vectors, else the midpoint of the feasible interval.
    let (mut ub, mut lb, mut sum_free, mut n_free) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if upper(alpha[t]) {
            if y[t] < 0.0 {
                ub = ub.min(yg)
            } else {
                lb = lb.max(yg)
            }
        } else if lower(alpha[t]) {
            if y[t] > 0.0 {
                ub = ub.min(yg)
            } else {
                lb = lb.max(yg)
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    };

    let (support_vectors, dual_coef) = (0..n)
        .filter(|&t| alpha[t] > 0.0)
        .map(|t| (x[t].clone(), alpha[t] * y[t]))
        .unzip();
    let model = SvmModel {
        params: params.clone(),
        support_vectors,
        dual_coef,
        bias: -rho,
        iterations,
        converged,
    };
    if !model.bias.is_finite() || model.dual_coef.iter().any(|a: &f64| !a.is_finite()) {
        return Err(Error::Numeric("SVM dual solution is not finite".into()));
    }
    Ok(model)
}

impl SvmModel {
    pub fn dim(&self) -> usize {
        self.support_vectors.first().map_or(0, Vec::len)
    }

    /// `f(x) = Σ α_i y_i K(x_i, x) + b`.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if !self.support_vectors.is_empty() {
            check_vector(x, self.dim())?;
        }
        Ok(self
            .support_vectors
            .iter()
            .zip(&self.dual_coef)
            .map(|(sv, a)| a * self.params.kernel(sv, x))
            .sum::<f64>()
            + self.bias)
    }

    /// Positive iff `f(x) > 0`.
    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        Ok(Label::from(self.decision(x)? > 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use Label::*;

    fn set(points: &[(&[f64], Label)]) -> FeatureSet {
        FeatureSet::new(
            points.iter().map(|p| p.0.to_vec()).collect(),
            points.iter().map(|p| p.1).collect(),
        )
        .unwrap()
    }

    /// Full-training-set KKT check with α recovered from the model.
    fn assert_kkt(f: &FeatureSet, m: &SvmModel, tol: f64) {
        let c = m.params.c;
        for (v, l) in f.vectors().iter().zip(f.labels()) {
            let y = if l.is_positive() { 1.0 } else { -1.0 };
            let alpha: f64 = m
                .support_vectors
                .iter()
                .zip(&m.dual_coef)
                .filter(|(sv, _)| *sv == v)
                .map(|(_, a)| a.abs())
                .sum();
            let margin = y * m.decision(v).unwrap();
            // α of coincident points cannot be told apart from the model.
            if f.vectors().iter().filter(|w| *w == v).count() > 1 {
                continue;
            }
            assert!((-1e-12..=c + 1e-12).contains(&alpha), "alpha {alpha} outside [0, {c}]");
            if alpha <= 0.0 {
                assert!(margin >= 1.0 - tol, "non-support point inside margin: {margin}");
            } else if alpha >= c {
                assert!(margin <= 1.0 + tol, "bounded point outside margin: {margin}");
            } else {
                assert!((margin - 1.0).abs() < tol, "free point off the margin: {margin}");
            }
        }
    }

    #[test]
    fn separable_pair() {
        let f = set(&[(&[-1.0], Negative), (&[1.0], Positive)]);
        let m = train_svm(&f, &SvmParams::default()).unwrap();
        assert!(m.converged);
        assert!(m.decision(&[-2.0]).unwrap() < 0.0);
        assert!(m.decision(&[2.0]).unwrap() > 0.0);
        assert_kkt(&f, &m, 1e-2);
    }

    #[test]
    fn xor_with_cubic_kernel() {
        let f = set(&[
            (&[1.0, 1.0], Positive),
            (&[-1.0, -1.0], Positive),
            (&[1.0, -1.0], Negative),
            (&[-1.0, 1.0], Negative),
        ]);
        let m = train_svm(&f, &SvmParams::default()).unwrap();
        for (v, l) in f.vectors().iter().zip(f.labels()) {
            assert_eq!(m.predict(v).unwrap(), *l, "{v:?}");
        }
        assert_kkt(&f, &m, 1e-2);
        // No linear separator exists, and the degree-2 term of (γx·y+1)³ is what solves it.
        let linear = train_svm(
            &f,
            &SvmParams {
                degree: 1,
                ..SvmParams::default()
            },
        )
        .unwrap();
        assert!(f
            .vectors()
            .iter()
            .zip(f.labels())
            .any(|(v, l)| linear.predict(v).unwrap() != *l));
    }

    #[test]
    fn conflicting_duplicates_stay_in_box() {
        let f = set(&[
            (&[0.0], Negative),
            (&[0.0], Positive),
            (&[2.0], Positive),
            (&[-2.0], Negative),
        ]);
        let m = train_svm(&f, &SvmParams::default()).unwrap();
        assert!(m.converged);
        assert!(m.dual_coef.iter().all(|a| a.abs() <= 0.1 + 1e-12));
        assert!(m.predict(&[2.0]).unwrap().is_positive());
        assert_kkt(&f, &m, 1e-2);
    }

    #[test]
    fn kkt_on_random_overlapping_data() {
        for seed in 0..3 {
            let mut rng = crate::rng::seeded(seed);
            let points: Vec<(Vec<f64>, Label)> = (0..120)
                .map(|i| {
                    let l = Label::from(i % 2 == 0);
                    let shift = if l.is_positive() { 0.8 } else { -0.8 };
                    (
                        vec![rng.random_range(-2.0..2.0) + shift, rng.random_range(-2.0..2.0)],
                        l,
                    )
                })
                .collect();
            let f = FeatureSet::new(
                points.iter().map(|p| p.0.clone()).collect(),
                points.iter().map(|p| p.1).collect(),
            )
            .unwrap();
            for c in [0.1, 10.0] {
                let m = train_svm(
                    &f,
                    &SvmParams {
                        c,
                        ..SvmParams::default()
                    },
                )
                .unwrap();
                assert!(m.converged);
                assert_kkt(&f, &m, 1e-2);
            }
        }
    }

    #[test]
    fn tiny_cache_gives_same_model() {
        let mut rng = crate::rng::seeded(4);
        let vectors: Vec<Vec<f64>> = (0..60)
            .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
            .collect();
        let labels = vectors.iter().map(|v| Label::from(v[0] * v[1] > 0.0)).collect();
        let f = FeatureSet::new(vectors, labels).unwrap();
        let a = train_svm(&f, &SvmParams::default()).unwrap();
        let b = train_svm(
            &f,
            &SvmParams {
                cache_mb: 0,
                ..SvmParams::default()
            },
        )
        .unwrap();
        assert_eq!(a.dual_coef, b.dual_coef);
        assert_eq!(a.support_vectors, b.support_vectors);
        assert_eq!(a.bias, b.bias);
    }

    #[test]
    fn limits_and_iteration_cap() {
        let f = set(&[(&[-1.0], Negative), (&[1.0], Positive), (&[0.5], Negative)]);
        let capped = SvmParams {
            max_train_size: 2,
            ..SvmParams::default()
        };
        assert!(matches!(train_svm(&f, &capped), Err(Error::Data(_))));
        let m = train_svm(
            &f,
            &SvmParams {
                max_iter: 1,
                c: 100.0,
                ..SvmParams::default()
            },
        )
        .unwrap();
        assert!(!m.converged);
        assert!(train_svm(
            &f,
            &SvmParams {
                c: 0.0,
                ..SvmParams::default()
            }
        )
        .is_err());
    }
}
