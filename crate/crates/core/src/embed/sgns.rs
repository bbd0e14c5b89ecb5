//! Skip-gram with negative sampling.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::vocab::Vocab;
use crate::error::{Error, Result};
use crate::rng;
use crate::textnorm::Token;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SgnsParams {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Initial step size, decayed linearly to `min_learning_rate`.
    pub learning_rate: f64,
    pub min_learning_rate: f64,
    pub seed: u64,
}

impl Default for SgnsParams {
    fn default() -> Self {
        SgnsParams {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_learning_rate: 1e-4,
            seed: 1,
        }
    }
}

impl SgnsParams {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.window == 0 || self.negatives == 0 {
            return Err(Error::Config("dim, window and negatives must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.min_learning_rate > 0.0) {
            return Err(Error::Config("learning rates must be positive".into()));
        }
        Ok(())
    }
}

/// Input (word) and output (context) vectors, row-major `V × dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMatrix {
    dim: usize,
    input: Vec<f64>,
    output: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn from_parts(dim: usize, input: Vec<f64>, output: Vec<f64>) -> Result<Self> {
        if dim == 0 || input.len() % dim != 0 || input.len() != output.len() {
            return Err(Error::Data(format!(
                "embedding shapes disagree (dim={dim}, input={}, output={})",
                input.len(),
                output.len()
            )));
        }
        if input.iter().chain(&output).any(|v| !v.is_finite()) {
            return Err(Error::Numeric("embedding contains a non-finite value".into()));
        }
        Ok(EmbeddingMatrix { dim, input, output })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.input.len() / self.dim
    }

    pub fn input_row(&self, i: usize) -> &[f64] {
        &self.input[i * self.dim..(i + 1) * self.dim]
    }

    pub fn output_row(&self, i: usize) -> &[f64] {
        &self.output[i * self.dim..(i + 1) * self.dim]
    }

    fn is_finite(&self) -> bool {
        self.input.iter().chain(&self.output).all(|v| v.is_finite())
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Noise distribution proportional to `count^0.75`.
#[derive(Debug, Clone)]
pub struct NoiseSampler {
    dist: WeightedIndex<f64>,
    probabilities: Vec<f64>,
}

impl NoiseSampler {
    pub fn new(counts: &[u64]) -> Result<Self> {
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
        let total: f64 = weights.iter().sum();
        let dist = WeightedIndex::new(&weights).map_err(|e| Error::Data(format!("invalid noise weights: {e}")))?;
        Ok(NoiseSampler {
            dist,
            probabilities: weights.iter().map(|w| w / total).collect(),
        })
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.dist.sample(rng)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }
}

/// Negative log-likelihood of one skip-gram pair with its negative draws:
/// `-log σ(u_pos·v) - Σ_k log σ(-u_k·v)`.
pub fn pair_loss(center: &[f64], positive: &[f64], negatives: &[&[f64]]) -> f64 {
    let mut loss = -sigmoid(dot(positive, center)).ln();
    for neg in negatives {
        loss -= sigmoid(-dot(neg, center)).ln();
    }
    loss
}

/// Derivative of the pair loss with respect to one score `u·v`.
fn score_grad(score: f64, is_positive: bool) -> f64 {
    sigmoid(score) - if is_positive { 1.0 } else { 0.0 }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairGradient {
    pub center: Vec<f64>,
    pub positive: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

/// Analytic gradient of [`pair_loss`].
pub fn pair_loss_grad(center: &[f64], positive: &[f64], negatives: &[&[f64]]) -> PairGradient {
    let mut d_center = vec![0.0; center.len()];
    let g = score_grad(dot(positive, center), true);
    let d_positive: Vec<f64> = center.iter().map(|c| g * c).collect();
    for (dc, p) in d_center.iter_mut().zip(positive) {
        *dc += g * p;
    }
    let d_negatives = negatives
        .iter()
        .map(|neg| {
            let g = score_grad(dot(neg, center), false);
            for (dc, n) in d_center.iter_mut().zip(neg.iter()) {
                *dc += g * n;
            }
            center.iter().map(|c| g * c).collect()
        })
        .collect();
    PairGradient {
        center: d_center,
        positive: d_positive,
        negatives: d_negatives,
    }
}

/// Random initialization: input rows uniform in `[-0.5/dim, 0.5/dim)`, output rows zero.
pub fn init_embeddings(vocab_len: usize, params: &SgnsParams) -> Result<EmbeddingMatrix> {
    let cells = vocab_len
        .checked_mul(params.dim)
        .filter(|&c| c <= isize::MAX as usize / std::mem::size_of::<f64>())
        .ok_or_else(|| Error::Config(format!("{vocab_len} x {} embedding is too large", params.dim)))?;
    let mut rng = rng::seeded(rng::derive_seed(params.seed, "sgns-init"));
    let scale = 0.5 / params.dim as f64;
    let input = (0..cells).map(|_| rng.random_range(-scale..scale)).collect();
    Ok(EmbeddingMatrix {
        dim: params.dim,
        input,
        output: vec![0.0; cells],
    })
}

/// Trains skip-gram vectors with negative sampling by plain SGD. Training is
/// single-threaded and fully determined by `params.seed`.
pub fn train_sgns(sentences: &[Vec<Token>], vocab: &Vocab, params: &SgnsParams) -> Result<EmbeddingMatrix> {
    params.validate()?;
    let mut m = init_embeddings(vocab.len(), params)?;
    if params.epochs == 0 {
        return Ok(m);
    }
    let encoded: Vec<Vec<usize>> = sentences.iter().map(|s| vocab.encode(s)).collect();
    let total_tokens: usize = encoded.iter().map(Vec::len).sum();
    if total_tokens == 0 {
        return Err(Error::Data("no in-vocabulary tokens to train on".into()));
    }
    let noise = NoiseSampler::new(vocab.counts())?;
    let mut rng = rng::seeded(rng::derive_seed(params.seed, "sgns-train"));
    let dim = params.dim;
    let total_steps = (params.epochs * total_tokens) as f64;
    let mut step = 0usize;
    let mut center_grad = vec![0.0; dim];

    for epoch in 0..params.epochs {
        for sentence in &encoded {
            for (pos, &center) in sentence.iter().enumerate() {
                let lr = (params.learning_rate * (1.0 - step as f64 / total_steps)).max(params.min_learning_rate);
                step += 1;
                let lo = pos.saturating_sub(params.window);
                let hi = (pos + params.window).min(sentence.len() - 1);
                for ctx_pos in lo..=hi {
                    if ctx_pos == pos {
                        continue;
                    }
                    let context = sentence[ctx_pos];
                    center_grad.iter_mut().for_each(|g| *g = 0.0);
                    sgd_target(&mut m, center, context, true, lr, &mut center_grad, dim);
                    for _ in 0..params.negatives {
                        let neg = noise.sample(&mut rng);
                        if neg == context {
                            continue;
                        }
                        sgd_target(&mut m, center, neg, false, lr, &mut center_grad, dim);
                    }
                    let row = &mut m.input[center * dim..(center + 1) * dim];
                    for (v, g) in row.iter_mut().zip(&center_grad) {
                        *v -= lr * g;
                    }
                }
            }
        }
        if !m.is_finite() {
            return Err(Error::Numeric(format!(
                "skip-gram training diverged in epoch {epoch} (learning_rate={})",
                params.learning_rate
            )));
        }
    }
    Ok(m)
}

/// Updates one output row and accumulates the center-row gradient, using the
/// same derivative as [`pair_loss_grad`].
fn sgd_target(
    m: &mut EmbeddingMatrix,
    center: usize,
    target: usize,
    is_positive: bool,
    lr: f64,
    center_grad: &mut [f64],
    dim: usize,
) {
    let v = &m.input[center * dim..(center + 1) * dim];
    let u = &mut m.output[target * dim..(target + 1) * dim];
    let g = score_grad(dot(u, v), is_positive);
    for k in 0..dim {
        center_grad[k] += g * u[k];
        u[k] -= lr * g * v[k];
    }
}
