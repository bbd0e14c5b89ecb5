//! Stacked (optionally bidirectional) GRU sequence classifier with a single
//! sigmoid output unit, trained by backpropagation through time and Adam.
//!
//! Cell, per direction:
//!   z = σ(W_z x + U_z h + b_z)
//!   r = σ(W_r x + U_r h + b_r)
//!   h̃ = tanh(W_h x + U_h (r ⊙ h) + b_h)
//!   h' = (1 − z) ⊙ h + z ⊙ h̃
//! Masked (padding) steps leave `h` unchanged. Intermediate layers pass their
//! per-step states upward; the last layer's final states feed the output unit.
//!
//! Parameters live in one flat vector. For each layer, for each direction
//! (forward, then backward): `W` (3H × I, gate order z, r, h, row-major), `U`
//! (3H × H), `b` (3H). The output unit's weights (F) and bias (1) come last.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::features::FeatureSet;
use crate::embed::{sigmoid, SequenceEncoding};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GruConfig {
    /// Hidden size per recurrent layer, first to last.
    pub hidden: Vec<usize>,
    pub bidirectional: bool,
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for GruConfig {
    fn default() -> Self {
        GruConfig {
            hidden: vec![8, 8, 8],
            bidirectional: true,
            batch_size: 32,
            epochs: 10,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 1,
        }
    }
}

impl GruConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return Err(Error::Config(
                "GRU needs at least one layer and positive hidden sizes".into(),
            ));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be positive".into()));
        }
        let rate_ok = self.learning_rate > 0.0 && self.learning_rate.is_finite();
        let betas_ok = (0.0..1.0).contains(&self.beta1) && (0.0..1.0).contains(&self.beta2);
        if !rate_ok || !betas_ok || !(self.epsilon > 0.0) {
            return Err(Error::Config("invalid optimizer hyperparameters".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    offset: usize,
    input: usize,
    hidden: usize,
}

impl Cell {
    fn size(input: usize, hidden: usize) -> usize {
        3 * hidden * (input + hidden + 1)
    }

    fn w(&self, gate: usize, row: usize, col: usize) -> usize {
        self.offset + (gate * self.hidden + row) * self.input + col
    }

    fn u(&self, gate: usize, row: usize, col: usize) -> usize {
        self.offset + 3 * self.hidden * self.input + (gate * self.hidden + row) * self.hidden + col
    }

    fn b(&self, gate: usize, row: usize) -> usize {
        self.offset + 3 * self.hidden * (self.input + self.hidden) + gate * self.hidden + row
    }
}

const Z: usize = 0;
const R: usize = 1;
const HH: usize = 2;

#[derive(Debug, Clone)]
struct Layout {
    /// `cells[layer][direction]`
    cells: Vec<Vec<Cell>>,
    dense_offset: usize,
    features: usize,
    total: usize,
}

impl Layout {
    fn new(input_dim: usize, hidden: &[usize], bidirectional: bool) -> Layout {
        let dirs = if bidirectional { 2 } else { 1 };
        let mut offset = 0;
        let mut input = input_dim;
        let mut cells = Vec::with_capacity(hidden.len());
        for &h in hidden {
            let layer = (0..dirs)
                .map(|_| {
                    let c = Cell {
                        offset,
                        input,
                        hidden: h,
                    };
                    offset += Cell::size(input, h);
                    c
                })
                .collect();
            cells.push(layer);
            input = h * dirs;
        }
        Layout {
            cells,
            dense_offset: offset,
            features: input,
            total: offset + input + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GruRepr", into = "GruRepr")]
pub struct GruNetwork {
    input_dim: usize,
    hidden: Vec<usize>,
    bidirectional: bool,
    params: Vec<f64>,
    layout: LayoutCache,
}

/// Derived from the shape fields; excluded from equality and serialization.
#[derive(Debug, Clone)]
struct LayoutCache(Layout);

impl PartialEq for LayoutCache {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Serialize, Deserialize)]
struct GruRepr {
    input_dim: usize,
    hidden: Vec<usize>,
    bidirectional: bool,
    params: Vec<f64>,
}

impl From<GruNetwork> for GruRepr {
    fn from(n: GruNetwork) -> Self {
        GruRepr {
            input_dim: n.input_dim,
            hidden: n.hidden,
            bidirectional: n.bidirectional,
            params: n.params,
        }
    }
}

impl TryFrom<GruRepr> for GruNetwork {
    type Error = Error;

    fn try_from(r: GruRepr) -> Result<Self> {
        GruNetwork::from_params(r.input_dim, r.hidden, r.bidirectional, r.params)
    }
}

/// Cached activations of one time step.
#[derive(Debug, Clone)]
struct StepCache {
    h_prev: Vec<f64>,
    z: Vec<f64>,
    r: Vec<f64>,
    hh: Vec<f64>,
}

struct LayerTrace {
    inputs: Vec<Vec<f64>>,
    /// `steps[direction][t]`, `None` on masked steps.
    steps: Vec<Vec<Option<StepCache>>>,
    /// `states[direction][t]`: hidden state after visiting step `t`.
    states: Vec<Vec<Vec<f64>>>,
    finals: Vec<Vec<f64>>,
}

fn direction_order(len: usize, dir: usize) -> Box<dyn DoubleEndedIterator<Item = usize>> {
    if dir == 0 {
        Box::new(0..len)
    } else {
        Box::new((0..len).rev())
    }
}

fn stable_bce(logit: f64, target: f64) -> f64 {
    logit.max(0.0) - target * logit + (-logit.abs()).exp().ln_1p()
}

impl GruNetwork {
    fn from_params(input_dim: usize, hidden: Vec<usize>, bidirectional: bool, params: Vec<f64>) -> Result<Self> {
        if input_dim == 0 || hidden.is_empty() || hidden.contains(&0) {
            return Err(Error::Config("invalid GRU shape".into()));
        }
        let layout = Layout::new(input_dim, &hidden, bidirectional);
        if params.len() != layout.total {
            return Err(Error::Dimension {
                expected: layout.total,
                actual: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Numeric("GRU parameters contain a non-finite value".into()));
        }
        Ok(GruNetwork {
            input_dim,
            hidden,
            bidirectional,
            params,
            layout: LayoutCache(layout),
        })
    }

    /// All parameters zero.
    pub fn zeros(input_dim: usize, hidden: Vec<usize>, bidirectional: bool) -> Result<Self> {
        let total = Layout::new(input_dim, &hidden, bidirectional).total;
        GruNetwork::from_params(input_dim, hidden, bidirectional, vec![0.0; total])
    }

    /// Glorot-uniform weights per gate block, zero biases.
    pub fn init(input_dim: usize, config: &GruConfig) -> Result<Self> {
        config.validate()?;
        let mut net = GruNetwork::zeros(input_dim, config.hidden.clone(), config.bidirectional)?;
        let mut rng = rng::seeded(rng::derive_seed(config.seed, "gru-init"));
        let layout = net.layout.0.clone();
        for cell in layout.cells.iter().flatten() {
            let (i, h) = (cell.input, cell.hidden);
            let w_limit = (6.0 / (i + h) as f64).sqrt();
            let u_limit = (6.0 / (2 * h) as f64).sqrt();
            for g in 0..3 {
                for row in 0..h {
                    for col in 0..i {
                        net.params[cell.w(g, row, col)] = rng.random_range(-w_limit..w_limit);
                    }
                    for col in 0..h {
                        net.params[cell.u(g, row, col)] = rng.random_range(-u_limit..u_limit);
                    }
                }
            }
        }
        let d_limit = (6.0 / (layout.features + 1) as f64).sqrt();
        for k in 0..layout.features {
            net.params[layout.dense_offset + k] = rng.random_range(-d_limit..d_limit);
        }
        Ok(net)
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden(&self) -> &[usize] {
        &self.hidden
    }

    pub fn bidirectional(&self) -> bool {
        self.bidirectional
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Flat parameter vector, for callers that perturb weights directly.
    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Width of the state handed to the output unit.
    pub fn output_features(&self) -> usize {
        self.layout.0.features
    }

    fn dirs(&self) -> usize {
        if self.bidirectional {
            2
        } else {
            1
        }
    }

    fn check_sequence(&self, seq: &SequenceEncoding) -> Result<()> {
        if seq.dim != self.input_dim {
            return Err(Error::Dimension {
                expected: self.input_dim,
                actual: seq.dim,
            });
        }
        Ok(())
    }

    fn step(&self, cell: &Cell, x: &[f64], h: &[f64]) -> StepCache {
        let p = &self.params;
        let n = cell.hidden;
        let gate = |g: usize, row: usize, recur: &[f64]| {
            let mut a = p[cell.b(g, row)];
            for (col, xv) in x.iter().enumerate() {
                a += p[cell.w(g, row, col)] * xv;
            }
            for (col, hv) in recur.iter().enumerate() {
                a += p[cell.u(g, row, col)] * hv;
            }
            a
        };
        let z: Vec<f64> = (0..n).map(|k| sigmoid(gate(Z, k, h))).collect();
        let r: Vec<f64> = (0..n).map(|k| sigmoid(gate(R, k, h))).collect();
        let rh: Vec<f64> = r.iter().zip(h).map(|(a, b)| a * b).collect();
        let hh: Vec<f64> = (0..n).map(|k| gate(HH, k, &rh).tanh()).collect();
        StepCache {
            h_prev: h.to_vec(),
            z,
            r,
            hh,
        }
    }

    fn forward_trace(&self, seq: &SequenceEncoding) -> (f64, Vec<LayerTrace>) {
        let layout = &self.layout.0;
        let len = seq.len;
        let mut inputs: Vec<Vec<f64>> = (0..len).map(|t| seq.step(t).to_vec()).collect();
        let mut traces = Vec::with_capacity(layout.cells.len());
        for layer in &layout.cells {
            let mut steps = Vec::with_capacity(layer.len());
            let mut states = Vec::with_capacity(layer.len());
            let mut finals = Vec::with_capacity(layer.len());
            for (dir, cell) in layer.iter().enumerate() {
                let mut h = vec![0.0; cell.hidden];
                let mut dir_steps = vec![None; len];
                let mut dir_states = vec![Vec::new(); len];
                for t in direction_order(len, dir) {
                    if seq.mask[t] {
                        let c = self.step(cell, &inputs[t], &h);
                        h = (0..cell.hidden)
                            .map(|k| (1.0 - c.z[k]) * c.h_prev[k] + c.z[k] * c.hh[k])
                            .collect();
                        dir_steps[t] = Some(c);
                    }
                    dir_states[t] = h.clone();
                }
                steps.push(dir_steps);
                states.push(dir_states);
                finals.push(h);
            }
            let next: Vec<Vec<f64>> = (0..len)
                .map(|t| states.iter().flat_map(|s| s[t].iter().copied()).collect())
                .collect();
            traces.push(LayerTrace {
                inputs: std::mem::replace(&mut inputs, next),
                steps,
                states,
                finals,
            });
        }
        let last = traces.last().expect("at least one layer");
        let feats: Vec<f64> = last.finals.iter().flatten().copied().collect();
        let mut logit = self.params[layout.dense_offset + layout.features];
        for (k, f) in feats.iter().enumerate() {
            logit += self.params[layout.dense_offset + k] * f;
        }
        (logit, traces)
    }

    /// Pre-sigmoid output for one sequence.
    pub fn logit(&self, seq: &SequenceEncoding) -> Result<f64> {
        self.check_sequence(seq)?;
        let (logit, _) = self.forward_trace(seq);
        if !logit.is_finite() {
            return Err(Error::Numeric("GRU produced a non-finite activation".into()));
        }
        Ok(logit)
    }

    /// Probability of the positive class.
    pub fn predict_proba(&self, seq: &SequenceEncoding) -> Result<f64> {
        Ok(sigmoid(self.logit(seq)?))
    }

    /// Probabilities for a batch of sequences.
    pub fn forward(&self, batch: &[SequenceEncoding]) -> Result<Vec<f64>> {
        batch.par_iter().map(|s| self.predict_proba(s)).collect()
    }

    /// Cross-entropy of one sequence and its gradient with respect to every parameter.
    fn sequence_loss_grad(&self, seq: &SequenceEncoding, target: f64) -> (f64, Vec<f64>) {
        let layout = &self.layout.0;
        let (logit, traces) = self.forward_trace(seq);
        let loss = stable_bce(logit, target);
        let d_logit = sigmoid(logit) - target;
        let mut grad = vec![0.0; self.params.len()];
        let last = traces.last().expect("at least one layer");
        let mut d_finals: Vec<Vec<f64>> = Vec::with_capacity(self.dirs());
        let mut k = 0;
        for f in &last.finals {
            let mut d = Vec::with_capacity(f.len());
            for v in f {
                grad[layout.dense_offset + k] += d_logit * v;
                d.push(d_logit * self.params[layout.dense_offset + k]);
                k += 1;
            }
            d_finals.push(d);
        }
        grad[layout.dense_offset + layout.features] += d_logit;

        let len = seq.len;
        let mut d_outputs: Vec<Vec<f64>> = vec![Vec::new(); len];
        for (l, (layer, trace)) in layout.cells.iter().zip(&traces).enumerate().rev() {
            let input_width = layer[0].input;
            let mut d_inputs = vec![vec![0.0; input_width]; len];
            for (dir, cell) in layer.iter().enumerate() {
                let n = cell.hidden;
                let mut carry = if l + 1 == layout.cells.len() {
                    std::mem::take(&mut d_finals[dir])
                } else {
                    vec![0.0; n]
                };
                for t in direction_order(len, dir).rev() {
                    if let Some(d) = d_outputs[t].get(dir * n..(dir + 1) * n) {
                        for (c, v) in carry.iter_mut().zip(d) {
                            *c += v;
                        }
                    }
                    if let Some(cache) = &trace.steps[dir][t] {
                        carry = self.step_backward(cell, cache, &trace.inputs[t], &carry, &mut d_inputs[t], &mut grad);
                    }
                }
                debug_assert_eq!(trace.states[dir].len(), len);
            }
            d_outputs = d_inputs;
        }
        (loss, grad)
    }

    /// Backpropagates `dh` through one step; returns the gradient for the previous state.
    fn step_backward(
        &self,
        cell: &Cell,
        c: &StepCache,
        x: &[f64],
        dh: &[f64],
        dx: &mut [f64],
        grad: &mut [f64],
    ) -> Vec<f64> {
        let p = &self.params;
        let n = cell.hidden;
        let mut dh_prev: Vec<f64> = (0..n).map(|k| dh[k] * (1.0 - c.z[k])).collect();
        let da_h: Vec<f64> = (0..n).map(|k| dh[k] * c.z[k] * (1.0 - c.hh[k] * c.hh[k])).collect();
        let da_z: Vec<f64> = (0..n)
            .map(|k| dh[k] * (c.hh[k] - c.h_prev[k]) * c.z[k] * (1.0 - c.z[k]))
            .collect();
        let rh: Vec<f64> = (0..n).map(|k| c.r[k] * c.h_prev[k]).collect();
        let mut d_rh = vec![0.0; n];
        for row in 0..n {
            for col in 0..n {
                d_rh[col] += p[cell.u(HH, row, col)] * da_h[row];
            }
        }
        let da_r: Vec<f64> = (0..n)
            .map(|k| d_rh[k] * c.h_prev[k] * c.r[k] * (1.0 - c.r[k]))
            .collect();
        for k in 0..n {
            dh_prev[k] += d_rh[k] * c.r[k];
        }
        for (g, da) in [(Z, &da_z), (R, &da_r), (HH, &da_h)] {
            let recur = if g == HH { &rh } else { &c.h_prev };
            for row in 0..n {
                let a = da[row];
                grad[cell.b(g, row)] += a;
                for (col, xv) in x.iter().enumerate() {
                    grad[cell.w(g, row, col)] += a * xv;
                    dx[col] += p[cell.w(g, row, col)] * a;
                }
                for col in 0..n {
                    grad[cell.u(g, row, col)] += a * recur[col];
                    if g != HH {
                        dh_prev[col] += p[cell.u(g, row, col)] * a;
                    }
                }
            }
        }
        dh_prev
    }

    /// Mean cross-entropy over a batch and its gradient.
    pub fn loss_and_grad(&self, batch: &[(&SequenceEncoding, f64)]) -> Result<(f64, Vec<f64>)> {
        if batch.is_empty() {
            return Err(Error::Data("empty batch".into()));
        }
        for (s, _) in batch {
            self.check_sequence(s)?;
        }
        // Per-sequence work runs in parallel; the reduction below is sequential and ordered.
        let parts: Vec<(f64, Vec<f64>)> = batch.par_iter().map(|(s, y)| self.sequence_loss_grad(s, *y)).collect();
        let scale = 1.0 / batch.len() as f64;
        let mut loss = 0.0;
        let mut grad = vec![0.0; self.params.len()];
        for (l, g) in parts {
            loss += l;
            for (acc, v) in grad.iter_mut().zip(g) {
                *acc += v;
            }
        }
        grad.iter_mut().for_each(|g| *g *= scale);
        Ok((loss * scale, grad))
    }
}

/// Adam state.
struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Adam {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64], cfg: &GruConfig) {
        self.t += 1;
        let c1 = 1.0 - cfg.beta1.powi(self.t);
        let c2 = 1.0 - cfg.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = cfg.beta1 * self.m[i] + (1.0 - cfg.beta1) * grad[i];
            self.v[i] = cfg.beta2 * self.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
            params[i] -= cfg.learning_rate * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + cfg.epsilon);
        }
    }
}

/// Trains a freshly initialized network on `features`' sequences.
pub fn train_gru(features: &FeatureSet, config: &GruConfig) -> Result<GruNetwork> {
    features.ensure_trainable()?;
    let seqs = features
        .sequences()
        .ok_or_else(|| Error::Data("GRU training needs sequence features".into()))?;
    let input_dim = seqs.first().map_or(features.dim(), |s| s.dim);
    let mut net = GruNetwork::init(input_dim, config)?;
    fit_gru(&mut net, seqs, &features.targets(), config)?;
    Ok(net)
}

/// Continues training `net` in place.
pub fn fit_gru(net: &mut GruNetwork, seqs: &[SequenceEncoding], targets: &[f64], config: &GruConfig) -> Result<()> {
    config.validate()?;
    if seqs.len() != targets.len() {
        return Err(Error::Dimension {
            expected: targets.len(),
            actual: seqs.len(),
        });
    }
    let mut adam = Adam::new(net.params.len());
    let mut rng = rng::seeded(rng::derive_seed(config.seed, "gru-batches"));
    let mut order: Vec<usize> = (0..seqs.len()).collect();
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            let batch: Vec<(&SequenceEncoding, f64)> = chunk.iter().map(|&i| (&seqs[i], targets[i])).collect();
            let (loss, grad) = net.loss_and_grad(&batch)?;
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::Numeric(format!(
                    "GRU loss became non-finite at epoch {epoch}, batch {b} (learning_rate={})",
                    config.learning_rate
                )));
            }
            epoch_loss += loss * chunk.len() as f64;
            adam.step(&mut net.params, &grad, config);
        }
        log::debug!("gru epoch {epoch}: mean loss {:.5}", epoch_loss / seqs.len() as f64);
    }
    Ok(())
}
