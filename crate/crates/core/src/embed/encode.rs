use super::sgns::EmbeddingMatrix;
use super::vocab::Vocab;
use crate::textnorm::Token;

pub const DEFAULT_SEQUENCE_LEN: usize = 32;

/// Mean of the in-vocabulary word vectors of one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledEncoding {
    pub vector: Vec<f64>,
    /// No token was in the vocabulary; `vector` is all zeros.
    pub all_oov: bool,
}

/// The first `len` in-vocabulary word vectors, row-major, right-padded with zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceEncoding {
    pub len: usize,
    pub dim: usize,
    pub steps: Vec<f64>,
    pub mask: Vec<bool>,
}

impl SequenceEncoding {
    pub fn step(&self, t: usize) -> &[f64] {
        &self.steps[t * self.dim..(t + 1) * self.dim]
    }

    pub fn real_len(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

pub fn pool_sentence(matrix: &EmbeddingMatrix, vocab: &Vocab, tokens: &[Token]) -> PooledEncoding {
    let mut vector = vec![0.0; matrix.dim()];
    let ids = vocab.encode(tokens);
    if ids.is_empty() {
        return PooledEncoding { vector, all_oov: true };
    }
    for &id in &ids {
        for (acc, v) in vector.iter_mut().zip(matrix.input_row(id)) {
            *acc += v;
        }
    }
    let n = ids.len() as f64;
    vector.iter_mut().for_each(|v| *v /= n);
    PooledEncoding { vector, all_oov: false }
}

/// # Panics
/// If `len == 0`.
pub fn encode_sequence(matrix: &EmbeddingMatrix, vocab: &Vocab, tokens: &[Token], len: usize) -> SequenceEncoding {
    assert!(len >= 1, "sequence length must be positive");
    let dim = matrix.dim();
    let mut steps = vec![0.0; len * dim];
    let mut mask = vec![false; len];
    for (t, id) in vocab.encode(tokens).into_iter().take(len).enumerate() {
        steps[t * dim..(t + 1) * dim].copy_from_slice(matrix.input_row(id));
        mask[t] = true;
    }
    SequenceEncoding { len, dim, steps, mask }
}
