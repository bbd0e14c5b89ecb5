use crate::corpus::Label;
use crate::embed::SequenceEncoding;
use crate::error::{Error, Result};

/// Model inputs: one pooled vector per document and, for recurrent models,
/// the padded token-vector sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    dim: usize,
    vectors: Vec<Vec<f64>>,
    labels: Vec<Label>,
    sequences: Option<Vec<SequenceEncoding>>,
}

/// One document's features.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub vector: &'a [f64],
    pub sequence: Option<&'a SequenceEncoding>,
}

impl<'a> Sample<'a> {
    pub fn pooled(vector: &'a [f64]) -> Self {
        Sample { vector, sequence: None }
    }

    pub(crate) fn require_sequence(&self) -> Result<&'a SequenceEncoding> {
        self.sequence
            .ok_or_else(|| Error::Data("this model needs sequence features".into()))
    }
}

impl FeatureSet {
    pub fn new(vectors: Vec<Vec<f64>>, labels: Vec<Label>) -> Result<Self> {
        if vectors.len() != labels.len() {
            return Err(Error::Dimension {
                expected: labels.len(),
                actual: vectors.len(),
            });
        }
        let dim = vectors.first().map_or(0, Vec::len);
        for v in &vectors {
            check_vector(v, dim)?;
        }
        Ok(FeatureSet {
            dim,
            vectors,
            labels,
            sequences: None,
        })
    }

    pub fn with_sequences(mut self, sequences: Vec<SequenceEncoding>) -> Result<Self> {
        if sequences.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                actual: sequences.len(),
            });
        }
        if let Some(first) = sequences.first() {
            for s in &sequences {
                if s.dim != first.dim || s.len != first.len || s.steps.len() != s.len * s.dim || s.mask.len() != s.len {
                    return Err(Error::Data("sequence encodings have inconsistent shapes".into()));
                }
                if s.steps.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Numeric("sequence features contain a non-finite value".into()));
                }
            }
        }
        self.sequences = Some(sequences);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn sequences(&self) -> Option<&[SequenceEncoding]> {
        self.sequences.as_deref()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.labels.iter().map(|l| l.as_f64()).collect()
    }

    pub fn sample(&self, i: usize) -> Sample<'_> {
        Sample {
            vector: &self.vectors[i],
            sequence: self.sequences.as_ref().map(|s| &s[i]),
        }
    }

    pub fn samples(&self) -> impl Iterator<Item = Sample<'_>> {
        (0..self.len()).map(|i| self.sample(i))
    }

    /// At least two documents and both classes present.
    pub fn ensure_trainable(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(Error::Data(format!(
                "need at least 2 training documents, got {}",
                self.len()
            )));
        }
        let positives = self.labels.iter().filter(|l| l.is_positive()).count();
        if positives == 0 || positives == self.len() {
            return Err(Error::Data("training data contains a single class".into()));
        }
        if self.dim == 0 {
            return Err(Error::Data("feature vectors are empty".into()));
        }
        Ok(())
    }

    pub fn subset(&self, indices: &[usize]) -> FeatureSet {
        FeatureSet {
            dim: self.dim,
            vectors: indices.iter().map(|&i| self.vectors[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            sequences: self
                .sequences
                .as_ref()
                .map(|s| indices.iter().map(|&i| s[i].clone()).collect()),
        }
    }
}

pub(crate) fn check_vector(v: &[f64], dim: usize) -> Result<()> {
    if v.len() != dim {
        return Err(Error::Dimension {
            expected: dim,
            actual: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("feature vector contains a non-finite value".into()));
    }
    Ok(())
}
