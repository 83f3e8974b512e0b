//! Per-class relevance scores and the one-hot target they are matched to.

use crate::error::{Error, Result};
use crate::float::Float;

/// A component's normalised per-class relevance scores for one instance.
///
/// Entries lie in `[0, 1]` and sum to one: either `raw / sum(raw)`, or the
/// uniform vector `1/p` when the raw scores sum to zero (an untrained
/// learner must still emit a legal vote).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector<F: Float>(Vec<F>);

impl<F: Float> ScoreVector<F> {
    /// Normalise raw non-negative scores into a legal vote.
    ///
    /// `p` is the schema's class count; a length mismatch is a schema error
    /// and a negative or non-finite entry an invalid-score error.
    pub fn normalized(raw: &[F], p: usize) -> Result<Self> {
        if raw.len() != p {
            return Err(Error::Schema(format!(
                "score vector has length {}, schema has {p} classes",
                raw.len()
            )));
        }
        let mut sum = F::zero();
        for (k, &v) in raw.iter().enumerate() {
            if !v.is_finite() || v < F::zero() {
                return Err(Error::InvalidScore(format!("entry {k} is {v}")));
            }
            sum += v;
        }
        if sum == F::zero() {
            return Ok(Self::uniform(p));
        }
        Ok(ScoreVector(raw.iter().map(|&v| v / sum).collect()))
    }

    /// The uniform vote `1/p` per class.
    pub fn uniform(p: usize) -> Self {
        let share = F::one() / F::of(p as f64);
        ScoreVector(vec![share; p])
    }

    /// One-hot vote for `label`.
    pub fn one_hot(label: usize, p: usize) -> Self {
        let mut v = vec![F::zero(); p];
        v[label] = F::one();
        ScoreVector(v)
    }

    pub fn scores(&self) -> &[F] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the largest entry; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        argmax(&self.0)
    }
}

impl<F: Float> std::ops::Index<usize> for ScoreVector<F> {
    type Output = F;
    fn index(&self, k: usize) -> &F {
        &self.0[k]
    }
}

/// Largest-entry index with ties broken towards the lowest index.
pub fn argmax<F: Float>(values: &[F]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// One-hot target point in class-score space for a true label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdealPoint {
    label: usize,
    classes: usize,
}

impl IdealPoint {
    pub fn new(label: usize, classes: usize) -> Result<Self> {
        if label >= classes {
            return Err(Error::Schema(format!(
                "label {label} out of range 0..{classes}"
            )));
        }
        Ok(IdealPoint { label, classes })
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    /// Materialise the one-hot vector.
    pub fn to_dense<F: Float>(&self) -> Vec<F> {
        let mut v = vec![F::zero(); self.classes];
        v[self.label] = F::one();
        v
    }
}
