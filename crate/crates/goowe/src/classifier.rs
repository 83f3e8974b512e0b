//! Behavioural contract for incremental base learners.

use crate::error::Result;
use crate::float::Float;
use crate::instance::{FeatureValue, Instance};

/// An incremental classifier usable as an ensemble component.
///
/// Scoring takes `&self`: testing never trains. Training is order-dependent
/// but deterministic for a fixed input order.
pub trait IncrementalClassifier<F: Float>: Send {
    /// Update the model with one labelled instance.
    fn train(&mut self, inst: &Instance<F>) -> Result<()>;

    /// Raw, pre-normalisation per-class relevance scores (length `p`,
    /// non-negative). An untrained model returns all zeros, which the score
    /// normalisation maps to the uniform vote.
    fn raw_scores(&self, features: &[FeatureValue<F>]) -> Vec<F>;

    /// Deterministic model-size estimate in bytes.
    fn memory_estimate(&self) -> usize;

    /// Best-effort shrink towards `target_bytes`.
    fn prune(&mut self, target_bytes: usize);
}
