//! SEA concepts generator: three numeric attributes in `[0, 10]`, class
//! decided by whether the first two sum below a per-concept threshold,
//! with optional label noise and an abrupt concept rotation schedule.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::float::Float;
use crate::instance::{Instance, StreamSchema};
use crate::streams::StreamSource;

/// Per-concept thresholds, rotated in order on the drift schedule.
pub const SEA_THRESHOLDS: [f64; 4] = [8.0, 9.0, 7.0, 9.5];

#[derive(Debug, Clone, PartialEq)]
pub struct SeaConfig {
    /// Probability of flipping the label.
    pub noise: f64,
    /// Switch to the next threshold every this many instances.
    pub drift_every: Option<u64>,
    /// Index into [`SEA_THRESHOLDS`] for the first concept.
    pub start_concept: usize,
}

impl Default for SeaConfig {
    fn default() -> Self {
        SeaConfig {
            noise: 0.0,
            drift_every: None,
            start_concept: 0,
        }
    }
}

pub struct SeaGenerator<F: Float> {
    schema: Arc<StreamSchema>,
    cfg: SeaConfig,
    rng: ChaCha8Rng,
    emitted: u64,
    _marker: std::marker::PhantomData<F>,
}

impl<F: Float> SeaGenerator<F> {
    pub fn new(cfg: SeaConfig, seed: u64) -> Result<Self> {
        let schema = Arc::new(StreamSchema::new(
            (1..=3)
                .map(|i| crate::instance::Attribute::numeric(format!("att{i}")))
                .collect(),
            vec!["neg".into(), "pos".into()],
        )?);
        Ok(SeaGenerator {
            schema,
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
            emitted: 0,
            _marker: std::marker::PhantomData,
        })
    }

    pub fn current_threshold(&self) -> f64 {
        let concept = match self.cfg.drift_every {
            Some(k) if k > 0 => self.cfg.start_concept + (self.emitted / k) as usize,
            _ => self.cfg.start_concept,
        };
        SEA_THRESHOLDS[concept % SEA_THRESHOLDS.len()]
    }

    /// Noise-free label under the current concept: class 1 when
    /// `att1 + att2 <= threshold`.
    pub fn raw_label(&self, att1: f64, att2: f64) -> usize {
        usize::from(att1 + att2 <= self.current_threshold())
    }
}

impl<F: Float> StreamSource<F> for SeaGenerator<F> {
    fn schema(&self) -> &Arc<StreamSchema> {
        &self.schema
    }

    fn next_instance(&mut self) -> Result<Option<Instance<F>>> {
        let a1 = self.rng.gen::<f64>() * 10.0;
        let a2 = self.rng.gen::<f64>() * 10.0;
        let a3 = self.rng.gen::<f64>() * 10.0;
        let mut label = self.raw_label(a1, a2);
        if self.cfg.noise > 0.0 && self.rng.gen::<f64>() < self.cfg.noise {
            label = 1 - label;
        }
        self.emitted += 1;
        Ok(Some(Instance::from_numeric(
            &[F::of(a1), F::of(a2), F::of(a3)],
            label,
        )))
    }
}
