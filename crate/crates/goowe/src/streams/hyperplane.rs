//! Rotating hyperplane generator.
//!
//! Uniform points in `[0, 1]^d` labelled by the side of a drifting
//! hyperplane `sum(w_i x_i) >= w_0`, `w_0 = sum(w_i) / 2`. Each weight
//! drifts by `magnitude / d` per instance along a per-weight direction that
//! reverses with 10% probability per instance.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::float::Float;
use crate::instance::{Instance, StreamSchema};
use crate::streams::StreamSource;

#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneConfig {
    pub attributes: usize,
    /// Total weight modification per instance (split across attributes).
    pub magnitude: f64,
    /// Probability of flipping the label.
    pub noise: f64,
    /// Per-weight drift direction reversal probability per instance.
    pub reversal_probability: f64,
}

impl Default for HyperplaneConfig {
    fn default() -> Self {
        HyperplaneConfig {
            attributes: 10,
            magnitude: 0.0,
            noise: 0.0,
            reversal_probability: 0.10,
        }
    }
}

pub struct HyperplaneGenerator<F: Float> {
    schema: Arc<StreamSchema>,
    cfg: HyperplaneConfig,
    weights: Vec<f64>,
    directions: Vec<f64>,
    rng: ChaCha8Rng,
    _marker: std::marker::PhantomData<F>,
}

impl<F: Float> HyperplaneGenerator<F> {
    pub fn new(cfg: HyperplaneConfig, seed: u64) -> Result<Self> {
        let schema = Arc::new(StreamSchema::new(
            (1..=cfg.attributes)
                .map(|i| crate::instance::Attribute::numeric(format!("att{i}")))
                .collect(),
            vec!["below".into(), "above".into()],
        )?);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights: Vec<f64> = (0..cfg.attributes).map(|_| rng.gen::<f64>()).collect();
        let directions = vec![1.0; cfg.attributes];
        Ok(HyperplaneGenerator {
            schema,
            cfg,
            weights,
            directions,
            rng,
            _marker: std::marker::PhantomData,
        })
    }

    /// Noise-free label for `x` under the current weights.
    pub fn raw_label(&self, x: &[f64]) -> usize {
        let sum: f64 = self.weights.iter().zip(x).map(|(w, v)| w * v).sum();
        let threshold: f64 = self.weights.iter().sum::<f64>() / 2.0;
        usize::from(sum >= threshold)
    }

    #[cfg(test)]
    pub(crate) fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl<F: Float> StreamSource<F> for HyperplaneGenerator<F> {
    fn schema(&self) -> &Arc<StreamSchema> {
        &self.schema
    }

    fn next_instance(&mut self) -> Result<Option<Instance<F>>> {
        if self.cfg.magnitude > 0.0 {
            let step = self.cfg.magnitude / self.cfg.attributes as f64;
            for i in 0..self.weights.len() {
                self.weights[i] += self.directions[i] * step;
                if self.rng.gen::<f64>() < self.cfg.reversal_probability {
                    self.directions[i] = -self.directions[i];
                }
            }
        }
        let x: Vec<f64> = (0..self.cfg.attributes)
            .map(|_| self.rng.gen::<f64>())
            .collect();
        let mut label = self.raw_label(&x);
        if self.cfg.noise > 0.0 && self.rng.gen::<f64>() < self.cfg.noise {
            label = 1 - label;
        }
        let values: Vec<F> = x.into_iter().map(F::of).collect();
        Ok(Some(Instance::from_numeric(&values, label)))
    }
}
