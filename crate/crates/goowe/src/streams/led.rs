//! LED digit display generator: predict the digit shown on a seven-segment
//! display from 7 segment attributes (each inverted with the noise
//! probability) plus 17 irrelevant random binary attributes.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::float::Float;
use crate::instance::{Attribute, FeatureValue, Instance, StreamSchema};
use crate::streams::StreamSource;

pub const LED_SEGMENTS: usize = 7;
pub const LED_IRRELEVANT: usize = 17;

/// Standard seven-segment encoding (segments a..g) per digit.
const SEGMENT_TABLE: [[u8; LED_SEGMENTS]; 10] = [
    [1, 1, 1, 1, 1, 1, 0], // 0
    [0, 1, 1, 0, 0, 0, 0], // 1
    [1, 1, 0, 1, 1, 0, 1], // 2
    [1, 1, 1, 1, 0, 0, 1], // 3
    [0, 1, 1, 0, 0, 1, 1], // 4
    [1, 0, 1, 1, 0, 1, 1], // 5
    [1, 0, 1, 1, 1, 1, 1], // 6
    [1, 1, 1, 0, 0, 0, 0], // 7
    [1, 1, 1, 1, 1, 1, 1], // 8
    [1, 1, 1, 1, 0, 1, 1], // 9
];

/// Canonical segment bits for a digit.
pub fn canonical_segments(digit: usize) -> [u8; LED_SEGMENTS] {
    SEGMENT_TABLE[digit]
}

#[derive(Debug, Clone, PartialEq)]
pub struct LedConfig {
    /// Per-segment inversion probability.
    pub noise: f64,
}

impl Default for LedConfig {
    fn default() -> Self {
        LedConfig { noise: 0.0 }
    }
}

pub struct LedGenerator<F: Float> {
    schema: Arc<StreamSchema>,
    cfg: LedConfig,
    rng: ChaCha8Rng,
    _marker: std::marker::PhantomData<F>,
}

impl<F: Float> LedGenerator<F> {
    pub fn new(cfg: LedConfig, seed: u64) -> Result<Self> {
        let binary = vec!["0".to_string(), "1".to_string()];
        let mut attrs: Vec<Attribute> = (1..=LED_SEGMENTS)
            .map(|i| Attribute::nominal(format!("seg{i}"), binary.clone()))
            .collect();
        attrs.extend(
            (1..=LED_IRRELEVANT).map(|i| Attribute::nominal(format!("irr{i}"), binary.clone())),
        );
        let schema = Arc::new(StreamSchema::new(
            attrs,
            (0..10).map(|d| d.to_string()).collect(),
        )?);
        Ok(LedGenerator {
            schema,
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
            _marker: std::marker::PhantomData,
        })
    }
}

impl<F: Float> StreamSource<F> for LedGenerator<F> {
    fn schema(&self) -> &Arc<StreamSchema> {
        &self.schema
    }

    fn next_instance(&mut self) -> Result<Option<Instance<F>>> {
        let digit = self.rng.gen_range(0..10usize);
        let mut features = Vec::with_capacity(LED_SEGMENTS + LED_IRRELEVANT);
        for &bit in &SEGMENT_TABLE[digit] {
            let mut value = bit;
            if self.cfg.noise > 0.0 && self.rng.gen::<f64>() < self.cfg.noise {
                value = 1 - value;
            }
            features.push(FeatureValue::Nominal(value as u32));
        }
        for _ in 0..LED_IRRELEVANT {
            features.push(FeatureValue::Nominal(self.rng.gen_range(0..2u32)));
        }
        Ok(Some(Instance::new(features, digit)))
    }
}
