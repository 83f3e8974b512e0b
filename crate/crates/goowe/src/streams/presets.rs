//! Composite stream presets.

use crate::error::Result;
use crate::float::Float;
use crate::streams::{child_seed, RbfConfig, RbfGenerator, SigmoidJoin, StreamSource};

/// Abruptly drifting RBF stream: `segments` independent stationary RBF
/// concepts chained with sigmoid joins centred every `drift_every`
/// instances with transition width `width`.
pub fn abrupt_rbf<F: Float>(
    base: RbfConfig,
    drift_every: u64,
    width: f64,
    segments: usize,
    seed: u64,
) -> Result<Box<dyn StreamSource<F>>> {
    assert!(segments >= 1);
    let stationary = RbfConfig {
        drift_speed: 0.0,
        blip_rate: 0.0,
        ..base
    };
    let mut stream: Box<dyn StreamSource<F>> =
        Box::new(RbfGenerator::new(stationary.clone(), child_seed(seed, 0))?);
    for k in 1..segments {
        let incoming: Box<dyn StreamSource<F>> = Box::new(RbfGenerator::new(
            stationary.clone(),
            child_seed(seed, k as u64),
        )?);
        stream = Box::new(SigmoidJoin::new(
            stream,
            incoming,
            k as u64 * drift_every,
            width,
            child_seed(seed, 1_000 + k as u64),
        )?);
    }
    Ok(stream)
}
