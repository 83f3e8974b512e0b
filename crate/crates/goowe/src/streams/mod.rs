//! Seeded synthetic data-stream generators and file readers.
//!
//! Every generator is deterministic under a 64-bit seed: one ChaCha8 stream
//! per generator, child seeds derived with SplitMix64, Gaussian draws from
//! `rand_distr`. Generators draw in `f64` and convert to the scalar type at
//! the boundary, so the instance sequence is the same at every precision.

mod hyperplane;
mod join;
mod led;
mod presets;
mod rbf;
mod reader;
mod sea;
mod tree_gen;

use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub use hyperplane::{HyperplaneConfig, HyperplaneGenerator};
pub use join::SigmoidJoin;
pub use led::{canonical_segments, LedConfig, LedGenerator};
pub use presets::abrupt_rbf;
pub use rbf::{RbfConfig, RbfGenerator};
pub use reader::{ArffStream, CsvStream};
pub use sea::{SeaConfig, SeaGenerator, SEA_THRESHOLDS};
pub use tree_gen::{RandomTreeConfig, RandomTreeGenerator};

use crate::error::Result;
use crate::float::Float;
use crate::instance::{FeatureValue, Instance, StreamSchema};

/// A source of labelled instances.
pub trait StreamSource<F: Float>: Send {
    fn schema(&self) -> &Arc<StreamSchema>;

    /// Next instance, or `None` at end of stream. Synthetic generators are
    /// unbounded; file readers finish.
    fn next_instance(&mut self) -> Result<Option<Instance<F>>>;
}

/// Pull up to `cap` instances into memory.
pub fn take_instances<F: Float>(
    source: &mut dyn StreamSource<F>,
    cap: usize,
) -> Result<Vec<Instance<F>>> {
    let mut out = Vec::with_capacity(cap);
    while out.len() < cap {
        match source.next_instance()? {
            Some(inst) => out.push(inst),
            None => break,
        }
    }
    Ok(out)
}

/// Deterministic 64-bit child seed for sub-stream `index` of `master`
/// (SplitMix64 finalizer).
pub fn child_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of the next `n` instances, for determinism checks.
pub fn hash_stream<F: Float>(source: &mut dyn StreamSource<F>, n: usize) -> Result<u64> {
    let mut hasher = std::collections::hash_map::DefaultHasher::new();
    for _ in 0..n {
        let Some(inst) = source.next_instance()? else {
            break;
        };
        for value in &inst.features {
            match value {
                FeatureValue::Numeric(v) => v.as_f64().to_bits().hash(&mut hasher),
                FeatureValue::Nominal(v) => v.hash(&mut hasher),
            }
        }
        inst.label.hash(&mut hasher);
    }
    Ok(hasher.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn child_seeds_differ_by_index_and_master() {
        assert_ne!(child_seed(42, 0), child_seed(42, 1));
        assert_ne!(child_seed(42, 0), child_seed(43, 0));
        assert_eq!(child_seed(7, 3), child_seed(7, 3));
    }
}
