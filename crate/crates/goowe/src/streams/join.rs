//! Sigmoid join: an abrupt-to-gradual switch between two streams.
//!
//! At instance `t` (0-based) the incoming stream is chosen with probability
//! `1 / (1 + exp(-4 (t - t0) / W))`; `W = 0` degenerates to a hard switch
//! at `t0`. Joins nest, which is how multi-drift streams are composed.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::float::Float;
use crate::instance::{Instance, StreamSchema};
use crate::streams::StreamSource;

pub struct SigmoidJoin<F: Float> {
    outgoing: Box<dyn StreamSource<F>>,
    incoming: Box<dyn StreamSource<F>>,
    center: u64,
    width: f64,
    rng: ChaCha8Rng,
    emitted: u64,
    last_from_incoming: bool,
    schema: Arc<StreamSchema>,
}

impl<F: Float> SigmoidJoin<F> {
    pub fn new(
        outgoing: Box<dyn StreamSource<F>>,
        incoming: Box<dyn StreamSource<F>>,
        center: u64,
        width: f64,
        seed: u64,
    ) -> Result<Self> {
        if outgoing.schema() != incoming.schema() {
            return Err(Error::Schema("joined streams must share a schema".into()));
        }
        let schema = outgoing.schema().clone();
        Ok(SigmoidJoin {
            outgoing,
            incoming,
            center,
            width,
            rng: ChaCha8Rng::seed_from_u64(seed),
            emitted: 0,
            last_from_incoming: false,
            schema,
        })
    }

    /// Analytic probability of drawing from the incoming stream at `t`.
    pub fn probability_incoming(&self, t: u64) -> f64 {
        if self.width <= 0.0 {
            return if t >= self.center { 1.0 } else { 0.0 };
        }
        let z = -4.0 * (t as f64 - self.center as f64) / self.width;
        1.0 / (1.0 + z.exp())
    }

    /// Which side produced the most recent instance.
    pub fn last_from_incoming(&self) -> bool {
        self.last_from_incoming
    }
}

impl<F: Float> StreamSource<F> for SigmoidJoin<F> {
    fn schema(&self) -> &Arc<StreamSchema> {
        &self.schema
    }

    fn next_instance(&mut self) -> Result<Option<Instance<F>>> {
        let p = self.probability_incoming(self.emitted);
        let from_incoming = self.rng.gen::<f64>() < p;
        self.emitted += 1;
        self.last_from_incoming = from_incoming;
        if from_incoming {
            self.incoming.next_instance()
        } else {
            self.outgoing.next_instance()
        }
    }
}
