//! Random radial-basis-function stream generator.
//!
//! Fixed random centroids, each with a position, standard deviation, class
//! label and sampling weight. An instance picks a centroid proportionally
//! to weight and displaces its centre along a random unit direction by a
//! `N(0, std)` magnitude. Gradual drift moves every centroid along its own
//! unit direction by `drift_speed` once per `drift_interval` instances.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::float::Float;
use crate::instance::{Instance, StreamSchema};
use crate::streams::StreamSource;

#[derive(Debug, Clone, PartialEq)]
pub struct RbfConfig {
    pub attributes: usize,
    pub classes: usize,
    pub centroids: usize,
    /// Per-centroid standard deviation is drawn uniformly from
    /// `(0, std_max]`; zero pins every instance to its centroid.
    pub std_max: f64,
    /// Distance each centroid moves per drift step; zero disables drift.
    pub drift_speed: f64,
    /// Instances between drift steps.
    pub drift_interval: u64,
    /// Probability of emitting an outlier (uniform features, uniform
    /// label); outliers are transient blips, not drift.
    pub blip_rate: f64,
}

impl Default for RbfConfig {
    fn default() -> Self {
        RbfConfig {
            attributes: 20,
            classes: 4,
            centroids: 50,
            std_max: 1.0,
            drift_speed: 0.0,
            drift_interval: 500,
            blip_rate: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
struct Centroid {
    center: Vec<f64>,
    std_dev: f64,
    class: usize,
    weight: f64,
    drift_direction: Vec<f64>,
}

pub struct RbfGenerator<F: Float> {
    schema: Arc<StreamSchema>,
    cfg: RbfConfig,
    centroids: Vec<Centroid>,
    total_weight: f64,
    rng: ChaCha8Rng,
    emitted: u64,
    last_was_blip: bool,
    _marker: std::marker::PhantomData<F>,
}

impl<F: Float> RbfGenerator<F> {
    pub fn new(cfg: RbfConfig, seed: u64) -> Result<Self> {
        let schema = Arc::new(StreamSchema::numeric(cfg.attributes, cfg.classes)?);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centroids: Vec<Centroid> = (0..cfg.centroids)
            .map(|_| {
                let center: Vec<f64> = (0..cfg.attributes).map(|_| rng.gen::<f64>()).collect();
                let class = rng.gen_range(0..cfg.classes);
                let std_dev = rng.gen::<f64>() * cfg.std_max;
                let weight = 1.0 - rng.gen::<f64>(); // (0, 1]
                let drift_direction = random_unit_vector(&mut rng, cfg.attributes);
                Centroid {
                    center,
                    std_dev,
                    class,
                    weight,
                    drift_direction,
                }
            })
            .collect();
        let total_weight = centroids.iter().map(|c| c.weight).sum();
        Ok(RbfGenerator {
            schema,
            cfg,
            centroids,
            total_weight,
            rng,
            emitted: 0,
            last_was_blip: false,
            _marker: std::marker::PhantomData,
        })
    }

    /// Whether the most recent instance was an injected outlier.
    pub fn last_was_blip(&self) -> bool {
        self.last_was_blip
    }

    #[cfg(test)]
    pub(crate) fn centroid_snapshot(&self) -> Vec<(Vec<f64>, usize)> {
        self.centroids
            .iter()
            .map(|c| (c.center.clone(), c.class))
            .collect()
    }

    fn pick_centroid(&mut self) -> usize {
        let target = self.rng.gen::<f64>() * self.total_weight;
        let mut acc = 0.0;
        for (i, c) in self.centroids.iter().enumerate() {
            acc += c.weight;
            if target < acc {
                return i;
            }
        }
        self.centroids.len() - 1
    }
}

impl<F: Float> StreamSource<F> for RbfGenerator<F> {
    fn schema(&self) -> &Arc<StreamSchema> {
        &self.schema
    }

    fn next_instance(&mut self) -> Result<Option<Instance<F>>> {
        let inst = if self.cfg.blip_rate > 0.0 && self.rng.gen::<f64>() < self.cfg.blip_rate {
            self.last_was_blip = true;
            let values: Vec<F> = (0..self.cfg.attributes)
                .map(|_| F::of(self.rng.gen::<f64>()))
                .collect();
            let label = self.rng.gen_range(0..self.cfg.classes);
            Instance::from_numeric(&values, label)
        } else {
            self.last_was_blip = false;
            let idx = self.pick_centroid();
            let direction = random_unit_vector(&mut self.rng, self.cfg.attributes);
            let magnitude: f64 =
                self.rng.sample::<f64, _>(StandardNormal) * self.centroids[idx].std_dev;
            let centroid = &self.centroids[idx];
            let values: Vec<F> = centroid
                .center
                .iter()
                .zip(&direction)
                .map(|(c, d)| F::of(c + d * magnitude))
                .collect();
            Instance::from_numeric(&values, centroid.class)
        };

        self.emitted += 1;
        if self.cfg.drift_speed > 0.0 && self.emitted.is_multiple_of(self.cfg.drift_interval) {
            for c in &mut self.centroids {
                for (x, d) in c.center.iter_mut().zip(&c.drift_direction) {
                    *x += d * self.cfg.drift_speed;
                }
            }
        }
        Ok(Some(inst))
    }
}

fn random_unit_vector(rng: &mut ChaCha8Rng, dims: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dims)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams::{hash_stream, take_instances};

    #[test]
    fn same_seed_is_bit_identical() {
        let cfg = RbfConfig {
            drift_speed: 0.01,
            blip_rate: 0.001,
            ..RbfConfig::default()
        };
        let mut a = RbfGenerator::<f64>::new(cfg.clone(), 9).unwrap();
        let mut b = RbfGenerator::<f64>::new(cfg.clone(), 9).unwrap();
        assert_eq!(
            hash_stream(&mut a, 2000).unwrap(),
            hash_stream(&mut b, 2000).unwrap()
        );
        let mut c = RbfGenerator::<f64>::new(cfg, 10).unwrap();
        let mut a2 = RbfGenerator::<f64>::new(
            RbfConfig {
                drift_speed: 0.01,
                blip_rate: 0.001,
                ..RbfConfig::default()
            },
            9,
        )
        .unwrap();
        assert_ne!(
            hash_stream(&mut a2, 2000).unwrap(),
            hash_stream(&mut c, 2000).unwrap()
        );
    }

    #[test]
    fn zero_std_puts_instances_on_centroids() {
        let cfg = RbfConfig {
            std_max: 0.0,
            centroids: 5,
            attributes: 4,
            ..Default::default()
        };
        let mut gen = RbfGenerator::<f64>::new(cfg, 3).unwrap();
        let centers = gen.centroid_snapshot();
        for _ in 0..200 {
            let inst = gen.next_instance().unwrap().unwrap();
            let values: Vec<f64> = inst
                .features
                .iter()
                .map(|f| f.as_numeric().unwrap())
                .collect();
            let on_some_centroid = centers.iter().any(|(c, class)| {
                *class == inst.label && c.iter().zip(&values).all(|(a, b)| a == b)
            });
            assert!(on_some_centroid);
        }
    }

    #[test]
    fn drift_zero_keeps_centroids_fixed() {
        let cfg = RbfConfig {
            drift_speed: 0.0,
            ..Default::default()
        };
        let mut gen = RbfGenerator::<f64>::new(cfg, 5).unwrap();
        let before = gen.centroid_snapshot();
        take_instances(&mut gen, 10_000).unwrap();
        assert_eq!(before, gen.centroid_snapshot());
    }

    #[test]
    fn displacement_scales_linearly_with_drift_speed() {
        let displacement = |speed: f64| {
            let cfg = RbfConfig {
                drift_speed: speed,
                drift_interval: 500,
                ..Default::default()
            };
            let mut gen = RbfGenerator::<f64>::new(cfg, 11).unwrap();
            let before = gen.centroid_snapshot();
            take_instances(&mut gen, 500).unwrap();
            let after = gen.centroid_snapshot();
            before
                .iter()
                .zip(&after)
                .map(|((b, _), (a, _))| {
                    b.iter()
                        .zip(a)
                        .map(|(x, y)| (x - y).powi(2))
                        .sum::<f64>()
                        .sqrt()
                })
                .sum::<f64>()
        };
        let slow = displacement(0.0001);
        let fast = displacement(0.01);
        assert!((fast / slow - 100.0).abs() < 1e-6, "ratio {}", fast / slow);
    }

    #[test]
    fn nearest_centroid_is_exact_with_zero_std() {
        let cfg = RbfConfig {
            std_max: 0.0,
            centroids: 20,
            attributes: 8,
            classes: 4,
            ..Default::default()
        };
        let mut gen = RbfGenerator::<f64>::new(cfg, 17).unwrap();
        let centers = gen.centroid_snapshot();
        let mut correct = 0;
        let total = 2000;
        for _ in 0..total {
            let inst = gen.next_instance().unwrap().unwrap();
            let x: Vec<f64> = inst
                .features
                .iter()
                .map(|f| f.as_numeric().unwrap())
                .collect();
            let nearest = centers
                .iter()
                .min_by(|(a, _), (b, _)| {
                    let da: f64 = a.iter().zip(&x).map(|(v, u)| (v - u).powi(2)).sum();
                    let db: f64 = b.iter().zip(&x).map(|(v, u)| (v - u).powi(2)).sum();
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            if nearest.1 == inst.label {
                correct += 1;
            }
        }
        assert_eq!(correct, total);
    }

    #[test]
    fn blip_rate_roughly_matches_configuration() {
        let cfg = RbfConfig {
            blip_rate: 0.01,
            ..Default::default()
        };
        let mut gen = RbfGenerator::<f64>::new(cfg, 23).unwrap();
        let mut blips = 0;
        let total = 50_000;
        for _ in 0..total {
            gen.next_instance().unwrap();
            if gen.last_was_blip() {
                blips += 1;
            }
        }
        let rate = blips as f64 / total as f64;
        assert!((rate - 0.01).abs() < 0.005, "blip rate {rate}");
    }
}
