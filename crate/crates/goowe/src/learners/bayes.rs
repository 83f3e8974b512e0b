//! Incremental naive Bayes.
//!
//! Used standalone as a base learner and inside Hoeffding tree leaves, where
//! its per-class sufficient statistics double as the split-evaluation
//! statistics.

use std::sync::Arc;

use crate::classifier::IncrementalClassifier;
use crate::error::{Error, Result};
use crate::float::Float;
use crate::instance::{AttributeKind, FeatureValue, Instance, StreamSchema};

/// Variance floor guarding against zero-variance singularities on constant
/// attributes (unbiased estimate is used above the floor).
pub const VARIANCE_FLOOR: f64 = 1e-9;

// Memory-estimate constants. The estimate is a deterministic formula over
// the model structure, not a process-level measurement, so runs can report
// it reproducibly.
pub(crate) const MODEL_BASE_BYTES: usize = 64;
pub(crate) const GAUSSIAN_STAT_BYTES: usize = 40; // count, mean, m2, min, max
pub(crate) const COUNT_BYTES: usize = 8;

/// Single-pass Gaussian accumulator (weighted Welford update).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStat<F: Float> {
    pub count: F,
    pub mean: F,
    pub m2: F,
    pub min: F,
    pub max: F,
}

impl<F: Float> Default for GaussianStat<F> {
    fn default() -> Self {
        GaussianStat {
            count: F::zero(),
            mean: F::zero(),
            m2: F::zero(),
            min: F::infinity(),
            max: F::neg_infinity(),
        }
    }
}

impl<F: Float> GaussianStat<F> {
    pub fn observe(&mut self, value: F, weight: F) {
        self.count += weight;
        let delta = value - self.mean;
        self.mean += delta * weight / self.count;
        self.m2 += weight * delta * (value - self.mean);
        if value < self.min {
            self.min = value;
        }
        if value > self.max {
            self.max = value;
        }
    }

    /// Unbiased variance with the [`VARIANCE_FLOOR`] applied; the floor also
    /// covers the under-determined `count < 2` case.
    pub fn variance(&self) -> F {
        let floor = F::of(VARIANCE_FLOOR);
        if self.count < F::of(2.0) {
            return floor;
        }
        let v = self.m2 / (self.count - F::one());
        if v > floor {
            v
        } else {
            floor
        }
    }

    pub fn std_dev(&self) -> F {
        self.variance().sqrt()
    }

    fn log_density(&self, x: F) -> F {
        let var = self.variance();
        let diff = x - self.mean;
        let two = F::of(2.0);
        -(two * F::of(std::f64::consts::PI) * var).ln() / two - diff * diff / (two * var)
    }
}

/// Per-attribute, per-class sufficient statistics.
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeStats<F: Float> {
    /// One Gaussian accumulator per class.
    Numeric(Vec<GaussianStat<F>>),
    /// Per-class category counts, `counts[class][value]`.
    Nominal(Vec<Vec<F>>),
}

impl<F: Float> AttributeStats<F> {
    fn for_attribute(kind: &AttributeKind, classes: usize) -> Self {
        match kind {
            AttributeKind::Numeric => {
                AttributeStats::Numeric(vec![GaussianStat::default(); classes])
            }
            AttributeKind::Nominal { values } => {
                AttributeStats::Nominal(vec![vec![F::zero(); values.len()]; classes])
            }
        }
    }

    fn estimate_bytes(&self) -> usize {
        match self {
            AttributeStats::Numeric(per_class) => per_class.len() * GAUSSIAN_STAT_BYTES,
            AttributeStats::Nominal(per_class) => {
                per_class.iter().map(|c| c.len() * COUNT_BYTES).sum()
            }
        }
    }
}

/// Incremental naive Bayes: class priors, Gaussian likelihoods for numeric
/// attributes, Laplace-smoothed category counts for nominal ones.
#[derive(Debug, Clone)]
pub struct NaiveBayesModel<F: Float> {
    schema: Arc<StreamSchema>,
    class_counts: Vec<F>,
    attributes: Vec<AttributeStats<F>>,
    total: F,
}

impl<F: Float> NaiveBayesModel<F> {
    pub fn new(schema: Arc<StreamSchema>) -> Self {
        let p = schema.class_count();
        let attributes = schema
            .attributes()
            .iter()
            .map(|a| AttributeStats::for_attribute(&a.kind, p))
            .collect();
        NaiveBayesModel {
            schema,
            class_counts: vec![F::zero(); p],
            attributes,
            total: F::zero(),
        }
    }

    /// Model that tracks class counts only (deactivated-leaf form).
    pub fn counts_only(schema: Arc<StreamSchema>, class_counts: Vec<F>) -> Self {
        let total = class_counts.iter().copied().sum();
        NaiveBayesModel {
            schema,
            class_counts,
            attributes: Vec::new(),
            total,
        }
    }

    pub fn schema(&self) -> &Arc<StreamSchema> {
        &self.schema
    }

    pub fn class_counts(&self) -> &[F] {
        &self.class_counts
    }

    pub fn total_weight(&self) -> F {
        self.total
    }

    pub fn attribute_stats(&self) -> &[AttributeStats<F>] {
        &self.attributes
    }

    /// Drop everything beyond the class-count vector.
    pub fn drop_attribute_stats(&mut self) {
        self.attributes.clear();
    }

    pub fn has_attribute_stats(&self) -> bool {
        !self.attributes.is_empty()
    }

    /// Seed the class counts (projected distribution for a fresh tree leaf).
    pub fn seed_class_counts(&mut self, counts: Vec<F>) {
        self.total = counts.iter().copied().sum();
        self.class_counts = counts;
    }

    pub fn observe(&mut self, inst: &Instance<F>) -> Result<()> {
        self.schema.validate(inst)?;
        let w = inst.weight;
        self.class_counts[inst.label] += w;
        self.total += w;
        for (stats, value) in self.attributes.iter_mut().zip(&inst.features) {
            match (stats, value) {
                (AttributeStats::Numeric(per_class), FeatureValue::Numeric(x)) => {
                    per_class[inst.label].observe(*x, w);
                }
                (AttributeStats::Nominal(per_class), FeatureValue::Nominal(v)) => {
                    per_class[inst.label][*v as usize] += w;
                }
                _ => return Err(Error::Schema("attribute kind mismatch".into())),
            }
        }
        Ok(())
    }

    /// Posterior-proportional raw scores, computed in the log domain and
    /// exponentiated after shifting by the maximum. An empty model returns
    /// all zeros, which score normalisation maps to the uniform vote.
    pub fn posterior_scores(&self, features: &[FeatureValue<F>]) -> Vec<F> {
        let p = self.schema.class_count();
        if self.total <= F::zero() {
            return vec![F::zero(); p];
        }
        if self.attributes.is_empty() {
            // Counts-only model votes its class distribution.
            return self.class_counts.clone();
        }
        let mut log_scores = vec![F::neg_infinity(); p];
        let mut any = false;
        for c in 0..p {
            if self.class_counts[c] <= F::zero() {
                continue;
            }
            let mut lp = (self.class_counts[c] / self.total).ln();
            for (stats, value) in self.attributes.iter().zip(features) {
                match (stats, value) {
                    (AttributeStats::Numeric(per_class), FeatureValue::Numeric(x)) => {
                        let stat = &per_class[c];
                        if stat.count > F::zero() {
                            lp += stat.log_density(*x);
                        }
                    }
                    (AttributeStats::Nominal(per_class), FeatureValue::Nominal(v)) => {
                        let counts = &per_class[c];
                        let class_total: F = counts.iter().copied().sum();
                        let card = F::of(counts.len() as f64);
                        let smoothed = (counts[*v as usize] + F::one()) / (class_total + card);
                        lp += smoothed.ln();
                    }
                    _ => return vec![F::zero(); p],
                }
            }
            log_scores[c] = lp;
            any = true;
        }
        if !any {
            return vec![F::zero(); p];
        }
        let max = log_scores
            .iter()
            .copied()
            .fold(F::neg_infinity(), |acc, v| if v > acc { v } else { acc });
        log_scores
            .into_iter()
            .map(|lp| {
                if lp.is_finite() {
                    (lp - max).exp()
                } else {
                    F::zero()
                }
            })
            .collect()
    }

    pub fn estimate_bytes(&self) -> usize {
        MODEL_BASE_BYTES
            + self.class_counts.len() * COUNT_BYTES
            + self
                .attributes
                .iter()
                .map(|a| a.estimate_bytes())
                .sum::<usize>()
    }
}

impl<F: Float> IncrementalClassifier<F> for NaiveBayesModel<F> {
    fn train(&mut self, inst: &Instance<F>) -> Result<()> {
        self.observe(inst)
    }

    fn raw_scores(&self, features: &[FeatureValue<F>]) -> Vec<F> {
        self.posterior_scores(features)
    }

    fn memory_estimate(&self) -> usize {
        self.estimate_bytes()
    }

    fn prune(&mut self, _target_bytes: usize) {
        // A naive Bayes model has nothing safe to drop: its statistics are
        // fixed-size for the schema.
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Attribute;
    use crate::score::argmax;

    fn numeric_schema(attrs: usize, classes: usize) -> Arc<StreamSchema> {
        Arc::new(StreamSchema::numeric(attrs, classes).unwrap())
    }

    #[test]
    fn single_class_training_gives_that_prior() {
        let schema = numeric_schema(1, 2);
        let mut nb = NaiveBayesModel::<f64>::new(schema);
        for i in 0..10 {
            nb.observe(&Instance::from_numeric(&[i as f64], 0)).unwrap();
        }
        assert_eq!(nb.class_counts()[0], 10.0);
        assert_eq!(nb.class_counts()[1], 0.0);
        assert_eq!(nb.total_weight(), 10.0);
    }

    #[test]
    fn welford_matches_hand_arithmetic() {
        let schema = numeric_schema(1, 2);
        let mut nb = NaiveBayesModel::<f64>::new(schema);
        for v in [2.0, 4.0, 6.0] {
            nb.observe(&Instance::from_numeric(&[v], 0)).unwrap();
        }
        let AttributeStats::Numeric(stats) = &nb.attribute_stats()[0] else {
            panic!("numeric expected")
        };
        assert!((stats[0].mean - 4.0).abs() < 1e-12);
        assert!((stats[0].variance() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn nominal_counts_track_frequencies() {
        let schema = Arc::new(
            StreamSchema::new(
                vec![Attribute::nominal_with_cardinality("c", 3)],
                vec!["a".into(), "b".into()],
            )
            .unwrap(),
        );
        let mut nb = NaiveBayesModel::<f64>::new(schema);
        for (v, label) in [(0, 0), (0, 0), (2, 0), (1, 1)] {
            nb.observe(&Instance::new(vec![FeatureValue::Nominal(v)], label))
                .unwrap();
        }
        let AttributeStats::Nominal(counts) = &nb.attribute_stats()[0] else {
            panic!("nominal expected")
        };
        assert_eq!(counts[0], vec![2.0, 0.0, 1.0]);
        assert_eq!(counts[1], vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn empty_model_scores_zero() {
        let schema = numeric_schema(2, 3);
        let nb = NaiveBayesModel::<f64>::new(schema);
        assert_eq!(
            nb.posterior_scores(&[FeatureValue::Numeric(0.0); 2]),
            vec![0.0; 3]
        );
    }

    #[test]
    fn single_instance_recalls_its_own_label() {
        let schema = numeric_schema(2, 3);
        let mut nb = NaiveBayesModel::new(schema);
        let inst = Instance::from_numeric(&[1.0, -2.0], 2);
        nb.observe(&inst).unwrap();
        let scores = nb.posterior_scores(&inst.features);
        assert_eq!(argmax(&scores), 2);
    }

    /// Posterior argmax agrees with the exact Gaussian posterior on a
    /// two-class, one-attribute problem at 100 query points.
    #[test]
    fn argmax_matches_exact_gaussian_posterior() {
        let schema = numeric_schema(1, 2);
        let mut nb = NaiveBayesModel::new(schema);
        // Two synthetic populations: N(0,1) and N(3,0.25), 60/40 prior.
        let xs0: Vec<f64> = (0..60).map(|i| (i as f64 / 59.0 - 0.5) * 4.0).collect();
        let xs1: Vec<f64> = (0..40)
            .map(|i| 3.0 + (i as f64 / 39.0 - 0.5) * 1.6)
            .collect();
        for &x in &xs0 {
            nb.observe(&Instance::from_numeric(&[x], 0)).unwrap();
        }
        for &x in &xs1 {
            nb.observe(&Instance::from_numeric(&[x], 1)).unwrap();
        }
        // Oracle: exact posterior from the empirical moments.
        let moments = |xs: &[f64]| {
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (mean, var, n)
        };
        let (m0, v0, n0) = moments(&xs0);
        let (m1, v1, n1) = moments(&xs1);
        let total = n0 + n1;
        for q in 0..100 {
            let x = -3.0 + q as f64 * 8.0 / 99.0;
            let post = |m: f64, v: f64, n: f64| {
                (n / total) * (-0.5 * (x - m).powi(2) / v).exp() / v.sqrt()
            };
            let expect = if post(m0, v0, n0) >= post(m1, v1, n1) {
                0
            } else {
                1
            };
            let scores = nb.posterior_scores(&[FeatureValue::Numeric(x)]);
            assert_eq!(argmax(&scores), expect, "query {x}");
        }
    }

    #[test]
    fn well_separated_classes_score_their_mean() {
        let schema = numeric_schema(1, 2);
        let mut nb = NaiveBayesModel::new(schema);
        for i in 0..20 {
            nb.observe(&Instance::from_numeric(&[0.0 + 0.01 * i as f64], 0))
                .unwrap();
            nb.observe(&Instance::from_numeric(&[10.0 + 0.01 * i as f64], 1))
                .unwrap();
        }
        let at_zero = nb.posterior_scores(&[FeatureValue::Numeric(0.1)]);
        assert_eq!(argmax(&at_zero), 0);
        let at_ten = nb.posterior_scores(&[FeatureValue::Numeric(10.1)]);
        assert_eq!(argmax(&at_ten), 1);
    }

    #[test]
    fn memory_estimate_is_structural() {
        let schema = numeric_schema(3, 4);
        let a = NaiveBayesModel::<f64>::new(schema.clone());
        let mut b = NaiveBayesModel::<f64>::new(schema);
        assert_eq!(a.memory_estimate(), b.memory_estimate());
        assert_eq!(
            a.memory_estimate(),
            MODEL_BASE_BYTES + 4 * COUNT_BYTES + 3 * 4 * GAUSSIAN_STAT_BYTES
        );
        b.drop_attribute_stats();
        assert_eq!(b.memory_estimate(), MODEL_BASE_BYTES + 4 * COUNT_BYTES);
    }

    #[test]
    fn variance_floor_applies_to_constant_attribute() {
        let schema = numeric_schema(1, 2);
        let mut nb = NaiveBayesModel::<f64>::new(schema);
        for _ in 0..5 {
            nb.observe(&Instance::from_numeric(&[7.0], 0)).unwrap();
        }
        let AttributeStats::Numeric(stats) = &nb.attribute_stats()[0] else {
            panic!()
        };
        assert_eq!(stats[0].variance(), VARIANCE_FLOOR);
    }
}
