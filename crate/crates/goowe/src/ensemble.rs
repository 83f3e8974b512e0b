//! The least-squares weighted online ensemble.
//!
//! Per instance: score with every component, solve the window system for
//! component weights, emit the weighted aggregated vote, then absorb the
//! labelled instance (window, chunk, and eventual chunk training). A full
//! chunk trains a fresh candidate classifier; when the ensemble is at
//! capacity the component with the smallest `|w'|` on a chunk-built system
//! is dropped first. Components are pruned when the ensemble's memory
//! estimate reaches the configured limit.

use std::sync::Arc;

use crate::classifier::IncrementalClassifier;
use crate::error::{Error, Result};
use crate::float::Float;
use crate::instance::{FeatureValue, Instance, StreamSchema};
use crate::learners::LearnerSpec;
use crate::score::{IdealPoint, ScoreVector};
use crate::solver::{SolveReport, WeightSystem, WindowAccumulator};
use crate::window::{CachedInstance, DataChunk};

/// A scored prediction: the aggregated vote and its argmax label.
#[derive(Debug, Clone)]
pub struct Prediction<F: Float> {
    pub scores: ScoreVector<F>,
    pub label: usize,
}

impl<F: Float> Prediction<F> {
    pub fn uniform(p: usize) -> Self {
        Prediction {
            scores: ScoreVector::uniform(p),
            label: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GooweConfig {
    /// Maximum number of components `m`.
    pub max_components: usize,
    /// Training chunk size `h`.
    pub chunk_size: usize,
    /// Instance window size `n` for the weight solve.
    pub window_size: usize,
    /// Ensemble memory limit `L` in bytes; pruning triggers at or above it.
    pub memory_limit_bytes: usize,
    pub learner: LearnerSpec,
}

impl Default for GooweConfig {
    fn default() -> Self {
        GooweConfig {
            max_components: 10,
            chunk_size: 500,
            window_size: 500,
            memory_limit_bytes: 32 * 1024 * 1024,
            learner: LearnerSpec::default(),
        }
    }
}

impl GooweConfig {
    fn validate(&self) -> Result<()> {
        if self.max_components == 0 {
            return Err(Error::Config("max_components must be at least 1".into()));
        }
        if self.chunk_size == 0 || self.window_size == 0 {
            return Err(Error::Config(
                "chunk and window sizes must be positive".into(),
            ));
        }
        if self.memory_limit_bytes == 0 {
            return Err(Error::Config("memory limit must be positive".into()));
        }
        Ok(())
    }
}

pub(crate) struct Component<F: Float> {
    pub id: u64,
    pub learner: Box<dyn IncrementalClassifier<F>>,
}

/// Snapshot of the last component replacement, kept so the drop decision can
/// be re-derived independently in tests.
#[derive(Debug, Clone)]
pub struct ReplacementEvent<F: Float> {
    pub removed_id: u64,
    pub removed_index: usize,
    pub component_ids: Vec<u64>,
    pub chunk_system: WeightSystem<F>,
    pub chunk_weights: Vec<F>,
}

pub struct GooweEnsemble<F: Float> {
    schema: Arc<StreamSchema>,
    config: GooweConfig,
    components: Vec<Component<F>>,
    next_id: u64,
    accum: WindowAccumulator<F>,
    chunk: DataChunk<F>,
    last_solve: Option<SolveReport<F>>,
    last_replacement: Option<ReplacementEvent<F>>,
    solve_fallbacks: u64,
    prune_events: u64,
}

impl<F: Float> GooweEnsemble<F> {
    pub fn new(schema: Arc<StreamSchema>, config: GooweConfig) -> Result<Self> {
        config.validate()?;
        let window_capacity = config.window_size.max(config.chunk_size);
        Ok(GooweEnsemble {
            accum: WindowAccumulator::new(window_capacity),
            chunk: DataChunk::new(config.chunk_size),
            schema,
            config,
            components: Vec::new(),
            next_id: 0,
            last_solve: None,
            last_replacement: None,
            solve_fallbacks: 0,
            prune_events: 0,
        })
    }

    pub fn schema(&self) -> &Arc<StreamSchema> {
        &self.schema
    }

    pub fn config(&self) -> &GooweConfig {
        &self.config
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn component_ids(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.id).collect()
    }

    pub fn window_len(&self) -> usize {
        self.accum.window().len()
    }

    pub fn last_solve(&self) -> Option<&SolveReport<F>> {
        self.last_solve.as_ref()
    }

    pub fn last_replacement(&self) -> Option<&ReplacementEvent<F>> {
        self.last_replacement.as_ref()
    }

    /// Number of solves that degraded to uniform weights.
    pub fn solve_fallbacks(&self) -> u64 {
        self.solve_fallbacks
    }

    pub fn prune_events(&self) -> u64 {
        self.prune_events
    }

    /// The incrementally maintained window system.
    pub fn system(&self) -> &WeightSystem<F> {
        self.accum.system()
    }

    /// From-scratch recomputation of the window system, for fidelity checks.
    pub fn recompute_system(&self) -> Result<WeightSystem<F>> {
        self.accum
            .recompute(&self.component_ids(), self.schema.class_count())
    }

    /// Sum of the components' deterministic model-size estimates.
    pub fn memory_estimate(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.learner.memory_estimate())
            .sum()
    }

    /// Score `features` with every component (normalised votes, ensemble
    /// order). Read-only with respect to the learners.
    fn component_votes(&self, features: &[FeatureValue<F>]) -> Result<Vec<ScoreVector<F>>> {
        let p = self.schema.class_count();
        self.components
            .iter()
            .map(|c| ScoreVector::normalized(&c.learner.raw_scores(features), p))
            .collect()
    }

    /// Solve the window system for the current component weights, filling
    /// lazy vote caches first. An empty window yields uniform weights (cold
    /// start); a degenerate solve falls back to uniform and is counted.
    fn window_weights(&mut self) -> Result<Vec<F>> {
        let p = self.schema.class_count();
        let ids = self.component_ids();
        let components = &self.components;
        self.accum.ensure(&ids, p, |id, instance| {
            let comp = components
                .iter()
                .find(|c| c.id == id)
                .ok_or_else(|| Error::Internal(format!("unknown component {id}")))?;
            ScoreVector::normalized(&comp.learner.raw_scores(&instance.features), p)
        })?;
        let m = self.components.len();
        if self.accum.window().is_empty() {
            return Ok(vec![F::one() / F::of(m as f64); m]);
        }
        let report = self.accum.system().solve()?;
        if report.fallback_uniform {
            self.solve_fallbacks += 1;
        }
        let weights = report.weights.clone();
        self.last_solve = Some(report);
        Ok(weights)
    }

    /// Predict without training (scores components and solves weights).
    pub fn predict(&mut self, features: &[FeatureValue<F>]) -> Result<Prediction<F>> {
        let p = self.schema.class_count();
        if self.components.is_empty() {
            return Ok(Prediction::uniform(p));
        }
        let votes = self.component_votes(features)?;
        let weights = self.window_weights()?;
        let refs: Vec<&ScoreVector<F>> = votes.iter().collect();
        let scores = aggregate_votes(&refs, &weights);
        let label = scores.argmax();
        Ok(Prediction { scores, label })
    }

    /// One interleaved test-then-train step: predict first, then absorb the
    /// labelled instance into window and chunk, train on a completed chunk,
    /// and prune under memory pressure.
    pub fn process(&mut self, inst: &Instance<F>) -> Result<Prediction<F>> {
        self.schema.validate(inst)?;
        let p = self.schema.class_count();

        let votes = self.component_votes(&inst.features)?;
        let prediction = if self.components.is_empty() {
            Prediction::uniform(p)
        } else {
            let weights = self.window_weights()?;
            let refs: Vec<&ScoreVector<F>> = votes.iter().collect();
            let scores = aggregate_votes(&refs, &weights);
            let label = scores.argmax();
            Prediction { scores, label }
        };

        let ids = self.component_ids();
        let slot = CachedInstance::new(inst.clone(), ids.iter().copied().zip(votes).collect());
        self.accum.push(slot, &ids, p)?;

        if let Some(chunk) = self.chunk.push(inst.clone()) {
            self.train_on_chunk(&chunk)?;
        }
        if self.memory_estimate() >= self.config.memory_limit_bytes {
            self.prune_all();
        }
        Ok(prediction)
    }

    /// Chunk training: build a candidate on the chunk; if at capacity, drop
    /// the component with minimum `|w'|` on the chunk-built system (ties to
    /// the lowest index); incrementally train survivors; add the candidate.
    fn train_on_chunk(&mut self, chunk: &[Instance<F>]) -> Result<()> {
        let p = self.schema.class_count();
        let mut candidate = self.config.learner.build::<F>(&self.schema);
        for inst in chunk {
            candidate.train(inst)?;
        }

        if self.components.len() == self.config.max_components {
            let mut sys = WeightSystem::zeros(self.components.len());
            for inst in chunk {
                let votes = self.component_votes(&inst.features)?;
                let refs: Vec<&ScoreVector<F>> = votes.iter().collect();
                sys.add_instance(&refs, &IdealPoint::new(inst.label, p)?)?;
            }
            let report = sys.solve()?;
            let victim = min_abs_index(&report.weights);
            let removed = self.components.remove(victim);
            self.last_replacement = Some(ReplacementEvent {
                removed_id: removed.id,
                removed_index: victim,
                component_ids: {
                    let mut ids: Vec<u64> = self.components.iter().map(|c| c.id).collect();
                    ids.insert(victim, removed.id);
                    ids
                },
                chunk_system: sys,
                chunk_weights: report.weights,
            });
        }

        for comp in &mut self.components {
            for inst in chunk {
                comp.learner.train(inst)?;
            }
        }
        let id = self.next_id;
        self.next_id += 1;
        self.components.push(Component {
            id,
            learner: candidate,
        });

        let live = self.component_ids();
        self.accum.mark_components_changed(&live);
        Ok(())
    }

    /// Give every component an equal share of the memory limit to prune to.
    pub fn prune_all(&mut self) {
        if self.components.is_empty() {
            return;
        }
        let share = self.config.memory_limit_bytes / self.components.len();
        for comp in &mut self.components {
            comp.learner.prune(share);
        }
        self.prune_events += 1;
    }
}

/// Index of the weight with the smallest magnitude; ties break low.
pub fn min_abs_index<F: Float>(weights: &[F]) -> usize {
    let mut best = 0;
    for (i, w) in weights.iter().enumerate().skip(1) {
        if w.abs() < weights[best].abs() {
            best = i;
        }
    }
    best
}

/// Weighted vote aggregation.
///
/// Computes `raw = sum_j w_j * s_j`, then, only when negative entries
/// appear (weights may be negative), rescales per class by
/// `(v - min) / (max - min)` — uniform if `max == min` — and finally applies
/// the standard sum normalisation. Keeping the rescale conditional leaves
/// an all-non-negative aggregate (for example a single component with unit
/// weight) unchanged.
pub fn aggregate_votes<F: Float>(scores: &[&ScoreVector<F>], weights: &[F]) -> ScoreVector<F> {
    debug_assert_eq!(scores.len(), weights.len());
    let p = scores[0].len();
    let mut raw = vec![F::zero(); p];
    for (vote, &w) in scores.iter().zip(weights) {
        for k in 0..p {
            raw[k] += w * vote[k];
        }
    }
    let mut lo = raw[0];
    let mut hi = raw[0];
    for &v in &raw[1..] {
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    if lo < F::zero() {
        if hi == lo {
            return ScoreVector::uniform(p);
        }
        let span = hi - lo;
        for v in raw.iter_mut() {
            *v = (*v - lo) / span;
        }
    }
    ScoreVector::normalized(&raw, p).unwrap_or_else(|_| ScoreVector::uniform(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::TreeParams;
    use crate::oracle;

    fn sv(raw: &[f64]) -> ScoreVector<f64> {
        ScoreVector::normalized(raw, raw.len()).unwrap()
    }

    #[test]
    fn aggregate_identity_for_single_unit_weight() {
        let s = sv(&[0.25, 0.75]);
        let out = aggregate_votes(&[&s], &[1.0]);
        assert_eq!(out.scores(), s.scores());
    }

    #[test]
    fn aggregate_uniform_components_stay_uniform() {
        let u = ScoreVector::<f64>::uniform(3);
        let out = aggregate_votes(&[&u, &u], &[0.4, 0.6]);
        for &v in out.scores() {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn aggregate_negative_weights_rescale_pipeline() {
        let s1 = sv(&[0.8, 0.2]);
        let s2 = sv(&[0.3, 0.7]);
        let out = aggregate_votes(&[&s1, &s2], &[1.88, -0.87]);
        // raw = <1.243, -0.233>; min-max then normalisation gives <1, 0>.
        assert!((out[0] - 1.0).abs() < 1e-12);
        assert!(out[1].abs() < 1e-12);
        assert_eq!(out.argmax(), 0);
    }

    #[test]
    fn aggregate_argmax_is_scale_invariant() {
        let s1 = sv(&[0.8, 0.1, 0.1]);
        let s2 = sv(&[0.2, 0.5, 0.3]);
        let s3 = sv(&[0.1, 0.2, 0.7]);
        let w = [1.3, -0.4, 0.2];
        let base = aggregate_votes(&[&s1, &s2, &s3], &w).argmax();
        for c in [0.1, 0.5, 2.0, 10.0, 1e3] {
            let scaled: Vec<f64> = w.iter().map(|x| x * c).collect();
            assert_eq!(aggregate_votes(&[&s1, &s2, &s3], &scaled).argmax(), base);
        }
    }

    #[test]
    fn aggregate_all_equal_negative_goes_uniform() {
        let s = ScoreVector::<f64>::uniform(2);
        let out = aggregate_votes(&[&s], &[-1.0]);
        assert_eq!(out.scores(), &[0.5, 0.5]);
    }

    #[test]
    fn min_abs_index_breaks_ties_low() {
        assert_eq!(min_abs_index(&[0.5f64, -0.5, 0.2]), 2);
        assert_eq!(min_abs_index(&[0.3f64, -0.3]), 0);
        assert_eq!(min_abs_index(&[-0.7f64]), 0);
    }

    fn small_config(m: usize, h: usize, n: usize) -> GooweConfig {
        GooweConfig {
            max_components: m,
            chunk_size: h,
            window_size: n,
            learner: LearnerSpec::HoeffdingTree(TreeParams::default()),
            ..GooweConfig::default()
        }
    }

    fn stream_instance(i: usize, p: usize) -> Instance<f64> {
        let label = i % p;
        let x = label as f64 * 2.0 + ((i * 7 + 1) % 13) as f64 * 0.05;
        let y = -(label as f64) + ((i * 5 + 2) % 11) as f64 * 0.04;
        Instance::from_numeric(&[x, y], label)
    }

    #[test]
    fn cold_start_predicts_uniform_without_crashing() {
        let schema = Arc::new(StreamSchema::numeric(2, 4).unwrap());
        let mut ens = GooweEnsemble::new(schema, small_config(3, 50, 50)).unwrap();
        let pred = ens.process(&stream_instance(0, 4)).unwrap();
        assert_eq!(pred.scores.scores(), &[0.25; 4]);
        assert_eq!(pred.label, 0);
    }

    #[test]
    fn chunk_boundary_grows_the_ensemble() {
        let schema = Arc::new(StreamSchema::numeric(2, 2).unwrap());
        let mut ens = GooweEnsemble::new(schema, small_config(3, 50, 50)).unwrap();
        for i in 0..49 {
            ens.process(&stream_instance(i, 2)).unwrap();
        }
        assert_eq!(ens.component_count(), 0);
        ens.process(&stream_instance(49, 2)).unwrap();
        assert_eq!(ens.component_count(), 1);
        for i in 50..100 {
            ens.process(&stream_instance(i, 2)).unwrap();
        }
        assert_eq!(ens.component_count(), 2);
    }

    #[test]
    fn replacement_keeps_count_and_system_dimension() {
        let schema = Arc::new(StreamSchema::numeric(2, 2).unwrap());
        let mut ens = GooweEnsemble::new(schema, small_config(2, 40, 60)).unwrap();
        for i in 0..40 * 5 {
            ens.process(&stream_instance(i, 2)).unwrap();
        }
        assert_eq!(ens.component_count(), 2);
        assert_eq!(ens.system().component_count(), 2);
        let event = ens.last_replacement().expect("replacements happened");
        assert_eq!(event.chunk_weights.len(), 2);
        // The victim must attain the minimum |w'| over the recorded system,
        // re-derived with the reference solver.
        let direct = event.chunk_system.solve().unwrap();
        assert_eq!(min_abs_index(&direct.weights), event.removed_index);
    }

    #[test]
    fn orthogonal_component_is_dropped_first() {
        // Components: one votes pure class 2 (never the stream's truth),
        // one tracks the actual labels. The stale component's weight
        // magnitude is the smallest, so it is replaced.
        let schema = Arc::new(StreamSchema::numeric(2, 3).unwrap());
        let cfg = GooweConfig {
            max_components: 2,
            chunk_size: 30,
            window_size: 30,
            learner: LearnerSpec::NaiveBayes,
            ..GooweConfig::default()
        };
        let mut ens = GooweEnsemble::new(schema, cfg).unwrap();
        // Chunk 1: all label 2 -> component 0 votes class 2 forever.
        for i in 0..30 {
            let x = 50.0 + (i % 3) as f64;
            ens.process(&Instance::from_numeric(&[x, x], 2)).unwrap();
        }
        // Chunks 2 and 3: labels 0/1 only.
        for i in 0..60 {
            ens.process(&stream_instance(i, 2)).unwrap();
        }
        let event = ens.last_replacement().expect("a replacement");
        assert_eq!(event.removed_id, 0, "stale class-2 component must go first");
        // Cross-check victim choice against the independent minimiser on the
        // recorded chunk system.
        let m = event.chunk_weights.len();
        let a = event.chunk_system.a();
        let eig = oracle::symmetric_eigenvalues(a, m);
        assert!(eig[0] > -1e-8, "chunk system stays PSD");
    }

    #[test]
    fn deterministic_trace_for_fixed_input() {
        let schema = Arc::new(StreamSchema::numeric(2, 3).unwrap());
        let run = || {
            let mut ens = GooweEnsemble::new(schema.clone(), small_config(3, 40, 40)).unwrap();
            (0..300)
                .map(|i| ens.process(&stream_instance(i, 3)).unwrap().label)
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn perfect_component_dominates_aggregation() {
        // One perfect vote (the one-hot truth) among uniform noise votes:
        // the solved weights must reproduce the truth on window instances.
        let p = 3;
        let m = 4;
        let mut sys = WeightSystem::zeros(m);
        let labels = [0usize, 1, 2, 1, 0, 2, 2, 0, 1, 1];
        let uniform = ScoreVector::<f64>::uniform(p);
        for &label in &labels {
            let perfect = ScoreVector::one_hot(label, p);
            let votes: Vec<&ScoreVector<f64>> = vec![&uniform, &perfect, &uniform, &uniform];
            sys.add_instance(&votes, &IdealPoint::new(label, p).unwrap())
                .unwrap();
        }
        let w = sys.solve().unwrap().weights;
        for &label in &labels {
            let perfect = ScoreVector::one_hot(label, p);
            let votes: Vec<&ScoreVector<f64>> = vec![&uniform, &perfect, &uniform, &uniform];
            let agg = aggregate_votes(&votes, &w);
            assert_eq!(agg.argmax(), label);
        }
    }

    #[test]
    fn incremental_system_matches_recompute_under_churn() {
        let schema = Arc::new(StreamSchema::numeric(2, 3).unwrap());
        let mut ens = GooweEnsemble::new(schema, small_config(3, 30, 45)).unwrap();
        for i in 0..400 {
            ens.process(&stream_instance(i, 3)).unwrap();
            if i % 97 == 0 {
                // weights solve also refreshes caches on demand
                let _ = ens.predict(&stream_instance(i + 1, 3).features).unwrap();
            }
        }
        let fresh = ens.recompute_system().unwrap();
        let live = ens.system();
        assert_eq!(fresh.component_count(), live.component_count());
        for (a, b) in live.a().iter().zip(fresh.a()) {
            assert!((a - b).abs() < 1e-8, "A entry drifted: {a} vs {b}");
        }
        for (a, b) in live.d().iter().zip(fresh.d()) {
            assert!((a - b).abs() < 1e-8, "d entry drifted: {a} vs {b}");
        }
    }

    #[test]
    fn prune_fires_under_tight_memory_limit() {
        let schema = Arc::new(StreamSchema::numeric(2, 2).unwrap());
        let cfg = GooweConfig {
            max_components: 2,
            chunk_size: 50,
            window_size: 50,
            memory_limit_bytes: 1,
            learner: LearnerSpec::HoeffdingTree(TreeParams::default()),
        };
        let mut ens = GooweEnsemble::new(schema, cfg).unwrap();
        for i in 0..120 {
            ens.process(&stream_instance(i, 2)).unwrap();
        }
        assert!(ens.prune_events() > 0);
        assert_eq!(ens.component_count(), 2, "pruning never drops components");
    }

    #[test]
    fn rejects_degenerate_config() {
        let schema = Arc::new(StreamSchema::numeric(1, 2).unwrap());
        let bad = GooweConfig {
            max_components: 0,
            ..GooweConfig::default()
        };
        assert!(GooweEnsemble::<f64>::new(schema, bad).is_err());
    }
}
