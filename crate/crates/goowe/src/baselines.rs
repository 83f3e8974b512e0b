//! Baseline weighting rules and the ablation scaffold.
//!
//! The scaffold is one block-based ensemble skeleton (chunked candidate,
//! incremental updates of survivors) with two pluggable decisions: how
//! votes are aggregated and how the component to drop is chosen. `base1`
//! varies only vote aggregation; `base2` varies only the add/drop decision
//! and always aggregates by majority vote, so each analysis isolates a
//! single mechanism.

use std::sync::Arc;

use crate::classifier::IncrementalClassifier;
use crate::ensemble::{aggregate_votes, min_abs_index, Component, Prediction};
use crate::error::{Error, Result};
use crate::float::Float;
use crate::instance::{FeatureValue, Instance, StreamSchema};
use crate::learners::LearnerSpec;
use crate::score::{IdealPoint, ScoreVector};
use crate::solver::{WeightSystem, WindowAccumulator};
use crate::window::{CachedInstance, DataChunk};

/// Default epsilon in the nonlinear chunk-error weighting.
pub const AUE2_EPSILON: f64 = 1e-9;

/// Unweighted vote: all ones.
pub fn mv_weights<F: Float>(m: usize) -> Result<Vec<F>> {
    if m == 0 {
        return Err(Error::NoComponents);
    }
    Ok(vec![F::one(); m])
}

/// Multiplicative-punishment update: every wrong component's weight is
/// scaled by `beta`, weights are renormalised so the maximum is one, and
/// indices whose weight fell below `theta` are returned for pruning.
pub fn dwm_update<F: Float>(
    weights: &mut [F],
    component_correct: &[bool],
    beta: f64,
    theta: f64,
) -> Result<Vec<usize>> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Config(format!("beta must be in [0, 1], got {beta}")));
    }
    if weights.len() != component_correct.len() {
        return Err(Error::Internal(
            "weights/correctness length mismatch".into(),
        ));
    }
    let beta = F::of(beta);
    for (w, &ok) in weights.iter_mut().zip(component_correct) {
        if !ok {
            *w *= beta;
        }
    }
    let max = weights.iter().copied().fold(F::zero(), F::max);
    if max > F::zero() {
        for w in weights.iter_mut() {
            *w /= max;
        }
    }
    let theta = F::of(theta);
    Ok(weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w < theta)
        .map(|(i, _)| i)
        .collect())
}

/// Mean squared error of a component's true-class probability over a chunk.
pub fn mse_i<F: Float>(
    component: &dyn IncrementalClassifier<F>,
    chunk: &[Instance<F>],
    p: usize,
) -> Result<F> {
    if chunk.is_empty() {
        return Err(Error::Empty("chunk".into()));
    }
    let mut total = F::zero();
    for inst in chunk {
        let vote = ScoreVector::normalized(&component.raw_scores(&inst.features), p)?;
        let miss = F::one() - vote[inst.label];
        total += miss * miss;
    }
    Ok(total / F::of(chunk.len() as f64))
}

/// Reference error of a random classifier under the chunk's empirical
/// class distribution.
pub fn mse_r<F: Float>(chunk: &[Instance<F>], p: usize) -> Result<F> {
    if chunk.is_empty() {
        return Err(Error::Empty("chunk".into()));
    }
    let mut counts = vec![F::zero(); p];
    for inst in chunk {
        counts[inst.label] += F::one();
    }
    let n = F::of(chunk.len() as f64);
    let mut total = F::zero();
    for c in counts {
        let prob = c / n;
        let miss = F::one() - prob;
        total += prob * miss * miss;
    }
    Ok(total)
}

/// Linear chunk-error weights `max(0, mse_r - mse_i)`; a component no
/// better than random gets weight zero and drops out of the vote.
pub fn awe_weights<F: Float>(
    components: &[&dyn IncrementalClassifier<F>],
    chunk: &[Instance<F>],
    p: usize,
) -> Result<Vec<F>> {
    let reference = mse_r(chunk, p)?;
    components
        .iter()
        .map(|c| {
            let err = mse_i(*c, chunk, p)?;
            Ok((reference - err).max(F::zero()))
        })
        .collect()
}

/// Nonlinear chunk-error weights `1 / (mse_r + mse_i + epsilon)`.
pub fn aue2_weights<F: Float>(
    components: &[&dyn IncrementalClassifier<F>],
    chunk: &[Instance<F>],
    p: usize,
    epsilon: f64,
) -> Result<Vec<F>> {
    if epsilon <= 0.0 {
        return Err(Error::Config("epsilon must be positive".into()));
    }
    let reference = mse_r(chunk, p)?;
    components
        .iter()
        .map(|c| {
            let err = mse_i(*c, chunk, p)?;
            Ok(F::one() / (reference + err + F::of(epsilon)))
        })
        .collect()
}

/// Vote aggregation rule for the scaffold.
#[derive(Debug, Clone, PartialEq)]
pub enum VoteRule {
    MajorityVote,
    Dwm {
        beta: f64,
        theta: f64,
    },
    Awe,
    Aue2,
    /// Least-squares weights; solved over the instance window by default,
    /// or over the last chunk when `solve_on_chunk` is set.
    Goowe {
        solve_on_chunk: bool,
    },
}

impl VoteRule {
    fn uses_dwm(&self) -> bool {
        matches!(self, VoteRule::Dwm { .. })
    }

    fn uses_window(&self) -> bool {
        matches!(
            self,
            VoteRule::Goowe {
                solve_on_chunk: false
            }
        )
    }
}

/// Add/drop decision rule for the scaffold.
#[derive(Debug, Clone, PartialEq)]
pub enum ReplacementRule {
    /// Drop the component with the worst chunk error (the shared block
    /// ensemble default).
    WorstMse,
    /// Drop the lowest DWM weight.
    Dwm { beta: f64, theta: f64 },
    /// Drop the lowest linear chunk-error weight.
    Awe,
    /// Drop the lowest nonlinear chunk-error weight.
    Aue2,
    /// Drop the smallest `|w'|` on a chunk-built least-squares system.
    Goowe,
}

impl ReplacementRule {
    fn uses_dwm(&self) -> bool {
        matches!(self, ReplacementRule::Dwm { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockConfig {
    pub max_components: usize,
    pub chunk_size: usize,
    /// Window length for the least-squares vote rule.
    pub window_size: usize,
    pub learner: LearnerSpec,
}

impl Default for BlockConfig {
    fn default() -> Self {
        BlockConfig {
            max_components: 10,
            chunk_size: 500,
            window_size: 500,
            learner: LearnerSpec::default(),
        }
    }
}

/// Block-based ensemble skeleton with pluggable vote and replacement rules.
pub struct BlockEnsemble<F: Float> {
    schema: Arc<StreamSchema>,
    cfg: BlockConfig,
    vote: VoteRule,
    replacement: ReplacementRule,
    components: Vec<Component<F>>,
    next_id: u64,
    chunk: DataChunk<F>,
    dwm_weights: Vec<F>,
    chunk_weights: Vec<F>,
    window: Option<WindowAccumulator<F>>,
}

impl<F: Float> BlockEnsemble<F> {
    /// Scaffold that varies only vote aggregation (replacement fixed to the
    /// shared worst-chunk-error default).
    pub fn base1(vote: VoteRule, schema: Arc<StreamSchema>, cfg: BlockConfig) -> Result<Self> {
        Self::new(vote, ReplacementRule::WorstMse, schema, cfg)
    }

    /// Scaffold that varies only the add/drop decision; votes by majority
    /// to disadvantage all variants equally.
    pub fn base2(
        replacement: ReplacementRule,
        schema: Arc<StreamSchema>,
        cfg: BlockConfig,
    ) -> Result<Self> {
        Self::new(VoteRule::MajorityVote, replacement, schema, cfg)
    }

    pub fn new(
        vote: VoteRule,
        replacement: ReplacementRule,
        schema: Arc<StreamSchema>,
        cfg: BlockConfig,
    ) -> Result<Self> {
        if cfg.max_components == 0 || cfg.chunk_size == 0 || cfg.window_size == 0 {
            return Err(Error::Config("ensemble sizes must be positive".into()));
        }
        let window = vote
            .uses_window()
            .then(|| WindowAccumulator::new(cfg.window_size.max(cfg.chunk_size)));
        Ok(BlockEnsemble {
            chunk: DataChunk::new(cfg.chunk_size),
            window,
            schema,
            cfg,
            vote,
            replacement,
            components: Vec::new(),
            next_id: 0,
            dwm_weights: Vec::new(),
            chunk_weights: Vec::new(),
        })
    }

    pub fn schema(&self) -> &Arc<StreamSchema> {
        &self.schema
    }

    pub fn vote_rule(&self) -> &VoteRule {
        &self.vote
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn component_ids(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.id).collect()
    }

    pub fn memory_estimate(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.learner.memory_estimate())
            .sum()
    }

    /// Per-component normalised votes for `features`, in ensemble order.
    /// Read-only; used by the isolation checks as well as prediction.
    pub fn component_votes(&self, features: &[FeatureValue<F>]) -> Result<Vec<ScoreVector<F>>> {
        let p = self.schema.class_count();
        self.components
            .iter()
            .map(|c| ScoreVector::normalized(&c.learner.raw_scores(features), p))
            .collect()
    }

    fn current_weights(&mut self, m: usize) -> Result<Vec<F>> {
        match &self.vote {
            VoteRule::MajorityVote => mv_weights(m),
            VoteRule::Dwm { .. } => Ok(self.dwm_weights.clone()),
            VoteRule::Awe
            | VoteRule::Aue2
            | VoteRule::Goowe {
                solve_on_chunk: true,
            } => Ok(self.chunk_weights.clone()),
            VoteRule::Goowe {
                solve_on_chunk: false,
            } => {
                let p = self.schema.class_count();
                let ids: Vec<u64> = self.components.iter().map(|c| c.id).collect();
                let components = &self.components;
                let acc = self
                    .window
                    .as_mut()
                    .expect("window mode has an accumulator");
                acc.ensure(&ids, p, |id, instance| {
                    let comp = components
                        .iter()
                        .find(|c| c.id == id)
                        .ok_or_else(|| Error::Internal(format!("unknown component {id}")))?;
                    ScoreVector::normalized(&comp.learner.raw_scores(&instance.features), p)
                })?;
                if acc.window().is_empty() {
                    return mv_weights(m);
                }
                Ok(acc.system().solve()?.weights)
            }
        }
    }

    /// One interleaved test-then-train step.
    pub fn process(&mut self, inst: &Instance<F>) -> Result<Prediction<F>> {
        self.schema.validate(inst)?;
        let p = self.schema.class_count();

        let votes = self.component_votes(&inst.features)?;
        let prediction = if self.components.is_empty() {
            Prediction::uniform(p)
        } else {
            let weights = self.current_weights(votes.len())?;
            let refs: Vec<&ScoreVector<F>> = votes.iter().collect();
            let scores = aggregate_votes(&refs, &weights);
            let label = scores.argmax();
            Prediction { scores, label }
        };

        // Per-instance bookkeeping after the prediction is committed.
        if (self.vote.uses_dwm() || self.replacement.uses_dwm()) && !self.components.is_empty() {
            let (beta, theta) = self.dwm_params();
            let correct: Vec<bool> = votes.iter().map(|v| v.argmax() == inst.label).collect();
            // The scaffold never prunes by threshold: add/drop stays the
            // replacement rule's exclusive property.
            let _ = dwm_update(&mut self.dwm_weights, &correct, beta, theta)?;
        }
        if let Some(acc) = self.window.as_mut() {
            let ids: Vec<u64> = self.components.iter().map(|c| c.id).collect();
            let slot = CachedInstance::new(inst.clone(), ids.iter().copied().zip(votes).collect());
            acc.push(slot, &ids, p)?;
        }

        if let Some(chunk) = self.chunk.push(inst.clone()) {
            self.train_on_chunk(&chunk)?;
        }
        Ok(prediction)
    }

    fn dwm_params(&self) -> (f64, f64) {
        match (&self.vote, &self.replacement) {
            (VoteRule::Dwm { beta, theta }, _) => (*beta, *theta),
            (_, ReplacementRule::Dwm { beta, theta }) => (*beta, *theta),
            _ => (0.5, 0.01),
        }
    }

    fn component_refs(&self) -> Vec<&dyn IncrementalClassifier<F>> {
        self.components.iter().map(|c| c.learner.as_ref()).collect()
    }

    fn chunk_goowe_weights(&self, chunk: &[Instance<F>]) -> Result<Vec<F>> {
        let p = self.schema.class_count();
        let mut sys = WeightSystem::zeros(self.components.len());
        for inst in chunk {
            let votes = self.component_votes(&inst.features)?;
            let refs: Vec<&ScoreVector<F>> = votes.iter().collect();
            sys.add_instance(&refs, &IdealPoint::new(inst.label, p)?)?;
        }
        Ok(sys.solve()?.weights)
    }

    fn train_on_chunk(&mut self, chunk: &[Instance<F>]) -> Result<()> {
        let p = self.schema.class_count();
        let mut candidate = self.cfg.learner.build::<F>(&self.schema);
        for inst in chunk {
            candidate.train(inst)?;
        }

        if self.components.len() == self.cfg.max_components {
            let victim = match &self.replacement {
                ReplacementRule::WorstMse => {
                    let refs = self.component_refs();
                    let errors: Vec<F> = refs
                        .iter()
                        .map(|c| mse_i(*c, chunk, p))
                        .collect::<Result<_>>()?;
                    max_index(&errors)
                }
                ReplacementRule::Awe => {
                    let refs = self.component_refs();
                    min_index(&awe_weights(&refs, chunk, p)?)
                }
                ReplacementRule::Aue2 => {
                    let refs = self.component_refs();
                    min_index(&aue2_weights(&refs, chunk, p, AUE2_EPSILON)?)
                }
                ReplacementRule::Dwm { .. } => min_index(&self.dwm_weights),
                ReplacementRule::Goowe => min_abs_index(&self.chunk_goowe_weights(chunk)?),
            };
            self.components.remove(victim);
            if !self.dwm_weights.is_empty() {
                self.dwm_weights.remove(victim);
            }
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
        self.dwm_weights.resize(self.components.len(), F::one());

        // Refresh chunk-based vote weights against the chunk that just
        // closed. The fresh candidate is evaluated on its own training
        // chunk, the usual optimistic special case for block ensembles.
        match &self.vote {
            VoteRule::Awe => {
                let refs = self.component_refs();
                self.chunk_weights = awe_weights(&refs, chunk, p)?;
            }
            VoteRule::Aue2 => {
                let refs = self.component_refs();
                self.chunk_weights = aue2_weights(&refs, chunk, p, AUE2_EPSILON)?;
            }
            VoteRule::Goowe {
                solve_on_chunk: true,
            } => {
                self.chunk_weights = self.chunk_goowe_weights(chunk)?;
            }
            _ => {}
        }
        if let Some(acc) = self.window.as_mut() {
            let live: Vec<u64> = self.components.iter().map(|c| c.id).collect();
            acc.mark_components_changed(&live);
        }
        Ok(())
    }
}

/// Smallest-value index, ties to the lowest index.
fn min_index<F: Float>(values: &[F]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// Largest-value index, ties to the lowest index.
fn max_index<F: Float>(values: &[F]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
