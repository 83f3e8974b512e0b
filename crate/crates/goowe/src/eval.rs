//! Interleaved test-then-train evaluation.
//!
//! Every instance is predicted on first and only then handed over for
//! training; accuracy accumulates over all predictions. Traces record
//! per-interval accuracy, processing time (centiseconds per thousand
//! instances) and the deterministic model-size estimate (megabytes) —
//! model size rather than process memory, so runs are reproducible.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines::{BlockConfig, BlockEnsemble, ReplacementRule, VoteRule};
use crate::classifier::IncrementalClassifier;
use crate::ensemble::{GooweEnsemble, Prediction};
use crate::error::{Error, Result};
use crate::float::Float;
use crate::instance::{Instance, StreamSchema};
use crate::score::ScoreVector;
use crate::streams::StreamSource;

/// Anything the prequential loop can drive: one test-then-train step per
/// instance plus a deterministic memory estimate.
pub trait StreamClassifier<F: Float>: Send {
    fn schema(&self) -> &Arc<StreamSchema>;
    fn process(&mut self, inst: &Instance<F>) -> Result<Prediction<F>>;
    fn memory_estimate(&self) -> usize;
}

impl<F: Float> StreamClassifier<F> for GooweEnsemble<F> {
    fn schema(&self) -> &Arc<StreamSchema> {
        GooweEnsemble::schema(self)
    }

    fn process(&mut self, inst: &Instance<F>) -> Result<Prediction<F>> {
        GooweEnsemble::process(self, inst)
    }

    fn memory_estimate(&self) -> usize {
        GooweEnsemble::memory_estimate(self)
    }
}

impl<F: Float> StreamClassifier<F> for BlockEnsemble<F> {
    fn schema(&self) -> &Arc<StreamSchema> {
        BlockEnsemble::schema(self)
    }

    fn process(&mut self, inst: &Instance<F>) -> Result<Prediction<F>> {
        BlockEnsemble::process(self, inst)
    }

    fn memory_estimate(&self) -> usize {
        BlockEnsemble::memory_estimate(self)
    }
}

/// Adapter that runs a bare incremental learner through the loop.
pub struct SingleClassifier<F: Float> {
    schema: Arc<StreamSchema>,
    learner: Box<dyn IncrementalClassifier<F>>,
}

impl<F: Float> SingleClassifier<F> {
    pub fn new(schema: Arc<StreamSchema>, learner: Box<dyn IncrementalClassifier<F>>) -> Self {
        SingleClassifier { schema, learner }
    }
}

impl<F: Float> StreamClassifier<F> for SingleClassifier<F> {
    fn schema(&self) -> &Arc<StreamSchema> {
        &self.schema
    }

    fn process(&mut self, inst: &Instance<F>) -> Result<Prediction<F>> {
        let p = self.schema.class_count();
        let scores = ScoreVector::normalized(&self.learner.raw_scores(&inst.features), p)?;
        let label = scores.argmax();
        self.learner.train(inst)?;
        Ok(Prediction { scores, label })
    }

    fn memory_estimate(&self) -> usize {
        self.learner.memory_estimate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    /// Trace record every this many instances.
    pub report_interval: usize,
    /// Stop after this many instances (`None` = run the stream out).
    pub max_instances: Option<u64>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            report_interval: 500,
            max_instances: None,
        }
    }
}

/// One trace row per report interval.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRecord {
    pub chunk: usize,
    pub instances: u64,
    /// Accuracy over this interval, in percent.
    pub accuracy_pct: f64,
    /// Accuracy over everything seen so far, in percent.
    pub cumulative_accuracy_pct: f64,
    /// Wall time for this interval, centiseconds per 1000 instances.
    pub time_cs_per_1k: f64,
    /// Model-size estimate at the end of the interval, megabytes.
    pub memory_mb: f64,
}

/// Full prequential run record for one (ensemble, stream, seed) triple.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunTrace {
    pub ensemble: String,
    pub stream: String,
    pub seed: u64,
    pub instances: u64,
    pub correct: u64,
    pub aggregate_accuracy_pct: f64,
    pub max_memory_mb: f64,
    pub wall_time_s: f64,
    pub records: Vec<TraceRecord>,
}

impl RunTrace {
    /// Write the per-interval records as CSV (header + one row each).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for record in &self.records {
            w.serialize(record)
                .map_err(|e| Error::Internal(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Drive `classifier` over `stream` with the interleaved test-then-train
/// protocol.
pub fn test_then_train<F: Float>(
    classifier: &mut dyn StreamClassifier<F>,
    stream: &mut dyn StreamSource<F>,
    opts: &EvalOptions,
    ensemble_name: &str,
    stream_name: &str,
    seed: u64,
) -> Result<RunTrace> {
    if classifier.schema() != stream.schema() {
        return Err(Error::Schema(
            "classifier and stream schemas do not match".into(),
        ));
    }
    if opts.report_interval == 0 {
        return Err(Error::Config("report interval must be positive".into()));
    }

    let started = Instant::now();
    let mut interval_started = Instant::now();
    let mut records = Vec::new();
    let mut instances: u64 = 0;
    let mut correct: u64 = 0;
    let mut interval_instances: u64 = 0;
    let mut interval_correct: u64 = 0;
    let mut max_memory_mb: f64 = 0.0;

    loop {
        if let Some(cap) = opts.max_instances {
            if instances >= cap {
                break;
            }
        }
        let Some(inst) = stream.next_instance()? else {
            break;
        };
        let prediction = classifier.process(&inst)?;
        instances += 1;
        interval_instances += 1;
        if prediction.label == inst.label {
            correct += 1;
            interval_correct += 1;
        }
        if interval_instances == opts.report_interval as u64 {
            push_record(
                &mut records,
                classifier,
                instances,
                correct,
                interval_instances,
                interval_correct,
                &mut interval_started,
                &mut max_memory_mb,
            );
            interval_instances = 0;
            interval_correct = 0;
        }
    }
    if instances == 0 {
        return Err(Error::Empty("stream produced no instances".into()));
    }
    if interval_instances > 0 {
        push_record(
            &mut records,
            classifier,
            instances,
            correct,
            interval_instances,
            interval_correct,
            &mut interval_started,
            &mut max_memory_mb,
        );
    }

    Ok(RunTrace {
        ensemble: ensemble_name.to_string(),
        stream: stream_name.to_string(),
        seed,
        instances,
        correct,
        aggregate_accuracy_pct: 100.0 * correct as f64 / instances as f64,
        max_memory_mb,
        wall_time_s: started.elapsed().as_secs_f64(),
        records,
    })
}

#[allow(clippy::too_many_arguments)]
fn push_record<F: Float>(
    records: &mut Vec<TraceRecord>,
    classifier: &dyn StreamClassifier<F>,
    instances: u64,
    correct: u64,
    interval_instances: u64,
    interval_correct: u64,
    interval_started: &mut Instant,
    max_memory_mb: &mut f64,
) {
    let elapsed = interval_started.elapsed().as_secs_f64();
    *interval_started = Instant::now();
    let memory_mb = classifier.memory_estimate() as f64 / (1024.0 * 1024.0);
    if memory_mb > *max_memory_mb {
        *max_memory_mb = memory_mb;
    }
    records.push(TraceRecord {
        chunk: records.len() + 1,
        instances,
        accuracy_pct: 100.0 * interval_correct as f64 / interval_instances as f64,
        cumulative_accuracy_pct: 100.0 * correct as f64 / instances as f64,
        time_cs_per_1k: elapsed * 100.0 / interval_instances as f64 * 1000.0,
        memory_mb,
    });
}

/// Run the vote-aggregation scaffold over a stream.
pub fn run_base1<F: Float>(
    vote: VoteRule,
    cfg: BlockConfig,
    stream: &mut dyn StreamSource<F>,
    opts: &EvalOptions,
    name: &str,
    stream_name: &str,
    seed: u64,
) -> Result<RunTrace> {
    let mut ens = BlockEnsemble::base1(vote, stream.schema().clone(), cfg)?;
    test_then_train(&mut ens, stream, opts, name, stream_name, seed)
}

/// Run the model-management scaffold (majority vote) over a stream.
pub fn run_base2<F: Float>(
    replacement: ReplacementRule,
    cfg: BlockConfig,
    stream: &mut dyn StreamSource<F>,
    opts: &EvalOptions,
    name: &str,
    stream_name: &str,
    seed: u64,
) -> Result<RunTrace> {
    let mut ens = BlockEnsemble::base2(replacement, stream.schema().clone(), cfg)?;
    test_then_train(&mut ens, stream, opts, name, stream_name, seed)
}
