//! Streaming ensemble classification for evolving data streams.
//!
//! The centre of the crate is [`GooweEnsemble`](ensemble::GooweEnsemble), an
//! online ensemble that assigns component weights by solving a small linear
//! least-squares system over a sliding window of recent labelled instances.
//! Around it sit:
//!
//! * incremental base learners (naive Bayes, Hoeffding tree with adaptive
//!   naive Bayes leaves) in [`learners`],
//! * alternative weighting rules (majority vote, DWM, AWE, AUE2) and the
//!   ablation scaffold that isolates vote aggregation from model management
//!   in [`baselines`],
//! * seeded synthetic stream generators covering sudden, incremental,
//!   gradual and reoccurring drift, plus ARFF/CSV readers, in [`streams`],
//! * a prequential (interleaved test-then-train) evaluation loop and the
//!   Friedman / Wilcoxon comparison statistics in [`eval`] and [`stats`].
//!
//! Core numeric code is generic over the scalar type via the [`Float`]
//! trait; `f64` instantiations of the main entry points are aliased below.

pub mod baselines;
pub mod classifier;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod float;
pub mod instance;
pub mod learners;
pub mod oracle;
pub mod score;
pub mod solver;
pub mod stats;
pub mod streams;
pub mod window;

pub use classifier::IncrementalClassifier;
pub use error::{Error, Result};
pub use float::Float;
pub use instance::{Attribute, AttributeKind, FeatureValue, Instance, StreamSchema};
pub use score::{IdealPoint, ScoreVector};
pub use window::{DataChunk, InstanceWindow};

/// Double-precision instantiations of the main entry points.
pub type Goowe64 = ensemble::GooweEnsemble<f64>;
pub type BlockEnsemble64 = baselines::BlockEnsemble<f64>;
pub type HoeffdingTree64 = learners::HoeffdingTree<f64>;
pub type NaiveBayes64 = learners::NaiveBayesModel<f64>;
pub type Instance64 = instance::Instance<f64>;
pub type ScoreVector64 = score::ScoreVector<f64>;
