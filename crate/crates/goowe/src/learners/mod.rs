//! Incremental base learners.

mod bayes;
mod tree;

pub use bayes::{AttributeStats, GaussianStat, NaiveBayesModel, VARIANCE_FLOOR};
pub use tree::{HoeffdingTree, TreeParams};

/// Which base learner an ensemble builds its components from.
#[derive(Debug, Clone, PartialEq)]
pub enum LearnerSpec {
    NaiveBayes,
    HoeffdingTree(TreeParams),
}

impl LearnerSpec {
    pub fn build<F: crate::Float>(
        &self,
        schema: &std::sync::Arc<crate::StreamSchema>,
    ) -> Box<dyn crate::IncrementalClassifier<F>> {
        match self {
            LearnerSpec::NaiveBayes => Box::new(NaiveBayesModel::new(schema.clone())),
            LearnerSpec::HoeffdingTree(params) => {
                Box::new(HoeffdingTree::new(schema.clone(), params.clone()))
            }
        }
    }
}

impl Default for LearnerSpec {
    fn default() -> Self {
        LearnerSpec::HoeffdingTree(TreeParams::default())
    }
}
