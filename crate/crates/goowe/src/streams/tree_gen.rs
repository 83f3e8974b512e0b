//! Random tree generator with reoccurring concept drift.
//!
//! Labels come from routing uniform random features through a randomly
//! constructed decision tree. Drift swaps abruptly between two such trees
//! on a fixed schedule, so earlier concepts reoccur.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::float::Float;
use crate::instance::{Attribute, FeatureValue, Instance, StreamSchema};
use crate::streams::{child_seed, StreamSource};

#[derive(Debug, Clone, PartialEq)]
pub struct RandomTreeConfig {
    pub classes: usize,
    pub nominal_attributes: usize,
    pub numeric_attributes: usize,
    /// Cardinality of every nominal attribute.
    pub nominal_values: usize,
    pub max_depth: usize,
    /// Swap between the two concept trees every this many instances.
    pub reswap_every: Option<u64>,
}

impl Default for RandomTreeConfig {
    fn default() -> Self {
        RandomTreeConfig {
            classes: 4,
            nominal_attributes: 5,
            numeric_attributes: 5,
            nominal_values: 5,
            max_depth: 5,
            reswap_every: None,
        }
    }
}

#[derive(Debug, Clone)]
enum ConceptNode {
    Leaf(usize),
    NominalSplit {
        attr: usize,
        children: Vec<usize>,
    },
    NumericSplit {
        attr: usize,
        threshold: f64,
        children: [usize; 2],
    },
}

#[derive(Debug, Clone)]
struct ConceptTree {
    nodes: Vec<ConceptNode>,
}

impl ConceptTree {
    fn build(cfg: &RandomTreeConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tree = ConceptTree { nodes: Vec::new() };
        let nominals: Vec<usize> = (0..cfg.nominal_attributes).collect();
        tree.grow(cfg, &mut rng, 0, &nominals);
        tree
    }

    fn grow(
        &mut self,
        cfg: &RandomTreeConfig,
        rng: &mut ChaCha8Rng,
        depth: usize,
        nominals_left: &[usize],
    ) -> usize {
        let can_split =
            depth < cfg.max_depth && (!nominals_left.is_empty() || cfg.numeric_attributes > 0);
        if !can_split {
            let idx = self.nodes.len();
            self.nodes
                .push(ConceptNode::Leaf(rng.gen_range(0..cfg.classes)));
            return idx;
        }
        let choices = nominals_left.len() + cfg.numeric_attributes;
        let choice = rng.gen_range(0..choices);
        let idx = self.nodes.len();
        if choice < nominals_left.len() {
            let attr = nominals_left[choice];
            self.nodes.push(ConceptNode::Leaf(0)); // placeholder
            let remaining: Vec<usize> = nominals_left
                .iter()
                .copied()
                .filter(|&a| a != attr)
                .collect();
            let children: Vec<usize> = (0..cfg.nominal_values)
                .map(|_| self.grow(cfg, rng, depth + 1, &remaining))
                .collect();
            self.nodes[idx] = ConceptNode::NominalSplit { attr, children };
        } else {
            let attr = cfg.nominal_attributes + (choice - nominals_left.len());
            let threshold = rng.gen::<f64>();
            self.nodes.push(ConceptNode::Leaf(0)); // placeholder
            let left = self.grow(cfg, rng, depth + 1, nominals_left);
            let right = self.grow(cfg, rng, depth + 1, nominals_left);
            self.nodes[idx] = ConceptNode::NumericSplit {
                attr,
                threshold,
                children: [left, right],
            };
        }
        idx
    }

    fn route<F: Float>(&self, features: &[FeatureValue<F>]) -> usize {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                ConceptNode::Leaf(label) => return *label,
                ConceptNode::NominalSplit { attr, children } => {
                    let v = features[*attr].as_nominal().unwrap_or(0) as usize;
                    idx = children[v.min(children.len() - 1)];
                }
                ConceptNode::NumericSplit {
                    attr,
                    threshold,
                    children,
                } => {
                    let v = features[*attr]
                        .as_numeric()
                        .map(|x| x.as_f64())
                        .unwrap_or(0.0);
                    idx = if v <= *threshold {
                        children[0]
                    } else {
                        children[1]
                    };
                }
            }
        }
    }
}

pub struct RandomTreeGenerator<F: Float> {
    schema: Arc<StreamSchema>,
    cfg: RandomTreeConfig,
    concepts: [ConceptTree; 2],
    rng: ChaCha8Rng,
    emitted: u64,
    _marker: std::marker::PhantomData<F>,
}

impl<F: Float> RandomTreeGenerator<F> {
    pub fn new(cfg: RandomTreeConfig, seed: u64) -> Result<Self> {
        let mut attrs: Vec<Attribute> = (0..cfg.nominal_attributes)
            .map(|i| {
                Attribute::nominal_with_cardinality(format!("nom{}", i + 1), cfg.nominal_values)
            })
            .collect();
        attrs.extend(
            (0..cfg.numeric_attributes).map(|i| Attribute::numeric(format!("num{}", i + 1))),
        );
        let schema = Arc::new(StreamSchema::new(
            attrs,
            (0..cfg.classes).map(|c| format!("class{c}")).collect(),
        )?);
        let concepts = [
            ConceptTree::build(&cfg, child_seed(seed, 0)),
            ConceptTree::build(&cfg, child_seed(seed, 1)),
        ];
        Ok(RandomTreeGenerator {
            schema,
            cfg,
            concepts,
            rng: ChaCha8Rng::seed_from_u64(child_seed(seed, 2)),
            emitted: 0,
            _marker: std::marker::PhantomData,
        })
    }

    /// Index of the concept tree in effect right now.
    pub fn active_concept(&self) -> usize {
        match self.cfg.reswap_every {
            Some(k) if k > 0 => ((self.emitted / k) % 2) as usize,
            _ => 0,
        }
    }

    /// Label `features` under a specific concept (0 or 1).
    pub fn label_under_concept(&self, concept: usize, features: &[FeatureValue<F>]) -> usize {
        self.concepts[concept % 2].route(features)
    }
}

impl<F: Float> StreamSource<F> for RandomTreeGenerator<F> {
    fn schema(&self) -> &Arc<StreamSchema> {
        &self.schema
    }

    fn next_instance(&mut self) -> Result<Option<Instance<F>>> {
        let mut features =
            Vec::with_capacity(self.cfg.nominal_attributes + self.cfg.numeric_attributes);
        for _ in 0..self.cfg.nominal_attributes {
            features.push(FeatureValue::Nominal(
                self.rng.gen_range(0..self.cfg.nominal_values as u32),
            ));
        }
        for _ in 0..self.cfg.numeric_attributes {
            features.push(FeatureValue::Numeric(F::of(self.rng.gen::<f64>())));
        }
        let label = self.concepts[self.active_concept()].route(&features);
        self.emitted += 1;
        Ok(Some(Instance::new(features, label)))
    }
}
