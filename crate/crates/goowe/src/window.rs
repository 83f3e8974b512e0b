//! Sliding instance window and tumbling training chunk.

use std::collections::VecDeque;

use crate::float::Float;
use crate::instance::Instance;
use crate::score::ScoreVector;

/// A windowed instance together with each component's cached vote for it.
///
/// Scores are cached at prediction time so the weight solve never re-scores
/// retained instances; a component missing from the cache (it joined after
/// this instance arrived) is filled in lazily by the ensemble.
#[derive(Debug, Clone)]
pub struct CachedInstance<F: Float> {
    pub instance: Instance<F>,
    scores: Vec<(u64, ScoreVector<F>)>,
}

impl<F: Float> CachedInstance<F> {
    pub fn new(instance: Instance<F>, mut scores: Vec<(u64, ScoreVector<F>)>) -> Self {
        scores.sort_by_key(|(id, _)| *id);
        CachedInstance { instance, scores }
    }

    pub fn score_for(&self, component: u64) -> Option<&ScoreVector<F>> {
        self.scores
            .binary_search_by_key(&component, |(id, _)| *id)
            .ok()
            .map(|i| &self.scores[i].1)
    }

    pub fn insert_score(&mut self, component: u64, score: ScoreVector<F>) {
        match self.scores.binary_search_by_key(&component, |(id, _)| *id) {
            Ok(i) => self.scores[i].1 = score,
            Err(i) => self.scores.insert(i, (component, score)),
        }
    }

    pub fn cached_components(&self) -> usize {
        self.scores.len()
    }

    /// Drop cached votes for components no longer in the ensemble.
    pub fn retain_scores(&mut self, live: &[u64]) {
        self.scores.retain(|(id, _)| live.contains(id));
    }
}

/// FIFO ring of the latest labelled instances with cached component votes.
#[derive(Debug, Clone)]
pub struct InstanceWindow<F: Float> {
    capacity: usize,
    slots: VecDeque<CachedInstance<F>>,
}

impl<F: Float> InstanceWindow<F> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "window capacity must be positive");
        InstanceWindow {
            capacity,
            slots: VecDeque::with_capacity(capacity),
        }
    }

    /// Insert the newest instance; returns the evicted oldest slot when full.
    pub fn push(&mut self, slot: CachedInstance<F>) -> Option<CachedInstance<F>> {
        let evicted = if self.slots.len() == self.capacity {
            self.slots.pop_front()
        } else {
            None
        };
        self.slots.push_back(slot);
        evicted
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Oldest-to-newest iteration.
    pub fn iter(&self) -> impl Iterator<Item = &CachedInstance<F>> {
        self.slots.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut CachedInstance<F>> {
        self.slots.iter_mut()
    }
}

/// Tumbling buffer of `h` consecutive labelled instances used for training.
#[derive(Debug, Clone)]
pub struct DataChunk<F: Float> {
    capacity: usize,
    items: Vec<Instance<F>>,
}

impl<F: Float> DataChunk<F> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "chunk capacity must be positive");
        DataChunk {
            capacity,
            items: Vec::with_capacity(capacity),
        }
    }

    /// Buffer an instance; when the chunk reaches capacity it is handed back
    /// whole and the buffer resets.
    pub fn push(&mut self, inst: Instance<F>) -> Option<Vec<Instance<F>>> {
        self.items.push(inst);
        if self.items.len() == self.capacity {
            let full = std::mem::replace(&mut self.items, Vec::with_capacity(self.capacity));
            Some(full)
        } else {
            None
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn slot(x: f64) -> CachedInstance<f64> {
        CachedInstance::new(Instance::from_numeric(&[x], 0), vec![])
    }

    #[test]
    fn push_below_capacity_never_evicts() {
        let mut w = InstanceWindow::new(3);
        assert!(w.push(slot(1.0)).is_none());
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn fourth_push_evicts_first() {
        let mut w = InstanceWindow::new(3);
        for i in 0..3 {
            assert!(w.push(slot(i as f64)).is_none());
        }
        let evicted = w.push(slot(3.0)).expect("full window must evict");
        assert_eq!(evicted.instance.features[0].as_numeric(), Some(0.0));
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn score_cache_insert_and_lookup() {
        let mut s = slot(0.0);
        s.insert_score(7, ScoreVector::uniform(2));
        s.insert_score(3, ScoreVector::one_hot(1, 2));
        assert_eq!(s.cached_components(), 2);
        assert_eq!(s.score_for(3).unwrap().argmax(), 1);
        assert!(s.score_for(5).is_none());
        // overwrite keeps the count
        s.insert_score(7, ScoreVector::one_hot(0, 2));
        assert_eq!(s.cached_components(), 2);
    }

    #[test]
    fn chunk_emits_exactly_at_capacity() {
        let mut c = DataChunk::new(2);
        assert!(c.push(Instance::from_numeric(&[0.0f64], 0)).is_none());
        let full = c.push(Instance::from_numeric(&[1.0f64], 1)).unwrap();
        assert_eq!(full.len(), 2);
        assert!(c.is_empty());
    }

    proptest! {
        #[test]
        fn window_preserves_insertion_order_and_capacity(
            values in prop::collection::vec(-100.0f64..100.0, 1..40),
            cap in 1usize..12,
        ) {
            let mut w = InstanceWindow::new(cap);
            for &v in &values {
                w.push(slot(v));
            }
            prop_assert!(w.len() <= cap);
            let expected: Vec<f64> = values
                .iter()
                .copied()
                .skip(values.len().saturating_sub(cap))
                .collect();
            let got: Vec<f64> = w
                .iter()
                .map(|s| s.instance.features[0].as_numeric().unwrap())
                .collect();
            prop_assert_eq!(got, expected);
        }
    }
}
