use std::collections::VecDeque;

use rand::Rng;

use crate::ingest::UpdateAction;

use super::{AgentError, State};

#[derive(Debug, Clone, PartialEq)]
pub struct Experience<T> {
    pub s: State<T>,
    pub a: UpdateAction,
    pub r: T,
    pub s_next: State<T>,
    pub terminal: bool,
}

/// Fixed-capacity ring buffer; the oldest experience is evicted first.
#[derive(Debug, Clone)]
pub struct ReplayMemory<T> {
    buf: VecDeque<Experience<T>>,
    capacity: usize,
}

impl<T: Clone> ReplayMemory<T> {
    pub fn new(capacity: usize) -> Self {
        Self { buf: VecDeque::with_capacity(capacity.min(1 << 16)), capacity: capacity.max(1) }
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn remember(&mut self, e: Experience<T>) {
        if self.buf.len() == self.capacity {
            self.buf.pop_front();
        }
        self.buf.push_back(e);
    }

    pub fn get(&self, i: usize) -> Option<&Experience<T>> {
        self.buf.get(i)
    }

    /// Indices of a uniform sample without replacement.
    pub fn sample_indices<R: Rng + ?Sized>(&self, batch: usize, rng: &mut R) -> Result<Vec<usize>, AgentError> {
        if batch == 0 {
            return Err(AgentError::EmptyBatch);
        }
        if self.buf.len() < batch {
            return Err(AgentError::InsufficientExperience { have: self.buf.len(), need: batch });
        }
        Ok(rand::seq::index::sample(rng, self.buf.len(), batch).into_vec())
    }

    pub fn sample_batch<R: Rng + ?Sized>(&self, batch: usize, rng: &mut R) -> Result<Vec<&Experience<T>>, AgentError> {
        Ok(self.sample_indices(batch, rng)?.into_iter().map(|i| &self.buf[i]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSignal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn exp(r: f64) -> Experience<f64> {
        let s = State::from_snapshots(&[GraphSignal::zeros(0, 1, 1)], 1).unwrap();
        Experience { s: s.clone(), a: UpdateAction::zeros(1), r, s_next: s, terminal: false }
    }

    #[test]
    fn evicts_oldest() {
        let mut m = ReplayMemory::new(3);
        for r in 0..4 {
            m.remember(exp(r as f64));
        }
        assert_eq!(m.len(), 3);
        assert_eq!(m.get(0).unwrap().r, 1.0);
    }

    #[test]
    fn too_small_to_sample() {
        let mut m = ReplayMemory::new(10);
        m.remember(exp(0.0));
        let err = m.sample_indices(2, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert_eq!(err, AgentError::InsufficientExperience { have: 1, need: 2 });
    }

    #[test]
    fn seeded_sampling_is_reproducible_and_distinct() {
        let mut m = ReplayMemory::new(100);
        for r in 0..50 {
            m.remember(exp(r as f64));
        }
        let a = m.sample_indices(16, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = m.sample_indices(16, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        let mut u = a.clone();
        u.sort_unstable();
        u.dedup();
        assert_eq!(u.len(), 16);
    }
}
