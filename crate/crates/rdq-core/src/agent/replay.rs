//! Experience replay: a ring buffer with uniform sampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::envs::Action;
use crate::qsr::QsrState;
use crate::scalar::Scalar;

/// One stored transition. Carries the qualitative relations of `s` so the
/// teacher policy can be rebuilt against the rules current at optimization
/// time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experience<S> {
    pub s: Vec<S>,
    pub a: Action,
    pub r: S,
    pub s_next: Vec<S>,
    pub terminal: bool,
    pub s_qsr: QsrState,
}

/// Fixed-capacity ring buffer; once full, the oldest entries are
/// overwritten first.
#[derive(Debug, Clone)]
pub struct ReplayBuffer<S> {
    items: Vec<Experience<S>>,
    capacity: usize,
    write: usize,
}

impl<S: Scalar> ReplayBuffer<S> {
    pub fn new(capacity: usize) -> ReplayBuffer<S> {
        assert!(capacity > 0);
        ReplayBuffer {
            items: Vec::with_capacity(capacity.min(4096)),
            capacity,
            write: 0,
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

    pub fn push(&mut self, e: Experience<S>) {
        if self.items.len() < self.capacity {
            self.items.push(e);
        } else {
            self.items[self.write] = e;
            self.write = (self.write + 1) % self.capacity;
        }
    }

    pub fn get(&self, index: usize) -> &Experience<S> {
        &self.items[index]
    }

    /// Indices drawn uniformly with replacement.
    pub fn sample_indices<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        assert!(!self.items.is_empty());
        (0..n).map(|_| rng.gen_range(0..self.items.len())).collect()
    }

    pub fn sample_cloned<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<Experience<S>> {
        self.sample_indices(n, rng)
            .into_iter()
            .map(|i| self.items[i].clone())
            .collect()
    }
}
