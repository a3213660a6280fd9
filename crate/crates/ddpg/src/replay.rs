//! Experience replay with FIFO eviction and seeded uniform sampling.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// One transition. Components are finite by construction; actions live in
/// the unit box.
#[derive(Debug, Clone, PartialEq)]
pub struct Experience {
    pub state: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub done: bool,
}

/// Ring of experiences. All sampling randomness comes from the buffer's own
/// seeded generator, so (seed, operation sequence) determines everything.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    storage: VecDeque<Experience>,
    rng: ChaCha12Rng,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, seed: u64) -> Self {
        assert!(capacity > 0, "capacity must be positive");
        Self {
            capacity,
            storage: VecDeque::with_capacity(capacity.min(1 << 20)),
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Appends, evicting the oldest entry when full.
    pub fn store(&mut self, exp: Experience) {
        if self.storage.len() == self.capacity {
            self.storage.pop_front();
        }
        self.storage.push_back(exp);
    }

    pub fn get(&self, index: usize) -> &Experience {
        &self.storage[index]
    }

    /// Draws `k` distinct indices uniformly; `None` when the buffer holds
    /// fewer than `k` entries (the caller skips the update).
    pub fn sample_indices(&mut self, k: usize) -> Option<Vec<usize>> {
        if self.storage.len() < k {
            return None;
        }
        Some(rand::seq::index::sample(&mut self.rng, self.storage.len(), k).into_vec())
    }
}
