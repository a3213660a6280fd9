//! Strict/relaxed checkpoint selection over episode rewards.

use std::collections::VecDeque;

use actorcritic::Agent;

use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMode {
    /// Save only when the instantaneous reward, the mean of the last 10
    /// episodes and the median of the last 10 episodes are all records.
    Strict,
    /// Save on a new instantaneous-reward record alone.
    Relaxed,
}

#[derive(Debug, Clone)]
pub struct CheckpointSelector {
    mode: SelectionMode,
    history: VecDeque<f64>,
    best_instant: f64,
    best_mean10: f64,
    best_median10: f64,
}

impl CheckpointSelector {
    pub fn new(mode: SelectionMode) -> Self {
        Self {
            mode,
            history: VecDeque::with_capacity(10),
            best_instant: f64::NEG_INFINITY,
            best_mean10: f64::NEG_INFINITY,
            best_median10: f64::NEG_INFINITY,
        }
    }

    pub fn mode(&self) -> SelectionMode {
        self.mode
    }

    /// Mean of the retained window (up to 10 episodes, newest included).
    pub fn mean10(&self) -> f64 {
        if self.history.is_empty() {
            return f64::NEG_INFINITY;
        }
        self.history.iter().sum::<f64>() / self.history.len() as f64
    }

    /// Median of the retained window.
    pub fn median10(&self) -> f64 {
        if self.history.is_empty() {
            return f64::NEG_INFINITY;
        }
        let mut sorted: Vec<f64> = self.history.iter().cloned().collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sorted.len();
        if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        }
    }

    /// Feeds one episode reward; returns whether to save a checkpoint.
    /// Records only move on a save, so the saved sequence has strictly
    /// increasing instantaneous reward in both modes.
    pub fn consider(&mut self, episode_reward: f64) -> bool {
        if self.history.len() == 10 {
            self.history.pop_front();
        }
        self.history.push_back(episode_reward);

        match self.mode {
            SelectionMode::Relaxed => {
                if episode_reward > self.best_instant {
                    self.best_instant = episode_reward;
                    true
                } else {
                    false
                }
            }
            SelectionMode::Strict => {
                let mean = self.mean10();
                let median = self.median10();
                if episode_reward > self.best_instant
                    && mean > self.best_mean10
                    && median > self.best_median10
                {
                    self.best_instant = episode_reward;
                    self.best_mean10 = mean;
                    self.best_median10 = median;
                    true
                } else {
                    false
                }
            }
        }
    }
}

/// Metadata attached to each saved checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointMeta {
    pub episode: usize,
    pub steps: u32,
    pub reward: f64,
    pub mean10: f64,
    pub median10: f64,
}

/// Receives agents the selector accepted.
pub trait CheckpointSink {
    fn save(&mut self, agent: &Agent, meta: &CheckpointMeta) -> Result<()>;
}

/// Drops every checkpoint; for tests and throwaway runs.
pub struct DiscardCheckpoints;

impl CheckpointSink for DiscardCheckpoints {
    fn save(&mut self, _agent: &Agent, _meta: &CheckpointMeta) -> Result<()> {
        Ok(())
    }
}

/// Keeps the latest accepted snapshot in memory.
#[derive(Default)]
pub struct MemorySink {
    pub best: Option<(Vec<u8>, CheckpointMeta)>,
    pub saves: usize,
}

impl CheckpointSink for MemorySink {
    fn save(&mut self, agent: &Agent, meta: &CheckpointMeta) -> Result<()> {
        let mut buf = Vec::new();
        agent.write_to(&mut buf)?;
        self.best = Some((buf, *meta));
        self.saves += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decisions(mode: SelectionMode, rewards: &[f64]) -> Vec<bool> {
        let mut sel = CheckpointSelector::new(mode);
        rewards.iter().map(|&r| sel.consider(r)).collect()
    }

    #[test]
    fn ascending_series_saves_at_eleven() {
        let rewards: Vec<f64> = (1..=11).map(|r| r as f64).collect();
        let d = decisions(SelectionMode::Strict, &rewards);
        // every episode of a strictly increasing series beats all records
        assert!(d.iter().all(|&s| s));
        // the window at 11 is 2..=11: mean 6.5, median 6.5, both records
        let mut sel = CheckpointSelector::new(SelectionMode::Strict);
        for r in 1..=11 {
            sel.consider(r as f64);
        }
        assert!((sel.mean10() - 6.5).abs() < 1e-12);
        assert!((sel.median10() - 6.5).abs() < 1e-12);
    }

    #[test]
    fn instant_gate_blocks_non_record_reward() {
        let mut rewards = vec![10.0];
        rewards.extend(std::iter::repeat(1.0).take(8));
        rewards.push(9.0);
        let d = decisions(SelectionMode::Strict, &rewards);
        assert!(d[0]);
        assert!(!d[rewards.len() - 1], "9 is not an instantaneous record");
    }

    #[test]
    fn relaxed_saves_exactly_on_running_maxima() {
        let rewards = [3.0, 1.0, 3.0, 4.0, 2.0, 7.0, 7.0, 8.0];
        let d = decisions(SelectionMode::Relaxed, &rewards);
        assert_eq!(d, vec![true, false, false, true, false, true, false, true]);
    }

    #[test]
    fn strict_requires_mean_and_median_records_too() {
        let mut sel = CheckpointSelector::new(SelectionMode::Strict);
        assert!(sel.consider(10.0)); // first episode sets all records
        for _ in 0..9 {
            assert!(!sel.consider(0.0));
        }
        // instantaneous records, but the window is still polluted with
        // zeros, so the mean gate blocks until the window refills
        for _ in 0..9 {
            assert!(!sel.consider(11.0));
        }
        // tenth eleven: window [11 × 10] finally beats mean and median too
        assert!(sel.consider(11.0));
    }

    #[test]
    fn saved_sequence_has_strictly_increasing_instant_reward() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for mode in [SelectionMode::Strict, SelectionMode::Relaxed] {
            let mut sel = CheckpointSelector::new(mode);
            let mut saved = Vec::new();
            for _ in 0..500 {
                let r: f64 = rng.random_range(-10.0..10.0);
                if sel.consider(r) {
                    saved.push(r);
                }
            }
            for pair in saved.windows(2) {
                assert!(pair[1] > pair[0]);
            }
        }
    }
}
