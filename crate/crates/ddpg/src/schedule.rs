//! Training schedules: which sub-networks train, and when the active policy
//! rotates.

use actorcritic::LockSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    /// Stage-1 round-robin: observers, coordinator, output map and one
    /// policy at a time; the active policy rotates every
    /// `steps_per_policy` simulation steps.
    Iterative,
    /// Stage-2 refinement: the coordinator alone; the critic is locked too.
    CoordinatorRefine,
    /// Plain joint training of everything.
    BaselineJoint,
}

#[derive(Debug, Clone)]
pub struct TrainingSchedule {
    pub kind: ScheduleKind,
    pub steps_per_policy: u64,
    pub n_policies: usize,
    pub episodes_total: usize,
    total_steps: u64,
}

impl TrainingSchedule {
    pub fn new(kind: ScheduleKind, n_policies: usize) -> Self {
        Self {
            kind,
            steps_per_policy: 5000,
            n_policies,
            episodes_total: 3000,
            total_steps: 0,
        }
    }

    pub fn with_steps_per_policy(mut self, steps: u64) -> Self {
        self.steps_per_policy = steps;
        self
    }

    pub fn with_episodes_total(mut self, episodes: usize) -> Self {
        self.episodes_total = episodes;
        self
    }

    /// Simulation steps seen so far; persists across episodes.
    pub fn total_steps(&self) -> u64 {
        self.total_steps
    }

    pub fn advance(&mut self, sim_steps: u64) {
        self.total_steps += sim_steps;
    }

    /// floor(total_steps / steps_per_policy) mod N.
    pub fn active_policy(&self) -> usize {
        ((self.total_steps / self.steps_per_policy) % self.n_policies as u64) as usize
    }

    /// The trainable set implied by the schedule at its current step count.
    pub fn locks(&self) -> LockSet {
        match self.kind {
            ScheduleKind::Iterative => LockSet::iterative(self.n_policies, self.active_policy()),
            ScheduleKind::CoordinatorRefine => LockSet::coordinator_only(self.n_policies),
            ScheduleKind::BaselineJoint => LockSet::all_trainable(self.n_policies),
        }
    }

    pub fn critic_trainable(&self) -> bool {
        self.kind != ScheduleKind::CoordinatorRefine
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_window_is_policy_zero_then_one() {
        let mut s = TrainingSchedule::new(ScheduleKind::Iterative, 8);
        for _ in 0..4999 {
            s.advance(1);
            assert_eq!(s.active_policy(), 0);
        }
        s.advance(1); // step 5000
        assert_eq!(s.active_policy(), 1);
    }

    #[test]
    fn full_cycle_wraps_to_policy_zero() {
        let mut s = TrainingSchedule::new(ScheduleKind::Iterative, 8);
        s.advance(8 * 5000);
        assert_eq!(s.active_policy(), 0);
    }

    #[test]
    fn hand_arithmetic_example() {
        let mut s = TrainingSchedule::new(ScheduleKind::Iterative, 8);
        s.advance(40_000 * 3 + 17);
        assert_eq!(s.total_steps(), 120_017);
        assert_eq!(s.active_policy(), 0); // floor(120017/5000) = 24, 24 mod 8 = 0
    }

    #[test]
    fn locks_follow_the_schedule_kind() {
        let s = TrainingSchedule::new(ScheduleKind::CoordinatorRefine, 4);
        let locks = s.locks();
        assert!(!locks.observers && locks.coordinator && !locks.mapper);
        assert!(locks.policies.iter().all(|&p| !p));
        assert!(!s.critic_trainable());

        let s = TrainingSchedule::new(ScheduleKind::BaselineJoint, 4);
        let locks = s.locks();
        assert!(locks.observers && locks.coordinator && locks.mapper);
        assert!(locks.policies.iter().all(|&p| p));
        assert!(s.critic_trainable());

        let mut s = TrainingSchedule::new(ScheduleKind::Iterative, 4).with_steps_per_policy(10);
        s.advance(25);
        let locks = s.locks();
        assert_eq!(locks.policies, vec![false, false, true, false]);
    }

    #[test]
    fn round_robin_covers_each_policy_equally() {
        let mut s = TrainingSchedule::new(ScheduleKind::Iterative, 4).with_steps_per_policy(100);
        let mut active_steps = [0u64; 4];
        for _ in 0..2 * 4 * 100 {
            active_steps[s.active_policy()] += 1;
            s.advance(1);
        }
        assert_eq!(active_steps, [200; 4]);
    }
}
