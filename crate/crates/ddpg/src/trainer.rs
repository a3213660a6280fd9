//! The DDPG training loop and its update steps.

use actorcritic::{Agent, LockSet};
use nncore::AdamConfig;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::{
    CheckpointMeta, CheckpointSelector, CheckpointSink, DdpgError, Environment, Experience,
    ReplayBuffer, Result, ScheduleKind, TrainingSchedule,
};

#[derive(Debug, Clone)]
pub struct DdpgConfig {
    pub gamma: f64,
    pub tau: f64,
    pub batch: usize,
    /// Optimizer template the agent is built with; recorded here so a run's
    /// hyperparameters live in one place.
    pub adam: AdamConfig,
    pub exploration_sigma: f64,
    pub warmup_steps: usize,
    pub train_seed: u64,
    pub replay_capacity: usize,
}

impl Default for DdpgConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            tau: 5e-3,
            batch: 64,
            adam: AdamConfig::default(),
            exploration_sigma: 0.1,
            warmup_steps: 1000,
            train_seed: 107,
            replay_capacity: 1_000_000,
        }
    }
}

impl DdpgConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.gamma && self.gamma < 1.0) {
            return Err(DdpgError::Config("gamma must be in (0, 1)".into()));
        }
        if self.batch == 0 {
            return Err(DdpgError::Config("batch must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(DdpgError::Config("tau must be in [0, 1]".into()));
        }
        if self.exploration_sigma < 0.0 {
            return Err(DdpgError::Config("exploration sigma must be >= 0".into()));
        }
        if self.replay_capacity == 0 {
            return Err(DdpgError::Config("replay capacity must be >= 1".into()));
        }
        Ok(())
    }
}

/// Bellman backup: `reward + gamma·(1−done)·q_next`.
pub fn td_target(reward: f64, done: bool, q_next: f64, gamma: f64) -> f64 {
    reward + gamma * if done { 0.0 } else { q_next }
}

/// Gaussian action noise clipped back into the unit box.
pub fn explore<R: Rng + ?Sized>(action: &[f64], sigma: f64, rng: &mut R) -> Vec<f64> {
    if sigma == 0.0 {
        return action.to_vec();
    }
    let normal = Normal::new(0.0, sigma).expect("valid sigma");
    action
        .iter()
        .map(|&a| (a + normal.sample(rng)).clamp(0.0, 1.0))
        .collect()
}

/// One Adam step of TD regression on the online critic; targets come from
/// the target actor/critic pair. Returns the pre-step mean-squared error.
pub fn critic_update(agent: &mut Agent, batch: &[&Experience], gamma: f64) -> f64 {
    let mut loss = 0.0;
    for exp in batch {
        let next_action = agent.target_actor.infer(&exp.next_state).action;
        let q_next = agent.target_critic.infer(&exp.next_state, &next_action);
        let target = td_target(exp.reward, exp.done, q_next, gamma);
        let q = agent.critic.forward(&exp.state, &exp.action);
        let residual = q - target;
        loss += residual * residual;
        agent
            .critic
            .backward(2.0 * residual)
            .expect("forward precedes backward");
    }
    agent.critic.adam_step(batch.len());
    loss / batch.len() as f64
}

/// One Adam ascent step on the mean critic value of (s, actor(s)), with
/// gradients confined to the schedule's trainable set. The critic is frozen
/// while its action gradient is extracted, so it accumulates nothing here.
pub fn actor_update(agent: &mut Agent, batch: &[&Experience], locks: &LockSet) {
    agent.actor.apply_locks(locks);
    let critic_was_trainable = agent.critic.trainable();
    agent.critic.set_trainable(false);
    for exp in batch {
        let out = agent.actor.forward(&exp.state);
        agent.critic.forward(&exp.state, &out.action);
        let (_, d_action) = agent
            .critic
            .backward(-1.0) // minimize −Q
            .expect("forward precedes backward");
        agent
            .actor
            .backward(&d_action)
            .expect("forward precedes backward");
    }
    agent.actor.adam_step(batch.len());
    agent.critic.set_trainable(critic_was_trainable);
}

/// One per-episode row of the training log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRow {
    pub episode: usize,
    pub steps: u32,
    pub reward: f64,
    pub mean10: f64,
    pub median10: f64,
    pub active_policy: usize,
    pub checkpoint_saved: bool,
}

pub type TrainingLog = Vec<EpisodeRow>;

/// CSV with columns episode, steps, reward, mean10, median10,
/// active_policy, checkpoint_saved.
pub fn write_log_csv<W: std::io::Write>(rows: &[EpisodeRow], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "episode,steps,reward,mean10,median10,active_policy,checkpoint_saved")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.episode, r.steps, r.reward, r.mean10, r.median10, r.active_policy,
            r.checkpoint_saved as u8
        )?;
    }
    Ok(())
}

/// Runs `episode_budget` episodes of DDPG training.
///
/// Per step: greedy action, exploration noise, env step, replay store, then
/// (once the warmup has filled the buffer) one critic update (skipped under
/// coordinator refinement, where the critic is locked), one actor update
/// confined to the schedule's trainable set, and one soft target update.
/// The schedule's step counter persists across episodes. Checkpoints are
/// offered to the sink whenever the selector accepts an episode.
pub fn train<E: Environment>(
    env: &mut E,
    agent: &mut Agent,
    schedule: &mut TrainingSchedule,
    selector: &mut CheckpointSelector,
    cfg: &DdpgConfig,
    episode_budget: usize,
    sink: &mut dyn CheckpointSink,
) -> Result<TrainingLog> {
    cfg.validate()?;
    if env.group_dims() != agent.config().group_dims || env.action_dim() != agent.config().action_dim
    {
        return Err(DdpgError::Config(format!(
            "env dims (groups {:?}, action {}) do not match agent dims (groups {:?}, action {})",
            env.group_dims(),
            env.action_dim(),
            agent.config().group_dims,
            agent.config().action_dim
        )));
    }
    if schedule.n_policies != agent.config().n_policies {
        return Err(DdpgError::Config(
            "schedule and agent disagree on the policy count".into(),
        ));
    }

    // all run randomness forks deterministically off the train seed
    let mut master = ChaCha12Rng::seed_from_u64(cfg.train_seed);
    let mut explore_rng = ChaCha12Rng::seed_from_u64(master.next_u64());
    let mut buffer = ReplayBuffer::new(cfg.replay_capacity, master.next_u64());

    let mut log = Vec::with_capacity(episode_budget);
    for episode in 0..episode_budget {
        let mut obs = env.reset();
        let mut episode_reward = 0.0;
        let mut steps = 0u32;
        loop {
            let greedy = agent.actor.infer(&obs).action;
            let action = explore(&greedy, cfg.exploration_sigma, &mut explore_rng);
            let step = env.step(&action);
            buffer.store(Experience {
                state: std::mem::take(&mut obs),
                action: action.clone(),
                reward: step.reward,
                next_state: step.obs.clone(),
                done: step.done,
            });
            obs = step.obs;
            episode_reward += step.reward;
            steps += 1;

            if buffer.len() >= cfg.warmup_steps {
                if let Some(indices) = buffer.sample_indices(cfg.batch) {
                    let batch: Vec<&Experience> = indices.iter().map(|&i| buffer.get(i)).collect();
                    if schedule.critic_trainable() {
                        critic_update(agent, &batch, cfg.gamma);
                    } else {
                        agent.critic.set_trainable(false);
                    }
                    actor_update(agent, &batch, &schedule.locks());
                    agent.soft_update(cfg.tau)?;
                }
            }
            schedule.advance(1);
            if step.done {
                break;
            }
        }

        let saved = selector.consider(episode_reward);
        if saved {
            sink.save(
                agent,
                &CheckpointMeta {
                    episode,
                    steps,
                    reward: episode_reward,
                    mean10: selector.mean10(),
                    median10: selector.median10(),
                },
            )?;
        }
        log.push(EpisodeRow {
            episode,
            steps,
            reward: episode_reward,
            mean10: selector.mean10(),
            median10: selector.median10(),
            active_policy: schedule.active_policy(),
            checkpoint_saved: saved,
        });
    }
    Ok(log)
}

/// Convenience: the schedule pair a named training lineage uses per stage.
pub fn stage_schedule(kind: ScheduleKind, n_policies: usize) -> TrainingSchedule {
    TrainingSchedule::new(kind, n_policies)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{DiscardCheckpoints, EnvStep, SelectionMode};
    use actorcritic::AgentConfig;
    use rand_chacha::ChaCha12Rng;

    fn mini_agent_config(lr: f64) -> AgentConfig {
        AgentConfig {
            group_dims: vec![2, 2],
            observer_hidden: 4,
            observer_out: 4,
            n_policies: 4,
            policy_hidden: 6,
            coordinator_hidden: 6,
            action_dim: 2,
            critic_hidden: vec![8, 8],
            adam: AdamConfig::new(lr),
        }
    }

    fn mini_agent(seed: u64, lr: f64) -> Agent {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        Agent::new(mini_agent_config(lr), &mut rng).unwrap()
    }

    fn mini_batch(seed: u64, n: usize) -> Vec<Experience> {
        use rand::Rng;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Experience {
                state: (0..4).map(|_| rng.random_range(-1.0..1.0)).collect(),
                action: (0..2).map(|_| rng.random_range(0.0..1.0)).collect(),
                reward: rng.random_range(-1.0..1.0),
                next_state: (0..4).map(|_| rng.random_range(-1.0..1.0)).collect(),
                done: rng.random_range(0.0..1.0) < 0.1,
            })
            .collect()
    }

    /// A deterministic toy environment: the state drifts with the action.
    struct ToyEnv {
        state: Vec<f64>,
        t: u32,
        horizon: u32,
    }

    impl ToyEnv {
        fn new() -> Self {
            Self {
                state: vec![0.0; 4],
                t: 0,
                horizon: 25,
            }
        }
    }

    impl Environment for ToyEnv {
        fn group_dims(&self) -> Vec<usize> {
            vec![2, 2]
        }
        fn action_dim(&self) -> usize {
            2
        }
        fn reset(&mut self) -> Vec<f64> {
            self.state = vec![0.1, -0.1, 0.2, -0.2];
            self.t = 0;
            self.state.clone()
        }
        fn step(&mut self, action: &[f64]) -> EnvStep {
            self.t += 1;
            for (i, s) in self.state.iter_mut().enumerate() {
                *s = (*s * 0.9 + 0.1 * action[i % 2]).clamp(-3.0, 3.0);
            }
            let reward = 1.0 - (action[0] - 0.3).abs();
            EnvStep {
                obs: self.state.clone(),
                reward,
                done: self.t >= self.horizon,
            }
        }
    }

    #[test]
    fn td_target_examples() {
        assert_eq!(td_target(1.0, true, 5.0, 0.99), 1.0);
        assert!((td_target(1.0, false, 2.0, 0.99) - 2.98).abs() < 1e-12);
        assert_eq!(td_target(0.0, false, 0.0, 0.99), 0.0);
    }

    #[test]
    fn explore_sigma_zero_is_identity() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let a = vec![0.2, 0.8];
        assert_eq!(explore(&a, 0.0, &mut rng), a);
    }

    #[test]
    fn explore_clips_to_unit_box() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for _ in 0..2000 {
            let out = explore(&[1.0, 0.0], 0.5, &mut rng);
            assert!(out.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn explore_noise_has_the_requested_scale() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let sigma = 0.05;
        let n = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            // action 0.5 with small sigma: clipping is never hit
            let out = explore(&[0.5], sigma, &mut rng);
            let d = out[0] - 0.5;
            sum += d;
            sum_sq += d * d;
        }
        let mean = sum / n as f64;
        let std = (sum_sq / n as f64 - mean * mean).sqrt();
        assert!((std - sigma).abs() / sigma < 0.05, "std {std}");
    }

    #[test]
    fn critic_update_ignores_q_next_on_terminal_transitions() {
        let mut agent_a = mini_agent(10, 1e-3);
        let mut agent_b = agent_a.clone();
        // scramble b's target nets; with done=true everywhere the targets
        // cannot depend on them
        let n = agent_b.target_critic.params().len();
        agent_b.target_critic.set_params(&vec![0.33; n]);
        let mut batch = mini_batch(11, 8);
        for exp in batch.iter_mut() {
            exp.done = true;
        }
        let refs: Vec<&Experience> = batch.iter().collect();
        let loss_a = critic_update(&mut agent_a, &refs, 0.99);
        let loss_b = critic_update(&mut agent_b, &refs, 0.99);
        assert_eq!(loss_a.to_bits(), loss_b.to_bits());
    }

    #[test]
    fn zero_residual_batch_leaves_critic_bit_identical() {
        let mut agent = mini_agent(12, 1e-3);
        let mut batch = mini_batch(13, 8);
        for exp in batch.iter_mut() {
            exp.done = true;
            exp.reward = agent.critic.infer(&exp.state, &exp.action);
        }
        let before: Vec<u64> = agent.critic.params().iter().map(|p| p.to_bits()).collect();
        let refs: Vec<&Experience> = batch.iter().collect();
        let loss = critic_update(&mut agent, &refs, 0.99);
        assert_eq!(loss, 0.0);
        let after: Vec<u64> = agent.critic.params().iter().map(|p| p.to_bits()).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn repeated_updates_on_a_frozen_batch_converge() {
        let mut agent = mini_agent(14, 1e-2);
        let batch = mini_batch(15, 16);
        let refs: Vec<&Experience> = batch.iter().collect();
        let initial = critic_update(&mut agent, &refs, 0.99);
        let mut last = initial;
        for _ in 0..49 {
            last = critic_update(&mut agent, &refs, 0.99);
            assert!(last <= initial * 1.05, "loss {last} above initial {initial}");
        }
        assert!(
            last <= 0.5 * initial,
            "loss only fell from {initial} to {last}"
        );
    }

    #[test]
    fn actor_update_confines_changes_to_the_trainable_set() {
        let mut agent = mini_agent(16, 1e-3);
        let batch = mini_batch(17, 8);
        let refs: Vec<&Experience> = batch.iter().collect();

        let frozen_policies: Vec<Vec<u64>> = agent
            .actor
            .policies()
            .iter()
            .map(|p| p.params().iter().map(|v| v.to_bits()).collect())
            .collect();
        let critic_before: Vec<u64> = agent.critic.params().iter().map(|p| p.to_bits()).collect();

        let locks = LockSet::iterative(4, 2);
        actor_update(&mut agent, &refs, &locks);

        for (k, before) in frozen_policies.iter().enumerate() {
            let after: Vec<u64> = agent.actor.policies()[k]
                .params()
                .iter()
                .map(|v| v.to_bits())
                .collect();
            if k == 2 {
                assert_ne!(before, &after, "active policy should move");
            } else {
                assert_eq!(before, &after, "locked policy {k} moved");
            }
        }
        let critic_after: Vec<u64> = agent.critic.params().iter().map(|p| p.to_bits()).collect();
        assert_eq!(critic_before, critic_after);
    }

    #[test]
    fn coordinator_refine_touches_only_the_coordinator() {
        let mut agent = mini_agent(18, 1e-3);
        let batch = mini_batch(19, 8);
        let refs: Vec<&Experience> = batch.iter().collect();

        let all_before = agent.actor.params();
        let coord_before = agent.actor.coordinator().params();
        let critic_before: Vec<u64> = agent.critic.params().iter().map(|p| p.to_bits()).collect();

        agent.critic.set_trainable(false);
        actor_update(&mut agent, &refs, &LockSet::coordinator_only(4));

        assert_ne!(coord_before, agent.actor.coordinator().params());
        let critic_after: Vec<u64> = agent.critic.params().iter().map(|p| p.to_bits()).collect();
        assert_eq!(critic_before, critic_after);

        // everything outside the coordinator is bit-identical
        let coord_len = coord_before.len();
        let mapper_len = agent.actor.mapper().params().len();
        let all_after = agent.actor.params();
        let tail_start = all_before.len() - coord_len - mapper_len;
        for i in (0..tail_start).chain(all_before.len() - mapper_len..all_before.len()) {
            assert_eq!(all_before[i].to_bits(), all_after[i].to_bits(), "param {i}");
        }
    }

    #[test]
    fn actor_step_is_an_ascent_direction_for_small_lr() {
        for seed in 0..20 {
            let mut agent = mini_agent(100 + seed, 1e-5);
            let batch = mini_batch(200 + seed, 8);
            let refs: Vec<&Experience> = batch.iter().collect();
            let mean_q = |agent: &Agent| -> f64 {
                refs.iter()
                    .map(|e| {
                        let a = agent.actor.infer(&e.state).action;
                        agent.critic.infer(&e.state, &a)
                    })
                    .sum::<f64>()
                    / refs.len() as f64
            };
            let before = mean_q(&agent);
            actor_update(&mut agent, &refs, &LockSet::all_trainable(4));
            let after = mean_q(&agent);
            assert!(
                after >= before - 1e-12,
                "seed {seed}: mean Q fell from {before} to {after}"
            );
        }
    }

    #[test]
    fn zero_episode_budget_changes_nothing() {
        let mut env = ToyEnv::new();
        let mut agent = mini_agent(20, 1e-3);
        let before = agent.actor.params();
        let mut schedule = TrainingSchedule::new(ScheduleKind::Iterative, 4);
        let mut selector = CheckpointSelector::new(SelectionMode::Strict);
        let log = train(
            &mut env,
            &mut agent,
            &mut schedule,
            &mut selector,
            &DdpgConfig::default(),
            0,
            &mut DiscardCheckpoints,
        )
        .unwrap();
        assert!(log.is_empty());
        assert_eq!(before, agent.actor.params());
    }

    #[test]
    fn training_is_bit_deterministic() {
        let run = || {
            let mut env = ToyEnv::new();
            let mut agent = mini_agent(21, 1e-3);
            let mut schedule =
                TrainingSchedule::new(ScheduleKind::Iterative, 4).with_steps_per_policy(30);
            let mut selector = CheckpointSelector::new(SelectionMode::Strict);
            let cfg = DdpgConfig {
                warmup_steps: 40,
                batch: 8,
                ..DdpgConfig::default()
            };
            let log = train(
                &mut env,
                &mut agent,
                &mut schedule,
                &mut selector,
                &cfg,
                6,
                &mut DiscardCheckpoints,
            )
            .unwrap();
            let sig: Vec<u64> = log
                .iter()
                .flat_map(|r| [r.reward.to_bits(), r.steps as u64, r.active_policy as u64])
                .chain(agent.actor.params().iter().map(|p| p.to_bits()))
                .collect();
            sig
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn no_update_happens_before_the_warmup_fills() {
        let mut env = ToyEnv::new();
        let mut agent = mini_agent(22, 1e-2);
        let before = agent.actor.params();
        let mut schedule = TrainingSchedule::new(ScheduleKind::BaselineJoint, 4);
        let mut selector = CheckpointSelector::new(SelectionMode::Strict);
        let cfg = DdpgConfig {
            warmup_steps: 1000, // 2 episodes × 25 steps stay well below this
            batch: 8,
            ..DdpgConfig::default()
        };
        train(
            &mut env,
            &mut agent,
            &mut schedule,
            &mut selector,
            &cfg,
            2,
            &mut DiscardCheckpoints,
        )
        .unwrap();
        assert_eq!(before, agent.actor.params());

        // one more batch of episodes crosses the (lowered) warmup and trains
        let cfg = DdpgConfig {
            warmup_steps: 60,
            batch: 8,
            ..cfg
        };
        train(
            &mut env,
            &mut agent,
            &mut schedule,
            &mut selector,
            &cfg,
            3,
            &mut DiscardCheckpoints,
        )
        .unwrap();
        assert_ne!(before, agent.actor.params());
    }

    #[test]
    fn dimension_mismatch_is_a_configuration_error() {
        struct WrongEnv;
        impl Environment for WrongEnv {
            fn group_dims(&self) -> Vec<usize> {
                vec![3, 3]
            }
            fn action_dim(&self) -> usize {
                2
            }
            fn reset(&mut self) -> Vec<f64> {
                vec![0.0; 6]
            }
            fn step(&mut self, _action: &[f64]) -> EnvStep {
                EnvStep {
                    obs: vec![0.0; 6],
                    reward: 0.0,
                    done: true,
                }
            }
        }
        let mut agent = mini_agent(23, 1e-3);
        let mut schedule = TrainingSchedule::new(ScheduleKind::Iterative, 4);
        let mut selector = CheckpointSelector::new(SelectionMode::Strict);
        let err = train(
            &mut WrongEnv,
            &mut agent,
            &mut schedule,
            &mut selector,
            &DdpgConfig::default(),
            1,
            &mut DiscardCheckpoints,
        );
        assert!(matches!(err, Err(DdpgError::Config(_))));
    }
}
