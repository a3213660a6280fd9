//! The modular actor: observer bank → policy bank + coordinator → weighted
//! action mix → learnable tanh squash.

use nncore::{Activation, DenseNet, ParamTanhLayer, Result as NnResult};
use rand::Rng;

use crate::AgentConfig;

/// Which sub-networks receive parameter updates. `true` means trainable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LockSet {
    pub observers: bool,
    pub policies: Vec<bool>,
    pub coordinator: bool,
    pub mapper: bool,
}

impl LockSet {
    pub fn all_trainable(n_policies: usize) -> Self {
        Self {
            observers: true,
            policies: vec![true; n_policies],
            coordinator: true,
            mapper: true,
        }
    }

    pub fn all_locked(n_policies: usize) -> Self {
        Self {
            observers: false,
            policies: vec![false; n_policies],
            coordinator: false,
            mapper: false,
        }
    }

    /// Stage-1 iterative set: observers, coordinator, mapper and exactly one
    /// active policy.
    pub fn iterative(n_policies: usize, active_policy: usize) -> Self {
        let mut policies = vec![false; n_policies];
        policies[active_policy] = true;
        Self {
            observers: true,
            policies,
            coordinator: true,
            mapper: true,
        }
    }

    /// Stage-2 refinement set: the coordinator alone.
    pub fn coordinator_only(n_policies: usize) -> Self {
        Self {
            observers: false,
            policies: vec![false; n_policies],
            coordinator: true,
            mapper: false,
        }
    }
}

/// One actor evaluation: the squashed action, the coordination weights and
/// the raw (pre-squash) action proposed by each policy.
#[derive(Debug, Clone)]
pub struct ActorOutput {
    pub action: Vec<f64>,
    pub weights: Vec<f64>,
    pub per_policy: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
struct ActorCache {
    weights: Vec<f64>,
    per_policy: Vec<Vec<f64>>,
}

/// Observer bank + policy bank + coordinator + output map.
///
/// Observations arrive flat; the actor splits them into the configured
/// groups, encodes each group with its own observer net, concatenates the
/// encodings into the shared feature vector, and mixes the policy actions
/// with softmax weights from the coordinator.
#[derive(Debug, Clone)]
pub struct ModularActor {
    observers: Vec<DenseNet>,
    policies: Vec<DenseNet>,
    coordinator: DenseNet,
    mapper: ParamTanhLayer,
    group_dims: Vec<usize>,
    observer_out: usize,
    cache: Option<ActorCache>,
}

impl ModularActor {
    pub fn new<R: Rng + ?Sized>(cfg: &AgentConfig, rng: &mut R) -> Self {
        let observers = cfg
            .group_dims
            .iter()
            .map(|&dim| {
                DenseNet::new(
                    dim,
                    &[
                        (cfg.observer_hidden, Activation::Tanh),
                        (cfg.observer_hidden, Activation::Tanh),
                        (cfg.observer_out, Activation::Tanh),
                    ],
                    cfg.adam.clone(),
                    rng,
                )
            })
            .collect();
        let features = cfg.feature_dim();
        let policies = (0..cfg.n_policies)
            .map(|_| {
                DenseNet::new(
                    features,
                    &[
                        (cfg.policy_hidden, Activation::Tanh),
                        (cfg.action_dim, Activation::Linear),
                    ],
                    cfg.adam.clone(),
                    rng,
                )
            })
            .collect();
        let coordinator = DenseNet::new(
            features,
            &[
                (cfg.coordinator_hidden, Activation::Tanh),
                (cfg.n_policies, Activation::Softmax),
            ],
            cfg.adam.clone(),
            rng,
        );
        let mapper = ParamTanhLayer::new(cfg.action_dim, cfg.adam.clone());
        Self {
            observers,
            policies,
            coordinator,
            mapper,
            group_dims: cfg.group_dims.clone(),
            observer_out: cfg.observer_out,
            cache: None,
        }
    }

    pub(crate) fn from_parts(
        observers: Vec<DenseNet>,
        policies: Vec<DenseNet>,
        coordinator: DenseNet,
        mapper: ParamTanhLayer,
        group_dims: Vec<usize>,
        observer_out: usize,
    ) -> Self {
        Self {
            observers,
            policies,
            coordinator,
            mapper,
            group_dims,
            observer_out,
            cache: None,
        }
    }

    pub fn group_dims(&self) -> &[usize] {
        &self.group_dims
    }

    pub fn obs_dim(&self) -> usize {
        self.group_dims.iter().sum()
    }

    pub fn action_dim(&self) -> usize {
        self.mapper.width()
    }

    pub fn n_policies(&self) -> usize {
        self.policies.len()
    }

    pub fn observers(&self) -> &[DenseNet] {
        &self.observers
    }

    pub fn policies(&self) -> &[DenseNet] {
        &self.policies
    }

    pub fn policies_mut(&mut self) -> &mut [DenseNet] {
        &mut self.policies
    }

    pub fn coordinator(&self) -> &DenseNet {
        &self.coordinator
    }

    pub fn coordinator_mut(&mut self) -> &mut DenseNet {
        &mut self.coordinator
    }

    pub fn mapper(&self) -> &ParamTanhLayer {
        &self.mapper
    }

    fn split<'a>(&self, obs: &'a [f64]) -> Vec<&'a [f64]> {
        assert_eq!(obs.len(), self.obs_dim(), "observation width mismatch");
        let mut groups = Vec::with_capacity(self.group_dims.len());
        let mut offset = 0;
        for &dim in &self.group_dims {
            groups.push(&obs[offset..offset + dim]);
            offset += dim;
        }
        groups
    }

    fn mix(per_policy: &[Vec<f64>], weights: &[f64], action_dim: usize) -> Vec<f64> {
        let mut raw = vec![0.0; action_dim];
        for (k, p) in per_policy.iter().enumerate() {
            let w = weights[k];
            for (r, &v) in raw.iter_mut().zip(p) {
                *r += w * v;
            }
        }
        raw
    }

    /// Pure evaluation through a shared reference; no caches touched.
    pub fn infer(&self, obs: &[f64]) -> ActorOutput {
        let groups = self.split(obs);
        let mut features = Vec::with_capacity(self.observer_out * self.observers.len());
        for (net, group) in self.observers.iter().zip(&groups) {
            features.extend(net.infer(group));
        }
        let weights = self.coordinator.infer(&features);
        let per_policy: Vec<Vec<f64>> = self.policies.iter().map(|p| p.infer(&features)).collect();
        let raw = Self::mix(&per_policy, &weights, self.action_dim());
        let action = self.mapper.infer(&raw);
        ActorOutput {
            action,
            weights,
            per_policy,
        }
    }

    /// Training-path evaluation: caches everything `backward` needs.
    pub fn forward(&mut self, obs: &[f64]) -> ActorOutput {
        let groups: Vec<Vec<f64>> = self.split(obs).into_iter().map(|g| g.to_vec()).collect();
        let mut features = Vec::with_capacity(self.observer_out * self.observers.len());
        for (net, group) in self.observers.iter_mut().zip(&groups) {
            features.extend(net.forward(group));
        }
        let weights = self.coordinator.forward(&features);
        let per_policy: Vec<Vec<f64>> = self
            .policies
            .iter_mut()
            .map(|p| p.forward(&features))
            .collect();
        let raw = Self::mix(&per_policy, &weights, self.action_dim());
        let action = self.mapper.forward(&raw);
        self.cache = Some(ActorCache {
            weights: weights.clone(),
            per_policy: per_policy.clone(),
        });
        ActorOutput {
            action,
            weights,
            per_policy,
        }
    }

    /// Accumulates dLoss/dAction into every trainable sub-network. Gradient
    /// flows through locked sub-networks, so observers still receive signal
    /// through locked policies.
    pub fn backward(&mut self, d_action: &[f64]) -> NnResult<()> {
        assert_eq!(d_action.len(), self.action_dim(), "gradient width mismatch");
        let cache = self
            .cache
            .take()
            .ok_or(nncore::NnError::BackwardBeforeForward)?;

        let d_raw = self.mapper.backward(d_action)?;

        let feature_dim = self.observer_out * self.observers.len();
        let mut d_features = vec![0.0; feature_dim];

        for (k, policy) in self.policies.iter_mut().enumerate() {
            let w = cache.weights[k];
            let d_pk: Vec<f64> = d_raw.iter().map(|&g| g * w).collect();
            let df = policy.backward(&d_pk)?;
            for (acc, v) in d_features.iter_mut().zip(df) {
                *acc += v;
            }
        }

        let d_weights: Vec<f64> = cache
            .per_policy
            .iter()
            .map(|p| p.iter().zip(&d_raw).map(|(&v, &g)| v * g).sum())
            .collect();
        let df = self.coordinator.backward(&d_weights)?;
        for (acc, v) in d_features.iter_mut().zip(df) {
            *acc += v;
        }

        let mut offset = 0;
        for net in self.observers.iter_mut() {
            let chunk = &d_features[offset..offset + self.observer_out];
            net.backward(chunk)?;
            offset += self.observer_out;
        }
        Ok(())
    }

    /// Applies a trainability configuration to all sub-networks.
    pub fn apply_locks(&mut self, locks: &LockSet) {
        assert_eq!(locks.policies.len(), self.policies.len());
        for net in self.observers.iter_mut() {
            net.set_trainable(locks.observers);
        }
        for (net, &t) in self.policies.iter_mut().zip(&locks.policies) {
            net.set_trainable(t);
        }
        self.coordinator.set_trainable(locks.coordinator);
        self.mapper.set_trainable(locks.mapper);
    }

    pub fn set_trainable(&mut self, trainable: bool) {
        let n = self.policies.len();
        self.apply_locks(&if trainable {
            LockSet::all_trainable(n)
        } else {
            LockSet::all_locked(n)
        });
    }

    /// Steps every currently-trainable sub-network; locked sub-networks keep
    /// their optimizer step counts so bias correction tracks actual updates.
    pub fn adam_step(&mut self, batch: usize) {
        for net in self.observers.iter_mut() {
            if net.trainable() {
                net.adam_step(batch);
            }
        }
        for net in self.policies.iter_mut() {
            if net.trainable() {
                net.adam_step(batch);
            }
        }
        if self.coordinator.trainable() {
            self.coordinator.adam_step(batch);
        }
        if self.mapper.trainable() {
            self.mapper.adam_step(batch);
        }
    }

    pub fn zero_grads(&mut self) {
        for net in self.observers.iter_mut() {
            net.zero_grads();
        }
        for net in self.policies.iter_mut() {
            net.zero_grads();
        }
        self.coordinator.zero_grads();
        self.mapper.zero_grads();
    }

    pub fn soft_update_from(&mut self, online: &ModularActor, tau: f64) {
        for (t, o) in self.observers.iter_mut().zip(&online.observers) {
            t.soft_update_from(o, tau);
        }
        for (t, o) in self.policies.iter_mut().zip(&online.policies) {
            t.soft_update_from(o, tau);
        }
        self.coordinator.soft_update_from(&online.coordinator, tau);
        self.mapper.soft_update_from(&online.mapper, tau);
    }

    /// All parameters: observers, then policies, then coordinator, then the
    /// output map.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::new();
        for net in &self.observers {
            p.extend(net.params());
        }
        for net in &self.policies {
            p.extend(net.params());
        }
        p.extend(self.coordinator.params());
        p.extend(self.mapper.params());
        p
    }

    pub fn grads(&self) -> Vec<f64> {
        let mut g = Vec::new();
        for net in &self.observers {
            g.extend(net.grads());
        }
        for net in &self.policies {
            g.extend(net.grads());
        }
        g.extend(self.coordinator.grads());
        g.extend(self.mapper.grads());
        g
    }

    pub fn set_params(&mut self, params: &[f64]) {
        let mut offset = 0;
        for net in self.observers.iter_mut() {
            let n = net.param_count();
            net.set_params(&params[offset..offset + n]);
            offset += n;
        }
        for net in self.policies.iter_mut() {
            let n = net.param_count();
            net.set_params(&params[offset..offset + n]);
            offset += n;
        }
        let n = self.coordinator.param_count();
        self.coordinator.set_params(&params[offset..offset + n]);
        offset += n;
        self.mapper.set_params(&params[offset..]);
    }

    pub fn param_count(&self) -> usize {
        self.params().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::AgentConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn mini_config() -> AgentConfig {
        AgentConfig {
            group_dims: vec![2, 3],
            observer_hidden: 4,
            observer_out: 4,
            n_policies: 2,
            policy_hidden: 4,
            coordinator_hidden: 4,
            action_dim: 3,
            critic_hidden: vec![4],
            adam: nncore::AdamConfig::default(),
        }
    }

    fn mini_actor(seed: u64) -> ModularActor {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        ModularActor::new(&mini_config(), &mut rng)
    }

    /// Zeroing the coordinator's output layer forces uniform weights.
    fn force_uniform_weights(actor: &mut ModularActor) {
        let last = actor.coordinator.layers().len() - 1;
        let n = actor.coordinator.layers()[last].param_count();
        actor.coordinator.layers_mut()[last].set_params(&vec![0.0; n]);
    }

    #[test]
    fn identical_policies_under_uniform_weights_equal_single_policy() {
        let mut actor = mini_actor(1);
        force_uniform_weights(&mut actor);
        let template = actor.policies()[0].params();
        for k in 1..actor.n_policies() {
            actor.policies_mut()[k].set_params(&template);
        }
        let obs = [0.3, -0.4, 0.2, 0.9, -1.0];
        let out = actor.infer(&obs);
        for w in &out.weights {
            assert!((w - 0.5).abs() < 1e-15);
        }
        let single = actor.mapper().infer(&out.per_policy[0]);
        for (a, s) in out.action.iter().zip(&single) {
            assert!((a - s).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_policy_outputs_cancel_to_half() {
        let mut cfg = mini_config();
        cfg.action_dim = 1;
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let mut actor = ModularActor::new(&cfg, &mut rng);
        force_uniform_weights(&mut actor);
        // zero the policy nets except opposing output biases ±x
        let x = 0.8;
        for (k, sign) in [(0usize, 1.0f64), (1, -1.0)] {
            let n = actor.policies()[k].param_count();
            let mut p = vec![0.0; n];
            let last = n - 1; // final layer bias (single output)
            p[last] = sign * x;
            actor.policies_mut()[k].set_params(&p);
        }
        let out = actor.infer(&[0.1, 0.2, 0.3, 0.4, 0.5]);
        assert!((out.per_policy[0][0] - x).abs() < 1e-15);
        assert!((out.per_policy[1][0] + x).abs() < 1e-15);
        assert!((out.action[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn saturated_softmax_selects_one_policy() {
        let mut actor = mini_actor(3);
        // zero last coordinator layer, then put a +20 logit gap on policy 1
        let last = actor.coordinator.layers().len() - 1;
        let n = actor.coordinator.layers()[last].param_count();
        let mut p = vec![0.0; n];
        let out_dim = actor.n_policies();
        p[n - out_dim + 1] = 20.0; // bias of logit 1
        actor.coordinator.layers_mut()[last].set_params(&p);

        let obs = [0.7, -0.1, 0.4, -0.6, 0.2];
        let out = actor.infer(&obs);
        assert!(out.weights[1] > 1.0 - 1e-8);
        let selected = actor.mapper().infer(&out.per_policy[1]);
        for (a, s) in out.action.iter().zip(&selected) {
            assert!((a - s).abs() < 1e-6);
        }
    }

    #[test]
    fn fully_locked_actor_accumulates_no_gradient() {
        let mut actor = mini_actor(4);
        actor.set_trainable(false);
        actor.forward(&[0.1, 0.2, 0.3, 0.4, 0.5]);
        actor.backward(&[1.0, -1.0, 0.5]).unwrap();
        assert!(actor.grads().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn single_trainable_policy_leaves_others_bit_identical() {
        let mut actor = mini_actor(5);
        let mut locks = LockSet::all_trainable(2);
        locks.policies = vec![false, true];
        actor.apply_locks(&locks);
        let frozen: Vec<u64> = actor.policies()[0].params().iter().map(|p| p.to_bits()).collect();
        let live = actor.policies()[1].params();
        for _ in 0..4 {
            actor.forward(&[0.1, -0.2, 0.3, 0.4, -0.5]);
            actor.backward(&[1.0, 0.5, -0.25]).unwrap();
            actor.adam_step(1);
        }
        let frozen_after: Vec<u64> =
            actor.policies()[0].params().iter().map(|p| p.to_bits()).collect();
        assert_eq!(frozen, frozen_after);
        assert_ne!(live, actor.policies()[1].params());
    }

    #[test]
    fn backward_without_forward_is_usage_error() {
        let mut actor = mini_actor(6);
        assert!(actor.backward(&[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn gradients_match_finite_differences_on_miniature_config() {
        let mut actor = mini_actor(7);
        let obs = [0.3, -0.8, 0.5, 0.1, -0.2];
        let coeffs = [1.0, -0.6, 0.4];
        let loss = |a: &ModularActor| -> f64 {
            a.infer(&obs)
                .action
                .iter()
                .zip(&coeffs)
                .map(|(y, c)| y * c)
                .sum()
        };
        actor.forward(&obs);
        actor.zero_grads();
        actor.backward(&coeffs).unwrap();
        let analytic = actor.grads();
        let params = actor.params();
        let h = 1e-5;
        for i in 0..params.len() {
            let mut p = params.clone();
            p[i] += h;
            actor.set_params(&p);
            let lp = loss(&actor);
            p[i] -= 2.0 * h;
            actor.set_params(&p);
            let lm = loss(&actor);
            actor.set_params(&params);
            let numeric = (lp - lm) / (2.0 * h);
            let denom = analytic[i].abs().max(numeric.abs()).max(1e-6);
            assert!(
                (analytic[i] - numeric).abs() / denom < 1e-4,
                "param {i}: analytic {} numeric {numeric}",
                analytic[i]
            );
        }
    }

    #[test]
    fn action_range_and_weight_simplex_over_random_inputs() {
        use rand::Rng;
        let actor = mini_actor(8);
        let mut rng = ChaCha12Rng::seed_from_u64(80);
        for _ in 0..10_000 {
            let obs: Vec<f64> = (0..5).map(|_| rng.random_range(-3.0..3.0)).collect();
            let out = actor.infer(&obs);
            assert!(out.action.iter().all(|&a| a > 0.0 && a < 1.0));
            let sum: f64 = out.weights.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
            assert!(out.weights.iter().all(|&w| (0.0..=1.0).contains(&w)));
        }
    }

    #[test]
    fn action_recomposes_from_returned_pieces() {
        use rand::Rng;
        let actor = mini_actor(9);
        let mut rng = ChaCha12Rng::seed_from_u64(90);
        for _ in 0..200 {
            let obs: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
            let out = actor.infer(&obs);
            let raw = ModularActor::mix(&out.per_policy, &out.weights, actor.action_dim());
            let recomposed = actor.mapper().infer(&raw);
            for (a, r) in out.action.iter().zip(&recomposed) {
                assert!((a - r).abs() < 1e-12);
            }
        }
    }
}
