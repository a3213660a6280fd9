//! Q-value critic over concatenated observation and action.

use nncore::{Activation, DenseNet, Result as NnResult};
use rand::Rng;

use crate::AgentConfig;

#[derive(Debug, Clone)]
pub struct Critic {
    net: DenseNet,
    obs_dim: usize,
    action_dim: usize,
}

impl Critic {
    pub fn new<R: Rng + ?Sized>(cfg: &AgentConfig, rng: &mut R) -> Self {
        let mut spec: Vec<(usize, Activation)> = cfg
            .critic_hidden
            .iter()
            .map(|&w| (w, Activation::Tanh))
            .collect();
        spec.push((1, Activation::Linear));
        let net = DenseNet::new(cfg.obs_dim() + cfg.action_dim, &spec, cfg.adam.clone(), rng);
        Self {
            net,
            obs_dim: cfg.obs_dim(),
            action_dim: cfg.action_dim,
        }
    }

    pub(crate) fn from_net(net: DenseNet, obs_dim: usize, action_dim: usize) -> Self {
        Self {
            net,
            obs_dim,
            action_dim,
        }
    }

    pub fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    pub fn action_dim(&self) -> usize {
        self.action_dim
    }

    pub fn net(&self) -> &DenseNet {
        &self.net
    }

    pub fn net_mut(&mut self) -> &mut DenseNet {
        &mut self.net
    }

    fn concat(&self, obs: &[f64], action: &[f64]) -> Vec<f64> {
        assert_eq!(obs.len(), self.obs_dim, "observation width mismatch");
        assert_eq!(action.len(), self.action_dim, "action width mismatch");
        let mut x = Vec::with_capacity(obs.len() + action.len());
        x.extend_from_slice(obs);
        x.extend_from_slice(action);
        x
    }

    pub fn infer(&self, obs: &[f64], action: &[f64]) -> f64 {
        self.net.infer(&self.concat(obs, action))[0]
    }

    pub fn forward(&mut self, obs: &[f64], action: &[f64]) -> f64 {
        self.net.forward(&self.concat(obs, action))[0]
    }

    /// Returns (dQ/dobs, dQ/daction) scaled by the upstream gradient.
    pub fn backward(&mut self, d_q: f64) -> NnResult<(Vec<f64>, Vec<f64>)> {
        let d_input = self.net.backward(&[d_q])?;
        let d_obs = d_input[..self.obs_dim].to_vec();
        let d_action = d_input[self.obs_dim..].to_vec();
        Ok((d_obs, d_action))
    }

    pub fn adam_step(&mut self, batch: usize) {
        self.net.adam_step(batch);
    }

    pub fn zero_grads(&mut self) {
        self.net.zero_grads();
    }

    pub fn set_trainable(&mut self, trainable: bool) {
        self.net.set_trainable(trainable);
    }

    pub fn trainable(&self) -> bool {
        self.net.trainable()
    }

    pub fn soft_update_from(&mut self, online: &Critic, tau: f64) {
        self.net.soft_update_from(&online.net, tau);
    }

    pub fn params(&self) -> Vec<f64> {
        self.net.params()
    }

    pub fn set_params(&mut self, params: &[f64]) {
        self.net.set_params(params);
    }
}
