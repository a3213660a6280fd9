//! Modular actor-critic networks: a bank of per-group observation encoders
//! feeding a bank of policies plus a softmax coordinator, with a learnable
//! tanh output map squashing the mixed action into (0,1); and a plain MLP
//! critic over concatenated observation/action. Target twins support DDPG
//! soft updates.

mod actor;
mod agent;
mod critic;

pub use actor::{ActorOutput, LockSet, ModularActor};
pub use agent::Agent;
pub use critic::Critic;

use nncore::AdamConfig;

#[derive(Debug, thiserror::Error)]
pub enum AcError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Nn(#[from] nncore::NnError),
}

pub type Result<T> = std::result::Result<T, AcError>;

/// Shape and optimizer settings for one actor-critic pair.
///
/// `group_dims` fixes the observation grouping the observer bank consumes;
/// the action dimension is the number of excitation channels produced.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig {
    pub group_dims: Vec<usize>,
    pub observer_hidden: usize,
    pub observer_out: usize,
    pub n_policies: usize,
    pub policy_hidden: usize,
    pub coordinator_hidden: usize,
    pub action_dim: usize,
    pub critic_hidden: Vec<usize>,
    pub adam: AdamConfig,
}

impl AgentConfig {
    /// The full-scale architecture: six observers over the 169-value
    /// observation split (42/42/21/21/21/22), eight policies, 22 actions,
    /// and a 191-input critic with three hidden layers of 256.
    pub fn full_scale() -> Self {
        Self {
            group_dims: vec![42, 42, 21, 21, 21, 22],
            observer_hidden: 64,
            observer_out: 64,
            n_policies: 8,
            policy_hidden: 256,
            coordinator_hidden: 256,
            action_dim: 22,
            critic_hidden: vec![256, 256, 256],
            adam: AdamConfig::default(),
        }
    }

    /// Same structure sized for the reduced planar environment
    /// (observation groups 14/7/7/7/7/12, 12 muscles).
    pub fn reduced() -> Self {
        Self {
            group_dims: vec![14, 7, 7, 7, 7, 12],
            observer_hidden: 64,
            observer_out: 64,
            n_policies: 8,
            policy_hidden: 256,
            coordinator_hidden: 256,
            action_dim: 12,
            critic_hidden: vec![256, 256, 256],
            adam: AdamConfig::default(),
        }
    }

    /// Total (flat) observation width.
    pub fn obs_dim(&self) -> usize {
        self.group_dims.iter().sum()
    }

    /// Width of the concatenated observer features.
    pub fn feature_dim(&self) -> usize {
        self.observer_out * self.group_dims.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.group_dims.is_empty() || self.group_dims.iter().any(|&d| d == 0) {
            return Err(AcError::Config("observation groups must be non-empty".into()));
        }
        if self.n_policies == 0 || self.action_dim == 0 {
            return Err(AcError::Config("need at least one policy and one action".into()));
        }
        if self.observer_hidden == 0 || self.observer_out == 0 {
            return Err(AcError::Config("observer widths must be > 0".into()));
        }
        if !self.adam.validate() {
            return Err(AcError::Config("invalid Adam settings".into()));
        }
        Ok(())
    }

    /// True when every width that determines parameter shapes agrees.
    pub fn dims_match(&self, other: &AgentConfig) -> bool {
        self.group_dims == other.group_dims
            && self.observer_hidden == other.observer_hidden
            && self.observer_out == other.observer_out
            && self.n_policies == other.n_policies
            && self.policy_hidden == other.policy_hidden
            && self.coordinator_hidden == other.coordinator_hidden
            && self.action_dim == other.action_dim
            && self.critic_hidden == other.critic_hidden
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_scale_dimensions_line_up() {
        let cfg = AgentConfig::full_scale();
        assert_eq!(cfg.obs_dim(), 169);
        assert_eq!(cfg.feature_dim(), 384);
        assert_eq!(cfg.obs_dim() + cfg.action_dim, 191);
    }

    #[test]
    fn reduced_dimensions_line_up() {
        let cfg = AgentConfig::reduced();
        assert_eq!(cfg.obs_dim(), 54);
        assert_eq!(cfg.feature_dim(), 384);
        assert_eq!(cfg.action_dim, 12);
    }
}
