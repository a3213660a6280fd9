//! Online/target actor-critic pair with soft updates and bit-exact
//! checkpointing.

use std::io::{Read, Write};

use nncore::snapshot as snap;
use nncore::NnError;
use rand::Rng;

use crate::{AcError, AgentConfig, Critic, ModularActor, Result};

const AGENT_TAG: &[u8; 4] = b"ACPR";
const FORMAT_VERSION: u32 = 1;

/// Online networks plus structurally identical target twins. Targets start
/// as exact copies and only move through `soft_update`.
#[derive(Debug, Clone)]
pub struct Agent {
    pub actor: ModularActor,
    pub critic: Critic,
    pub target_actor: ModularActor,
    pub target_critic: Critic,
    config: AgentConfig,
}

impl Agent {
    pub fn new<R: Rng + ?Sized>(config: AgentConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let actor = ModularActor::new(&config, rng);
        let critic = Critic::new(&config, rng);
        let target_actor = actor.clone();
        let target_critic = critic.clone();
        Ok(Self {
            actor,
            critic,
            target_actor,
            target_critic,
            config,
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    /// θ′ ← τ·θ + (1−τ)·θ′ for every target parameter, uniformly and
    /// regardless of any trainability locks on the online side.
    pub fn soft_update(&mut self, tau: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(AcError::Config(format!("tau {tau} outside [0, 1]")));
        }
        self.target_actor.soft_update_from(&self.actor, tau);
        self.target_critic.soft_update_from(&self.critic, tau);
        Ok(())
    }

    /// Serializes shapes, parameters, Adam moments and step counts.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        snap::write_tag(w, AGENT_TAG)?;
        snap::write_u32(w, FORMAT_VERSION)?;
        write_config(w, &self.config)?;
        write_actor(w, &self.actor)?;
        snap::write_net(w, self.critic.net())?;
        write_actor(w, &self.target_actor)?;
        snap::write_net(w, self.target_critic.net())?;
        Ok(())
    }

    /// Reconstructs an agent from a snapshot stream.
    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        snap::expect_tag(r, AGENT_TAG)?;
        let version = snap::read_u32(r)?;
        if version != FORMAT_VERSION {
            return Err(
                NnError::Integrity(format!("unsupported snapshot version {version}")).into(),
            );
        }
        let config = read_config(r)?;
        let actor = read_actor(r, &config)?;
        let critic = Critic::from_net(snap::read_net(r)?, config.obs_dim(), config.action_dim);
        let target_actor = read_actor(r, &config)?;
        let target_critic =
            Critic::from_net(snap::read_net(r)?, config.obs_dim(), config.action_dim);
        let agent = Self {
            actor,
            critic,
            target_actor,
            target_critic,
            config,
        };
        agent.check_shapes()?;
        Ok(agent)
    }

    /// Replaces this agent with the snapshot, provided every dimension
    /// matches the current configuration.
    pub fn restore<R: Read>(&mut self, r: &mut R) -> Result<()> {
        let loaded = Self::read_from(r)?;
        if !self.config.dims_match(&loaded.config) {
            return Err(NnError::Integrity(format!(
                "snapshot dims {:?} do not match agent dims {:?}",
                loaded.config.group_dims, self.config.group_dims
            ))
            .into());
        }
        *self = loaded;
        Ok(())
    }

    fn check_shapes(&self) -> Result<()> {
        let cfg = &self.config;
        for (net, &dim) in self.actor.observers().iter().zip(&cfg.group_dims) {
            if net.in_dim() != dim || net.out_dim() != cfg.observer_out {
                return Err(NnError::Integrity("observer shape mismatch".into()).into());
            }
        }
        if self.actor.n_policies() != cfg.n_policies {
            return Err(NnError::Integrity(format!(
                "snapshot has {} policies, config expects {}",
                self.actor.n_policies(),
                cfg.n_policies
            ))
            .into());
        }
        for net in self.actor.policies() {
            if net.in_dim() != cfg.feature_dim() || net.out_dim() != cfg.action_dim {
                return Err(NnError::Integrity("policy shape mismatch".into()).into());
            }
        }
        if self.actor.coordinator().out_dim() != cfg.n_policies
            || self.actor.action_dim() != cfg.action_dim
            || self.critic.net().in_dim() != cfg.obs_dim() + cfg.action_dim
        {
            return Err(NnError::Integrity("actor/critic shape mismatch".into()).into());
        }
        Ok(())
    }
}

fn write_config<W: Write>(w: &mut W, cfg: &AgentConfig) -> Result<()> {
    snap::write_tag(w, b"ACFG")?;
    snap::write_u32(w, cfg.group_dims.len() as u32)?;
    for &d in &cfg.group_dims {
        snap::write_u32(w, d as u32)?;
    }
    snap::write_u32(w, cfg.observer_hidden as u32)?;
    snap::write_u32(w, cfg.observer_out as u32)?;
    snap::write_u32(w, cfg.n_policies as u32)?;
    snap::write_u32(w, cfg.policy_hidden as u32)?;
    snap::write_u32(w, cfg.coordinator_hidden as u32)?;
    snap::write_u32(w, cfg.action_dim as u32)?;
    snap::write_u32(w, cfg.critic_hidden.len() as u32)?;
    for &d in &cfg.critic_hidden {
        snap::write_u32(w, d as u32)?;
    }
    snap::write_adam(w, &cfg.adam)?;
    Ok(())
}

fn read_config<R: Read>(r: &mut R) -> Result<AgentConfig> {
    snap::expect_tag(r, b"ACFG")?;
    let n_groups = snap::read_u32(r)? as usize;
    let mut group_dims = Vec::with_capacity(n_groups);
    for _ in 0..n_groups {
        group_dims.push(snap::read_u32(r)? as usize);
    }
    let observer_hidden = snap::read_u32(r)? as usize;
    let observer_out = snap::read_u32(r)? as usize;
    let n_policies = snap::read_u32(r)? as usize;
    let policy_hidden = snap::read_u32(r)? as usize;
    let coordinator_hidden = snap::read_u32(r)? as usize;
    let action_dim = snap::read_u32(r)? as usize;
    let n_critic = snap::read_u32(r)? as usize;
    let mut critic_hidden = Vec::with_capacity(n_critic);
    for _ in 0..n_critic {
        critic_hidden.push(snap::read_u32(r)? as usize);
    }
    let adam = snap::read_adam(r)?;
    let cfg = AgentConfig {
        group_dims,
        observer_hidden,
        observer_out,
        n_policies,
        policy_hidden,
        coordinator_hidden,
        action_dim,
        critic_hidden,
        adam,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn write_actor<W: Write>(w: &mut W, actor: &ModularActor) -> Result<()> {
    snap::write_tag(w, b"MACT")?;
    snap::write_u32(w, actor.observers().len() as u32)?;
    for net in actor.observers() {
        snap::write_net(w, net)?;
    }
    snap::write_u32(w, actor.policies().len() as u32)?;
    for net in actor.policies() {
        snap::write_net(w, net)?;
    }
    snap::write_net(w, actor.coordinator())?;
    snap::write_param_tanh(w, actor.mapper())?;
    Ok(())
}

fn read_actor<R: Read>(r: &mut R, cfg: &AgentConfig) -> Result<ModularActor> {
    snap::expect_tag(r, b"MACT")?;
    let n_obs = snap::read_u32(r)? as usize;
    let mut observers = Vec::with_capacity(n_obs);
    for _ in 0..n_obs {
        observers.push(snap::read_net(r)?);
    }
    let n_pol = snap::read_u32(r)? as usize;
    let mut policies = Vec::with_capacity(n_pol);
    for _ in 0..n_pol {
        policies.push(snap::read_net(r)?);
    }
    let coordinator = snap::read_net(r)?;
    let mapper = snap::read_param_tanh(r)?;
    Ok(ModularActor::from_parts(
        observers,
        policies,
        coordinator,
        mapper,
        cfg.group_dims.clone(),
        cfg.observer_out,
    ))
}
