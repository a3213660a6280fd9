//! DDPG training: replay buffer, TD targets, the iterative round-robin
//! schedule with sub-network locking, coordinator refinement, exploration
//! noise and strict/relaxed checkpoint selection.

mod checkpoint;
mod env_bridge;
mod replay;
mod schedule;
mod trainer;

pub use checkpoint::{CheckpointMeta, CheckpointSelector, CheckpointSink, DiscardCheckpoints,
                     MemorySink, SelectionMode};
pub use replay::{Experience, ReplayBuffer};
pub use schedule::{ScheduleKind, TrainingSchedule};
pub use trainer::{actor_update, critic_update, explore, td_target, train, write_log_csv,
                  DdpgConfig, EpisodeRow, TrainingLog};

#[derive(Debug, thiserror::Error)]
pub enum DdpgError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Agent(#[from] actorcritic::AcError),
    #[error("checkpoint sink: {0}")]
    Sink(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DdpgError>;

/// The environment surface the trainer needs: flat observations in the
/// actor's group order, one reward and a done flag per step.
pub trait Environment {
    fn group_dims(&self) -> Vec<usize>;
    fn action_dim(&self) -> usize;
    fn reset(&mut self) -> Vec<f64>;
    fn step(&mut self, action: &[f64]) -> EnvStep;
}

#[derive(Debug, Clone)]
pub struct EnvStep {
    pub obs: Vec<f64>,
    pub reward: f64,
    pub done: bool,
}
