//! Reduced planar (sagittal) musculoskeletal standing environment.
//!
//! Seven rigid segments (torso+pelvis, two thighs, two shanks, two feet),
//! nine degrees of freedom (pelvis x/y/rotation, hips, knees, ankles),
//! twelve antagonistic torque muscles with first-order activation dynamics,
//! Hunt-Crossley ground contact at heel and toe, grouped observations, and a
//! reward that pays for keeping both feet loaded and the pelvis at its
//! reference standing height.
//!
//! Everything is deterministic: the same configuration and action sequence
//! reproduce bit-identical trajectories.

mod config;
mod contact;
mod dynamics;
mod env;
mod muscles;
mod reward;

pub use config::{BodyParams, Draw, EnvConfig, JointId, MuscleRole, MuscleSpec};
pub use contact::{ground_contact, ContactParams};
pub use env::{EnvState, ObservationGroups, StandingEnv, StepInfo, StepResult, GROUP_DIMS};
pub use muscles::activation_dynamics;
pub use reward::{compute_reward, RewardInputs, RewardParts, PENALTY_NORMALIZER, W_TARGET_DIVISOR};

/// Number of muscle-like actuators (the action width).
pub const N_MUSCLES: usize = 12;

#[derive(Debug, thiserror::Error)]
pub enum EnvError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("non-finite excitation input")]
    NonFiniteAction,
}

pub type Result<T> = std::result::Result<T, EnvError>;
