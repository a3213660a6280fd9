//! Minimal feed-forward neural-network engine: dense layers with tanh /
//! softmax / linear activations, a learnable output squashing layer,
//! reverse-mode gradients, Adam with per-layer trainability masks, and a
//! bit-exact binary snapshot format.
//!
//! All math is in `f64`. A network instance is single-threaded; independent
//! instances share nothing and may live on different threads.

mod activation;
mod adam;
mod layer;
mod net;
mod param_tanh;
pub mod snapshot;

pub use activation::{softmax, Activation};
pub use adam::AdamConfig;
pub use layer::DenseLayer;
pub use net::DenseNet;
pub use param_tanh::ParamTanhLayer;

/// Errors surfaced by the network engine.
#[derive(Debug, thiserror::Error)]
pub enum NnError {
    /// Backward was called without a cached forward pass.
    #[error("backward called before forward")]
    BackwardBeforeForward,
    /// A snapshot stream is malformed or does not match the expected shapes.
    #[error("snapshot integrity: {0}")]
    Integrity(String),
    /// I/O failure while reading or writing a snapshot.
    #[error("snapshot io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NnError>;
