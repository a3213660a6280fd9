//! Evaluation protocols for trained standing agents: seeded episodes
//! measuring standing duration, observation-noise ladders, drop-height and
//! forward-incline sweeps, and per-step coordination/activation traces,
//! aggregated to CSV and SVG.

mod plot;
mod report;
mod runner;
mod scenario;

pub use plot::{line_plot, PlotSeries};
pub use report::{quantile, AggregateRow, EvalReport, EvalRow};
pub use runner::{drop_sweep, incline_sweep, noise_sweep, run_eval, trace, TraceLog, TraceRow};
pub use scenario::{perturb_observation, EvalScenario};

/// The five test seeds used throughout the evaluation protocols.
pub const DEFAULT_SEEDS: [u64; 5] = [10638, 12190, 12944, 13734, 14798];

/// Noise ladder: zero plus a doubling ladder up to 0.64.
pub const NOISE_LADDER: [f64; 7] = [0.0, 0.02, 0.04, 0.08, 0.16, 0.32, 0.64];

/// Drop-height grid in meters, 2 cm steps over [2, 10] cm.
pub const DROP_GRID: [f64; 5] = [0.02, 0.04, 0.06, 0.08, 0.10];

/// Forward-inclination means in degrees.
pub const INCLINE_MEANS: [f64; 3] = [-2.5, 0.0, 2.5];

/// Default evaluation episode cap: 6000 steps = 60 s at dt = 0.01.
pub const DEFAULT_EVAL_STEPS: u32 = 6000;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Env(#[from] biomech_env::EnvError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, EvalError>;
