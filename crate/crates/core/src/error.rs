use thiserror::Error;

/// Errors produced by the filtering, simulation and evaluation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// Every first-stage weight of a filter step was zero.
    #[error(
        "likelihood collapsed at time step {time_index}: all {n_particles} first-stage weights are zero"
    )]
    DegenerateLikelihood { time_index: u64, n_particles: usize },

    #[error("weights are not normalized (sum = {sum})")]
    Unnormalized { sum: f64 },

    #[error("target index {index} out of range for {len} target models")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("observation model has no noise sampler")]
    MissingNoiseSampler,

    #[error("signal history contains no power; cannot calibrate noise for a requested SNR")]
    ZeroSignal,

    #[error("assignment needs rows <= columns, got {rows}x{cols}")]
    AssignmentShape { rows: usize, cols: usize },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
