//! Multi-target track-before-detect particle filtering for superpositional
//! sensor signals.
//!
//! The crate tracks an unknown, time-varying number of targets directly
//! from raw sensor readings whose likelihood depends on the state only
//! through the sum of the targets' signal contributions. It provides:
//!
//! - [`state`]: the hybrid state (continuous kinematics plus on/off flags
//!   for `n_max` target models) and its factorized birth/death transition;
//! - [`observation`]: the superpositional observation model, with Gaussian
//!   and uniform additive noise, real or complex channels, and the RF
//!   link-attenuation sensor model;
//! - [`filter`]: the two-stage auxiliary particle filter with residual
//!   resampling;
//! - [`estimate`]: activity probabilities and conditional MMSE positions;
//! - [`metrics`]: the OSPA distance with an exact assignment solver;
//! - [`sim`]: the RF tomography scenario generator with SNR calibration;
//! - [`experiment`], [`config`], [`plot`]: trials, SNR sweeps, TOML
//!   configuration, CSV reports and SVG figures used by the `tbdpf` binary.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod assignment;
pub mod config;
pub mod error;
pub mod estimate;
pub mod experiment;
pub mod filter;
pub mod geometry;
pub mod metrics;
pub mod observation;
pub mod plot;
pub mod random;
pub mod resample;
pub mod sim;
pub mod state;

pub use error::{Error, Result};
pub use estimate::{extract, TargetEstimate, TrackEstimate};
pub use filter::{initialize, step, FilterConfig, Particle, ParticleSet};
pub use geometry::{Point, Region};
pub use metrics::{ospa, OspaParams, PointSet};
pub use observation::{Observation, SummedSignal, SuperpositionalModel};
pub use resample::{residual_resample, ResamplingPolicy};
pub use state::{ActivityFlag, BirthDeathMatrix, ContinuousState, MultiTargetState, TransitionModel};
