//! Deterministic random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream keyed by the
//! run seed and addressed by `(time, purpose, index)`. Two computations that
//! ask for the same address get the same numbers, no matter which thread
//! runs them or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// What a stream is used for. Distinct purposes never share numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    /// Initial particle draws, indexed by particle.
    Initial = 0,
    /// First-stage (auxiliary) transition draws, indexed by particle.
    Auxiliary = 1,
    /// Parent selection; index is unused.
    Resample = 2,
    /// Second-stage transition draws, indexed by resampled slot.
    Redraw = 3,
    /// Ground-truth trajectories, indexed by truth target.
    Truth = 4,
    /// Observation noise; index is unused.
    Noise = 5,
    /// Free for callers outside the filter.
    User = 15,
}

const TIME_BITS: u32 = 28;
const INDEX_BITS: u32 = 32;

/// Stream for one `(time, purpose, index)` address under `seed`.
///
/// `time` must fit in 28 bits and `index` in 32 bits.
pub fn stream(seed: u64, time: u64, purpose: Purpose, index: u64) -> StreamRng {
    debug_assert!(time < (1 << TIME_BITS), "time index {time} too large");
    debug_assert!(index < (1 << INDEX_BITS), "stream index {index} too large");
    let id = (time << (INDEX_BITS + 4)) | ((purpose as u64) << INDEX_BITS) | index;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Seed for the `trial`-th independent repetition of an experiment.
pub fn trial_seed(base: u64, trial: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = base ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
