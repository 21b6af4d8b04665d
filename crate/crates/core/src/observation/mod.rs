//! Superpositional observation model.
//!
//! The likelihood sees the joint state only through the summed signal
//! `s = sum over active j of h(x_j)`. A [`SuperpositionalModel`] bundles the
//! per-target signal map `h`, the likelihood `p_o(z | s)` (log domain) and,
//! for simulation, a sampler for additive noise.

mod noise;
pub mod rf;

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::state::{ContinuousState, MultiTargetState};

pub use noise::{GaussianNoise, UniformNoise};
pub use rf::{excess_path_length, rf_signal_map, RfNetwork, RfSignalMap};

/// Scalar type of a sensor channel: real or complex.
pub trait SignalScalar:
    Copy + Default + PartialEq + Debug + Send + Sync + Add<Output = Self> + Sub<Output = Self> + AddAssign + 'static
{
    fn norm_sqr(self) -> f64;
    fn is_finite(self) -> bool;
}

impl SignalScalar for f64 {
    fn norm_sqr(self) -> f64 {
        self * self
    }

    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl SignalScalar for Complex64 {
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }

    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
}

/// Squared Euclidean norm of a signal vector.
pub fn power<S: SignalScalar>(values: &[S]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum()
}

/// Raw sensor readings at one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation<S = f64>(Vec<S>);

impl<S: SignalScalar> Observation<S> {
    pub fn new(values: Vec<S>) -> Result<Self> {
        if values.iter().all(|v| v.is_finite()) {
            Ok(Self(values))
        } else {
            Err(Error::NonFinite("observation"))
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<S> {
        self.0
    }
}

/// Sum of the signal contributions of all active targets.
#[derive(Debug, Clone, PartialEq)]
pub struct SummedSignal<S = f64>(Vec<S>);

impl<S: SignalScalar> SummedSignal<S> {
    pub fn zeros(n_z: usize) -> Self {
        Self(vec![S::default(); n_z])
    }

    pub fn from_values(values: Vec<S>) -> Self {
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }

    pub fn power(&self) -> f64 {
        power(&self.0)
    }
}

/// Per-target signal map `h`.
pub trait SignalMap<S: SignalScalar = f64>: Send + Sync + Debug {
    fn n_z(&self) -> usize;

    /// Adds `h(state)` to `acc` (length `n_z`).
    fn accumulate(&self, state: &ContinuousState, acc: &mut [S]);

    fn signal(&self, state: &ContinuousState) -> Vec<S> {
        let mut out = vec![S::default(); self.n_z()];
        self.accumulate(state, &mut out);
        out
    }
}

/// `log p_o(z | s)`, up to an additive constant independent of `s`.
pub trait Likelihood<S: SignalScalar = f64>: Send + Sync + Debug {
    fn log_density(&self, z: &[S], s: &[S]) -> f64;
}

/// Draws additive observation noise `v_t`.
pub trait NoiseSampler<S: SignalScalar = f64>: Send + Sync + Debug {
    fn sample(&self, n_z: usize, rng: &mut dyn RngCore) -> Vec<S>;
}

#[derive(Debug, Clone)]
pub struct SuperpositionalModel<S: SignalScalar = f64> {
    pub signal_map: Arc<dyn SignalMap<S>>,
    pub likelihood: Arc<dyn Likelihood<S>>,
    pub noise: Option<Arc<dyn NoiseSampler<S>>>,
}

impl<S: SignalScalar> SuperpositionalModel<S> {
    pub fn new(signal_map: Arc<dyn SignalMap<S>>, likelihood: Arc<dyn Likelihood<S>>) -> Self {
        Self {
            signal_map,
            likelihood,
            noise: None,
        }
    }

    /// Model whose likelihood and noise sampler are the same additive noise.
    pub fn additive<N>(signal_map: Arc<dyn SignalMap<S>>, noise: N) -> Self
    where
        N: Likelihood<S> + NoiseSampler<S> + 'static,
    {
        let noise = Arc::new(noise);
        Self {
            signal_map,
            likelihood: noise.clone(),
            noise: Some(noise),
        }
    }

    pub fn n_z(&self) -> usize {
        self.signal_map.n_z()
    }
}

pub fn superpose<S: SignalScalar>(
    state: &MultiTargetState,
    model: &SuperpositionalModel<S>,
) -> SummedSignal<S> {
    let mut acc = vec![S::default(); model.n_z()];
    for x in state.active_states() {
        model.signal_map.accumulate(x, &mut acc);
    }
    SummedSignal(acc)
}

pub fn log_likelihood<S: SignalScalar>(
    z: &Observation<S>,
    s: &SummedSignal<S>,
    model: &SuperpositionalModel<S>,
) -> Result<f64> {
    if z.len() != s.len() {
        return Err(Error::DimensionMismatch {
            context: "summed signal",
            expected: z.len(),
            found: s.len(),
        });
    }
    if !z.0.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("observation"));
    }
    if !s.0.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("summed signal"));
    }
    Ok(model.likelihood.log_density(&z.0, &s.0))
}

/// `z = superpose(state) + v` with one noise draw.
pub fn sample_observation<S: SignalScalar>(
    state: &MultiTargetState,
    model: &SuperpositionalModel<S>,
    rng: &mut dyn RngCore,
) -> Result<Observation<S>> {
    let noise = model.noise.as_ref().ok_or(Error::MissingNoiseSampler)?;
    let mut values = superpose(state, model).0;
    let draws = noise.sample(values.len(), rng);
    for (z, v) in values.iter_mut().zip(draws) {
        *z += v;
    }
    Observation::new(values)
}
