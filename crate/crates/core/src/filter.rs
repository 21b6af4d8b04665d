//! Auxiliary particle filter for superpositional track-before-detect.
//!
//! One [`step`] runs two passes over the particle set:
//!
//! 1. Every particle draws a look-ahead joint state from the transition
//!    model. Its first-stage weight is the likelihood of the new
//!    observation under that draw times its previous weight.
//! 2. Parents are resampled from the first-stage weights. Each resampled
//!    slot draws a fresh joint state from its parent's previous state and is
//!    weighted by the ratio of its likelihood to the likelihood of the
//!    parent's look-ahead draw.
//!
//! Weights are kept in the log domain and normalized with max subtraction.
//! Random numbers come from [`crate::random::stream`] addressed by
//! `(time, stage, particle)`, so results do not depend on thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::observation::{superpose, Observation, SignalScalar, SuperpositionalModel};
use crate::random::{stream, Purpose};
use crate::resample::ResamplingPolicy;
use crate::state::{sample_initial, sample_joint_transition, InitialDistribution, MultiTargetState, TransitionModel};

/// Tolerance on `log(sum of weights)` for a set to count as normalized.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub state: MultiTargetState,
    pub log_weight: f64,
}

/// Weighted particle approximation of the posterior at one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSet {
    particles: Vec<Particle>,
    time_index: u64,
}

impl ParticleSet {
    /// Wraps particles, normalizing their log-weights.
    pub fn new(mut particles: Vec<Particle>, time_index: u64) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::InvalidConfig("a particle set needs at least one particle".into()));
        }
        let mut lw: Vec<f64> = particles.iter().map(|p| p.log_weight).collect();
        if normalize_log_weights(&mut lw).is_none() {
            return Err(Error::Unnormalized { sum: 0.0 });
        }
        for (p, w) in particles.iter_mut().zip(lw) {
            p.log_weight = w;
        }
        Ok(Self { particles, time_index })
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn time_index(&self) -> u64 {
        self.time_index
    }

    pub fn n_max(&self) -> usize {
        self.particles.first().map_or(0, |p| p.state.n_max())
    }

    pub fn weights(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.log_weight.exp()).collect()
    }

    /// `1 / sum(w^2)`.
    pub fn effective_sample_size(&self) -> f64 {
        1.0 / self.particles.iter().map(|p| (2.0 * p.log_weight).exp()).sum::<f64>()
    }

    pub fn log_sum_weights(&self) -> f64 {
        log_sum_exp(self.particles.iter().map(|p| p.log_weight))
    }

    pub fn is_normalized(&self) -> bool {
        self.log_sum_weights().abs() <= NORMALIZATION_TOLERANCE
    }
}

#[derive(Debug, Clone)]
pub struct FilterConfig<S: SignalScalar = f64> {
    pub n_particles: usize,
    pub n_max: usize,
    pub transition: TransitionModel,
    pub initial: InitialDistribution,
    pub observation: SuperpositionalModel<S>,
    pub resampling: ResamplingPolicy,
    pub seed: u64,
}

impl<S: SignalScalar> FilterConfig<S> {
    pub fn new(
        n_particles: usize,
        n_max: usize,
        transition: TransitionModel,
        initial: InitialDistribution,
        observation: SuperpositionalModel<S>,
        seed: u64,
    ) -> Result<Self> {
        let config = Self {
            n_particles,
            n_max,
            transition,
            initial,
            observation,
            resampling: ResamplingPolicy::Residual,
            seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 || self.n_particles > u32::MAX as usize {
            return Err(Error::InvalidConfig(format!(
                "particle count must be in 1..=2^32-1, got {}",
                self.n_particles
            )));
        }
        if self.n_max == 0 {
            return Err(Error::InvalidConfig("n_max must be at least 1".into()));
        }
        if self.initial.state.dim() != self.transition.dim() {
            return Err(Error::DimensionMismatch {
                context: "initial state density",
                expected: self.transition.dim(),
                found: self.initial.state.dim(),
            });
        }
        if !(0.0..=1.0).contains(&self.initial.p_active) {
            return Err(Error::InvalidConfig(format!(
                "initial activity probability must lie in [0, 1], got {}",
                self.initial.p_active
            )));
        }
        Ok(())
    }
}

/// Internals of one filter step, exposed for diagnostics and tests.
#[derive(Debug, Clone)]
pub struct StepTrace {
    pub set: ParticleSet,
    /// `log p_o(z | s~_k)` of each particle's look-ahead draw.
    pub auxiliary_log_likelihoods: Vec<f64>,
    /// First-stage log-weights `log p_o(z | s~_k) + log w_{t-1}^k`, unnormalized.
    pub first_stage_log_weights: Vec<f64>,
    /// Parent index of each resampled slot.
    pub parents: Vec<usize>,
    /// Effective sample size of the first-stage weights.
    pub first_stage_ess: f64,
}

/// `n_p` draws from the initial distribution with uniform weights.
pub fn initialize<S: SignalScalar>(config: &FilterConfig<S>) -> ParticleSet {
    let log_w = -(config.n_particles as f64).ln();
    let particles = (0..config.n_particles)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(config.seed, 0, Purpose::Initial, k as u64);
            Particle {
                state: sample_initial(config.n_max, &config.initial, &mut rng),
                log_weight: log_w,
            }
        })
        .collect();
    ParticleSet {
        particles,
        time_index: 0,
    }
}

pub fn step<S: SignalScalar>(
    prev: &ParticleSet,
    z: &Observation<S>,
    config: &FilterConfig<S>,
) -> Result<ParticleSet> {
    step_traced(prev, z, config).map(|trace| trace.set)
}

pub fn step_traced<S: SignalScalar>(
    prev: &ParticleSet,
    z: &Observation<S>,
    config: &FilterConfig<S>,
) -> Result<StepTrace> {
    let model = &config.observation;
    if z.len() != model.n_z() {
        return Err(Error::DimensionMismatch {
            context: "observation",
            expected: model.n_z(),
            found: z.len(),
        });
    }
    let time = prev.time_index + 1;
    let zs = z.as_slice();
    let seed = config.seed;

    let draw = |parent: &MultiTargetState, purpose: Purpose, index: usize| -> Result<(MultiTargetState, f64)> {
        let mut rng = stream(seed, time, purpose, index as u64);
        let x = sample_joint_transition(parent, &config.transition, &mut rng);
        let ll = model.likelihood.log_density(zs, superpose(&x, model).as_slice());
        if ll.is_nan() || ll == f64::INFINITY {
            return Err(Error::NonFinite("log-likelihood"));
        }
        Ok((x, ll))
    };

    // first stage: look-ahead draws
    let aux_ll: Vec<f64> = prev
        .particles
        .par_iter()
        .enumerate()
        .map(|(k, p)| draw(&p.state, Purpose::Auxiliary, k).map(|(_, ll)| ll))
        .collect::<Result<_>>()?;
    let first_stage: Vec<f64> = aux_ll
        .iter()
        .zip(&prev.particles)
        .map(|(ll, p)| ll + p.log_weight)
        .collect();

    let mut normalized = first_stage.clone();
    if normalize_log_weights(&mut normalized).is_none() {
        return Err(Error::DegenerateLikelihood {
            time_index: time,
            n_particles: prev.len(),
        });
    }
    let first_weights: Vec<f64> = normalized.iter().map(|w| w.exp()).collect();
    let first_stage_ess = 1.0 / first_weights.iter().map(|w| w * w).sum::<f64>();

    let mut rng = stream(seed, time, Purpose::Resample, 0);
    let parents = config.resampling.resample(&first_weights, &mut rng)?;

    // second stage: fresh draws from the selected parents
    let redrawn: Vec<(MultiTargetState, f64)> = parents
        .par_iter()
        .enumerate()
        .map(|(l, &k)| {
            let (x, ll) = draw(&prev.particles[k].state, Purpose::Redraw, l)?;
            Ok((x, ll - aux_ll[k]))
        })
        .collect::<Result<_>>()?;

    let mut log_weights: Vec<f64> = redrawn.iter().map(|(_, w)| *w).collect();
    if normalize_log_weights(&mut log_weights).is_none() {
        return Err(Error::DegenerateLikelihood {
            time_index: time,
            n_particles: prev.len(),
        });
    }
    let particles: Vec<Particle> = redrawn
        .into_iter()
        .zip(log_weights)
        .map(|((state, _), log_weight)| Particle { state, log_weight })
        .collect();
    let set = ParticleSet {
        particles,
        time_index: time,
    };
    log::debug!(
        "t={time} first-stage ESS {first_stage_ess:.1}, ESS {:.1} of {}",
        set.effective_sample_size(),
        set.len()
    );
    Ok(StepTrace {
        set,
        auxiliary_log_likelihoods: aux_ll,
        first_stage_log_weights: first_stage,
        parents,
        first_stage_ess,
    })
}

/// Runs the filter over a sequence of observations, calling `on_step` with
/// each posterior.
pub fn run<S: SignalScalar>(
    config: &FilterConfig<S>,
    observations: &[Observation<S>],
    mut on_step: impl FnMut(&ParticleSet),
) -> Result<ParticleSet> {
    let mut set = initialize(config);
    for z in observations {
        set = step(&set, z, config)?;
        on_step(&set);
    }
    Ok(set)
}

pub fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Shifts log-weights so they exponentiate to a distribution. Returns the
/// log normalizer, or `None` when every weight is zero.
pub fn normalize_log_weights(log_weights: &mut [f64]) -> Option<f64> {
    let total = log_sum_exp(log_weights.iter().copied());
    if !total.is_finite() {
        return None;
    }
    for w in log_weights.iter_mut() {
        *w -= total;
    }
    Some(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Region;
    use crate::observation::{GaussianNoise, Likelihood, SignalMap};
    use crate::state::{BirthDeathMatrix, ContinuousState, LinearGaussian, UniformRegionBirth};
    use std::sync::Arc;

    #[derive(Debug)]
    struct Flat;
    impl Likelihood for Flat {
        fn log_density(&self, _z: &[f64], _s: &[f64]) -> f64 {
            -3.0
        }
    }

    #[derive(Debug)]
    struct Never;
    impl Likelihood for Never {
        fn log_density(&self, _z: &[f64], _s: &[f64]) -> f64 {
            f64::NEG_INFINITY
        }
    }

    #[derive(Debug)]
    struct Position;
    impl SignalMap for Position {
        fn n_z(&self) -> usize {
            2
        }
        fn accumulate(&self, x: &ContinuousState, acc: &mut [f64]) {
            acc[0] += x[0];
            acc[1] += x[2];
        }
    }

    fn config(likelihood: Arc<dyn Likelihood>, n_particles: usize) -> FilterConfig {
        let birth = Arc::new(UniformRegionBirth {
            region: Region::square(20.0),
            velocity_std: 1.0,
        });
        let transition = TransitionModel::new(
            Arc::new(LinearGaussian::constant_velocity_2d(0.25, 0.35).unwrap()),
            birth.clone(),
            BirthDeathMatrix::new(0.2, 0.1).unwrap(),
        )
        .unwrap();
        FilterConfig::new(
            n_particles,
            3,
            transition,
            InitialDistribution::all_inactive(birth),
            SuperpositionalModel::new(Arc::new(Position), likelihood),
            17,
        )
        .unwrap()
    }

    fn z() -> Observation {
        Observation::new(vec![4.0, 6.0]).unwrap()
    }

    #[test]
    fn initialize_uniform_and_inactive() {
        let cfg = config(Arc::new(Flat), 4);
        let set = initialize(&cfg);
        assert_eq!(set.len(), 4);
        for p in set.particles() {
            assert_eq!(p.log_weight, (0.25f64).ln());
            assert_eq!(p.state.active_count(), 0);
        }
        assert_eq!(set, initialize(&cfg));
    }

    #[test]
    fn flat_likelihood_gives_uniform_weights() {
        let cfg = config(Arc::new(Flat), 50);
        let mut set = initialize(&cfg);
        for _ in 0..5 {
            set = step(&set, &z(), &cfg).unwrap();
            for p in set.particles() {
                assert!((p.log_weight + (50f64).ln()).abs() < 1e-12);
            }
        }
        assert_eq!(set.time_index(), 5);
    }

    #[test]
    fn collapse_reports_time_index() {
        let cfg = config(Arc::new(Flat), 10);
        let set = step(&initialize(&cfg), &z(), &cfg).unwrap();
        let bad = config(Arc::new(Never), 10);
        match step(&set, &z(), &bad) {
            Err(Error::DegenerateLikelihood { time_index, n_particles }) => {
                assert_eq!(time_index, 2);
                assert_eq!(n_particles, 10);
            }
            other => panic!("expected collapse, got {other:?}"),
        }
    }

    #[test]
    fn wrong_observation_length_rejected() {
        let cfg = config(Arc::new(Flat), 3);
        let z = Observation::new(vec![1.0]).unwrap();
        assert!(matches!(step(&initialize(&cfg), &z, &cfg), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn config_validation() {
        let cfg = config(Arc::new(Flat), 3);
        let mut bad = cfg.clone();
        bad.n_particles = 0;
        assert!(bad.validate().is_err());
        let mut bad = cfg.clone();
        bad.n_max = 0;
        assert!(bad.validate().is_err());
        let mut bad = cfg;
        bad.initial.p_active = 1.5;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn gaussian_steps_stay_normalized_and_deterministic() {
        let cfg = config(Arc::new(GaussianNoise::new(1.0).unwrap()), 200);
        let mut a = initialize(&cfg);
        let mut b = initialize(&cfg);
        for _ in 0..10 {
            a = step(&a, &z(), &cfg).unwrap();
            b = step(&b, &z(), &cfg).unwrap();
            assert!(a.is_normalized());
            assert_eq!(a.len(), 200);
        }
        assert_eq!(a, b);
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let cfg = config(Arc::new(GaussianNoise::new(1.0).unwrap()), 300);
        let run_with = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    let mut s = initialize(&cfg);
                    for _ in 0..5 {
                        s = step(&s, &z(), &cfg).unwrap();
                    }
                    s
                })
        };
        assert_eq!(run_with(1), run_with(3));
    }

    #[test]
    fn log_sum_exp_handles_extremes() {
        assert_eq!(log_sum_exp([f64::NEG_INFINITY, f64::NEG_INFINITY].into_iter()), f64::NEG_INFINITY);
        let v = log_sum_exp([-1000.0, -1000.0].into_iter());
        assert!((v - (-1000.0 + 2f64.ln())).abs() < 1e-12);
        let mut w = vec![-1e4, f64::NEG_INFINITY, -1e4 + 1.0];
        normalize_log_weights(&mut w).unwrap();
        assert_eq!(w[1].exp(), 0.0);
        assert!((w[0].exp() + w[2].exp() - 1.0).abs() < NORMALIZATION_TOLERANCE);
    }
}
