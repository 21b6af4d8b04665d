//! Hybrid multi-target state and its factorized transition model.
//!
//! A [`MultiTargetState`] holds `n_max` target models. Each has a continuous
//! state vector and an on/off [`ActivityFlag`]. Transitions factor per target:
//! the flag follows a two-state birth/death chain, then the continuous state
//! is drawn from the survival density (stayed on), the birth density (just
//! switched on) or left untouched (off). The untouched value of an inactive
//! target is never read by the likelihood or the estimators.

use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::geometry::Region;

/// Continuous state of one target model. Entries are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousState(SmallVec<[f64; 4]>);

impl ContinuousState {
    pub fn new(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let values: SmallVec<[f64; 4]> = values.into_iter().collect();
        if values.iter().all(|v| v.is_finite()) {
            Ok(Self(values))
        } else {
            Err(Error::NonFinite("continuous state"))
        }
    }

    /// Builds a state from values the caller knows to be finite.
    ///
    /// Intended for sampler implementations; finiteness is only checked in
    /// debug builds.
    pub fn from_finite(values: impl IntoIterator<Item = f64>) -> Self {
        let values: SmallVec<[f64; 4]> = values.into_iter().collect();
        debug_assert!(values.iter().all(|v| v.is_finite()), "non-finite state {values:?}");
        Self(values)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(SmallVec::from_elem(0.0, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl std::ops::Index<usize> for ContinuousState {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Whether a target model is switched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ActivityFlag {
    #[default]
    Inactive,
    Active,
}

impl ActivityFlag {
    pub fn is_active(self) -> bool {
        self == ActivityFlag::Active
    }

    pub fn as_u8(self) -> u8 {
        self.is_active() as u8
    }
}

impl From<bool> for ActivityFlag {
    fn from(active: bool) -> Self {
        if active {
            ActivityFlag::Active
        } else {
            ActivityFlag::Inactive
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetSlot {
    pub state: ContinuousState,
    pub activity: ActivityFlag,
}

/// Joint state of all `n_max` target models.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultiTargetState {
    targets: Vec<TargetSlot>,
}

impl MultiTargetState {
    pub fn new(targets: Vec<TargetSlot>) -> Self {
        Self { targets }
    }

    pub fn n_max(&self) -> usize {
        self.targets.len()
    }

    pub fn targets(&self) -> &[TargetSlot] {
        &self.targets
    }

    pub fn target(&self, j: usize) -> Option<&TargetSlot> {
        self.targets.get(j)
    }

    pub fn active_count(&self) -> usize {
        self.targets.iter().filter(|t| t.activity.is_active()).count()
    }

    /// Continuous states of the active target models, in index order.
    pub fn active_states(&self) -> impl Iterator<Item = &ContinuousState> {
        self.targets
            .iter()
            .filter(|t| t.activity.is_active())
            .map(|t| &t.state)
    }
}

/// Birth (`pi_b`, off to on) and death (`pi_d`, on to off) probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BirthDeathMatrix {
    pi_b: f64,
    pi_d: f64,
}

impl BirthDeathMatrix {
    pub fn new(pi_b: f64, pi_d: f64) -> Result<Self> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !ok(pi_b) || !ok(pi_d) {
            return Err(Error::InvalidConfig(format!(
                "birth/death probabilities must lie in [0, 1], got pi_b={pi_b}, pi_d={pi_d}"
            )));
        }
        Ok(Self { pi_b, pi_d })
    }

    pub fn pi_b(&self) -> f64 {
        self.pi_b
    }

    pub fn pi_d(&self) -> f64 {
        self.pi_d
    }

    /// Row-stochastic matrix indexed `[previous][next]` with 0 = off, 1 = on.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.pi_b, self.pi_b], [self.pi_d, 1.0 - self.pi_d]]
    }

    /// Long-run fraction of time a target model is on.
    pub fn stationary_active(&self) -> Option<f64> {
        let total = self.pi_b + self.pi_d;
        (total > 0.0).then(|| self.pi_b / total)
    }
}

/// Sampler for the survival density `p_s(x_t | x_{t-1})`.
pub trait SurvivalDensity: Send + Sync + Debug {
    fn dim(&self) -> usize;
    fn sample(&self, prev: &ContinuousState, rng: &mut dyn RngCore) -> ContinuousState;
}

/// Sampler for an unconditional state density (births, initial states).
pub trait StateDensity: Send + Sync + Debug {
    fn dim(&self) -> usize;
    fn sample(&self, rng: &mut dyn RngCore) -> ContinuousState;
}

/// `x_t = F x_{t-1} + L e`, `e ~ N(0, I)`, where `L` is a square root of the
/// process noise covariance mapped through the noise gain.
#[derive(Debug, Clone)]
pub struct LinearGaussian {
    dim: usize,
    noise_dim: usize,
    transition: Vec<f64>,
    noise_factor: Vec<f64>,
}

impl LinearGaussian {
    /// `x_t = F x_{t-1} + G w`, `w ~ N(0, noise_cov)`.
    pub fn new(
        transition: &DMatrix<f64>,
        noise_gain: &DMatrix<f64>,
        noise_cov: &DMatrix<f64>,
    ) -> Result<Self> {
        let dim = transition.nrows();
        if transition.ncols() != dim {
            return Err(Error::DimensionMismatch {
                context: "transition matrix columns",
                expected: dim,
                found: transition.ncols(),
            });
        }
        if noise_gain.nrows() != dim {
            return Err(Error::DimensionMismatch {
                context: "noise gain rows",
                expected: dim,
                found: noise_gain.nrows(),
            });
        }
        let noise_dim = noise_gain.ncols();
        if noise_cov.shape() != (noise_dim, noise_dim) {
            return Err(Error::DimensionMismatch {
                context: "process noise covariance",
                expected: noise_dim,
                found: noise_cov.nrows(),
            });
        }
        if transition.iter().chain(noise_gain.iter()).chain(noise_cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("linear Gaussian model"));
        }
        let chol = noise_cov.clone().cholesky().ok_or_else(|| {
            Error::InvalidConfig("process noise covariance is not positive definite".into())
        })?;
        let factor = noise_gain * chol.l();
        Ok(Self {
            dim,
            noise_dim,
            transition: row_major(transition),
            noise_factor: row_major(&factor),
        })
    }

    /// Nearly-constant-velocity model on the state `(x, vx, y, vy)`:
    /// `F = I2 (x) [[1, T], [0, 1]]`, `G = I2 (x) [T^2/2, T]`, `Sigma_w = q I2`.
    pub fn constant_velocity_2d(period: f64, accel_variance: f64) -> Result<Self> {
        Self::new(
            &cv_transition(period),
            &cv_noise_gain(period),
            &(DMatrix::identity(2, 2) * accel_variance),
        )
    }

    pub fn transition_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.transition)
    }

    /// Mean of the next state given `prev`.
    pub fn mean(&self, prev: &[f64]) -> Vec<f64> {
        self.transition
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(prev).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Covariance `L L^T` of the next state given the previous one.
    pub fn noise_covariance(&self) -> DMatrix<f64> {
        let l = DMatrix::from_row_slice(self.dim, self.noise_dim, &self.noise_factor);
        &l * l.transpose()
    }
}

impl SurvivalDensity for LinearGaussian {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, prev: &ContinuousState, rng: &mut dyn RngCore) -> ContinuousState {
        let noise: SmallVec<[f64; 4]> = (0..self.noise_dim)
            .map(|_| StandardNormal.sample(&mut *rng))
            .collect();
        let mean = self.mean(prev.as_slice());
        let out = mean.into_iter().zip(self.noise_factor.chunks_exact(self.noise_dim)).map(
            |(m, row)| m + row.iter().zip(&noise).map(|(a, e)| a * e).sum::<f64>(),
        );
        ContinuousState::from_finite(out)
    }
}

/// `F` of the nearly-constant-velocity model.
pub fn cv_transition(period: f64) -> DMatrix<f64> {
    let block = DMatrix::from_row_slice(2, 2, &[1.0, period, 0.0, 1.0]);
    DMatrix::<f64>::identity(2, 2).kronecker(&block)
}

/// `G` of the nearly-constant-velocity model.
pub fn cv_noise_gain(period: f64) -> DMatrix<f64> {
    let block = DMatrix::from_column_slice(2, 1, &[period * period / 2.0, period]);
    DMatrix::<f64>::identity(2, 2).kronecker(&block)
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().iter().copied().collect()
}

/// Uniform position over a region, independent normal velocities, on the
/// state layout `(x, vx, y, vy)`.
#[derive(Debug, Clone)]
pub struct UniformRegionBirth {
    pub region: Region,
    pub velocity_std: f64,
}

impl StateDensity for UniformRegionBirth {
    fn dim(&self) -> usize {
        4
    }

    fn sample(&self, rng: &mut dyn RngCore) -> ContinuousState {
        let r = &self.region;
        let x = r.x_min + rng.random::<f64>() * r.width();
        let vx: f64 = StandardNormal.sample(&mut *rng);
        let y = r.y_min + rng.random::<f64>() * r.height();
        let vy: f64 = StandardNormal.sample(&mut *rng);
        ContinuousState::from_finite([x, self.velocity_std * vx, y, self.velocity_std * vy])
    }
}

/// Independent normal coordinates.
#[derive(Debug, Clone)]
pub struct DiagonalGaussian {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl StateDensity for DiagonalGaussian {
    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> ContinuousState {
        ContinuousState::from_finite(self.mean.iter().zip(&self.std).map(|(m, s)| {
            let e: f64 = StandardNormal.sample(&mut *rng);
            m + s * e
        }))
    }
}

/// Survival and birth samplers plus the birth/death chain.
#[derive(Debug, Clone)]
pub struct TransitionModel {
    pub survival: Arc<dyn SurvivalDensity>,
    pub birth: Arc<dyn StateDensity>,
    pub birth_death: BirthDeathMatrix,
}

impl TransitionModel {
    pub fn new(
        survival: Arc<dyn SurvivalDensity>,
        birth: Arc<dyn StateDensity>,
        birth_death: BirthDeathMatrix,
    ) -> Result<Self> {
        if survival.dim() != birth.dim() {
            return Err(Error::DimensionMismatch {
                context: "birth density",
                expected: survival.dim(),
                found: birth.dim(),
            });
        }
        Ok(Self {
            survival,
            birth,
            birth_death,
        })
    }

    pub fn dim(&self) -> usize {
        self.survival.dim()
    }
}

/// Product-form initial distribution: every target model draws its state
/// from `state` and is on with probability `p_active`.
#[derive(Debug, Clone)]
pub struct InitialDistribution {
    pub state: Arc<dyn StateDensity>,
    pub p_active: f64,
}

impl InitialDistribution {
    /// All target models off, states drawn like newborns.
    pub fn all_inactive(birth: Arc<dyn StateDensity>) -> Self {
        Self {
            state: birth,
            p_active: 0.0,
        }
    }
}

pub fn sample_activity_transition(
    prev: ActivityFlag,
    m: &BirthDeathMatrix,
    rng: &mut dyn RngCore,
) -> ActivityFlag {
    let u: f64 = rng.random();
    match prev {
        ActivityFlag::Inactive => ActivityFlag::from(u < m.pi_b),
        ActivityFlag::Active => ActivityFlag::from(u >= m.pi_d),
    }
}

pub fn sample_continuous_transition(
    prev: &ContinuousState,
    prev_a: ActivityFlag,
    new_a: ActivityFlag,
    model: &TransitionModel,
    rng: &mut dyn RngCore,
) -> ContinuousState {
    match (new_a, prev_a) {
        (ActivityFlag::Active, ActivityFlag::Active) => model.survival.sample(prev, rng),
        (ActivityFlag::Active, ActivityFlag::Inactive) => model.birth.sample(rng),
        (ActivityFlag::Inactive, _) => prev.clone(),
    }
}

/// Ancestral draw from the factorized transition: per target, the flag
/// first, then the continuous state given both flags.
pub fn sample_joint_transition(
    prev: &MultiTargetState,
    model: &TransitionModel,
    rng: &mut dyn RngCore,
) -> MultiTargetState {
    let targets = prev
        .targets
        .iter()
        .map(|slot| {
            let activity = sample_activity_transition(slot.activity, &model.birth_death, rng);
            let state = sample_continuous_transition(&slot.state, slot.activity, activity, model, rng);
            TargetSlot { state, activity }
        })
        .collect();
    MultiTargetState { targets }
}

pub fn sample_initial(
    n_max: usize,
    init: &InitialDistribution,
    rng: &mut dyn RngCore,
) -> MultiTargetState {
    let targets = (0..n_max)
        .map(|_| {
            let state = init.state.sample(rng);
            let activity = ActivityFlag::from(rng.random::<f64>() < init.p_active);
            TargetSlot { state, activity }
        })
        .collect();
    MultiTargetState { targets }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{stream, Purpose};

    fn rng(i: u64) -> crate::random::StreamRng {
        stream(1234, 0, Purpose::User, i)
    }

    fn rf_model() -> TransitionModel {
        TransitionModel::new(
            Arc::new(LinearGaussian::constant_velocity_2d(0.25, 0.35).unwrap()),
            Arc::new(UniformRegionBirth {
                region: Region::square(20.0),
                velocity_std: 1.0,
            }),
            BirthDeathMatrix::new(0.2, 0.1).unwrap(),
        )
        .unwrap()
    }

    fn inactive(n: usize) -> MultiTargetState {
        MultiTargetState::new(
            (0..n)
                .map(|j| TargetSlot {
                    state: ContinuousState::from_finite([j as f64; 4]),
                    activity: ActivityFlag::Inactive,
                })
                .collect(),
        )
    }

    #[test]
    fn rejects_non_finite_state() {
        assert!(ContinuousState::new([1.0, f64::NAN]).is_err());
        assert!(ContinuousState::new([1.0, f64::INFINITY]).is_err());
        assert_eq!(ContinuousState::new([1.0, 2.0]).unwrap().dim(), 2);
    }

    #[test]
    fn birth_death_validation_and_rows() {
        assert!(BirthDeathMatrix::new(-0.1, 0.5).is_err());
        assert!(BirthDeathMatrix::new(0.1, 1.5).is_err());
        let m = BirthDeathMatrix::new(0.2, 0.1).unwrap().matrix();
        for row in m {
            assert!((row[0] + row[1] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_birth_never_activates() {
        let m = BirthDeathMatrix::new(0.0, 0.3).unwrap();
        let mut r = rng(0);
        assert!((0..10_000).all(|_| !sample_activity_transition(ActivityFlag::Inactive, &m, &mut r).is_active()));
    }

    #[test]
    fn zero_death_never_deactivates() {
        let m = BirthDeathMatrix::new(0.3, 0.0).unwrap();
        let mut r = rng(1);
        assert!((0..10_000).all(|_| sample_activity_transition(ActivityFlag::Active, &m, &mut r).is_active()));
    }

    #[test]
    fn birth_frequency_matches_pi_b() {
        let m = BirthDeathMatrix::new(0.2, 0.1).unwrap();
        let mut r = rng(2);
        let n = 100_000;
        let born = (0..n)
            .filter(|_| sample_activity_transition(ActivityFlag::Inactive, &m, &mut r).is_active())
            .count();
        let freq = born as f64 / n as f64;
        assert!((freq - 0.2).abs() < 0.01, "freq {freq}");
    }

    #[test]
    fn inactive_branch_returns_prev() {
        let model = rf_model();
        let prev = ContinuousState::from_finite([3.0, -1.0, 7.5, 0.25]);
        let mut r = rng(3);
        for prev_a in [ActivityFlag::Active, ActivityFlag::Inactive] {
            let out = sample_continuous_transition(&prev, prev_a, ActivityFlag::Inactive, &model, &mut r);
            assert_eq!(out, prev);
        }
    }

    #[test]
    fn survival_mean_matches_transition_product() {
        let model = rf_model();
        let lg = LinearGaussian::constant_velocity_2d(0.25, 0.35).unwrap();
        let prev = ContinuousState::from_finite([1.0, 1.0, 1.0, 1.0]);
        let expected = cv_transition(0.25) * nalgebra::DVector::from_column_slice(prev.as_slice());
        let cov = lg.noise_covariance();
        let n = 100_000;
        let mut r = rng(4);
        let mut sum = [0.0; 4];
        for _ in 0..n {
            let x = sample_continuous_transition(&prev, ActivityFlag::Active, ActivityFlag::Active, &model, &mut r);
            for i in 0..4 {
                sum[i] += x[i];
            }
        }
        for i in 0..4 {
            let mean = sum[i] / n as f64;
            let se = (cov[(i, i)] / n as f64).sqrt();
            assert!((mean - expected[i]).abs() < 3.0 * se, "dim {i}: {mean} vs {}", expected[i]);
        }
    }

    #[test]
    fn birth_position_moments() {
        let model = rf_model();
        let prev = ContinuousState::zeros(4);
        let n = 100_000;
        let mut r = rng(5);
        let (mut sx, mut sy, mut svx) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let x = sample_continuous_transition(&prev, ActivityFlag::Inactive, ActivityFlag::Active, &model, &mut r);
            assert!((0.0..=20.0).contains(&x[0]) && (0.0..=20.0).contains(&x[2]));
            sx += x[0];
            sy += x[2];
            svx += x[1];
        }
        // uniform on [0, 20]: variance 400/12
        let se_pos = (400.0 / 12.0 / n as f64).sqrt();
        let se_vel = (1.0 / n as f64).sqrt();
        assert!((sx / n as f64 - 10.0).abs() < 3.0 * se_pos);
        assert!((sy / n as f64 - 10.0).abs() < 3.0 * se_pos);
        assert!((svx / n as f64).abs() < 3.0 * se_vel);
    }

    #[test]
    fn single_target_joint_equals_two_step_draw() {
        let model = rf_model();
        let prev = MultiTargetState::new(vec![TargetSlot {
            state: ContinuousState::from_finite([5.0, 0.0, 5.0, 0.0]),
            activity: ActivityFlag::Active,
        }]);
        for i in 0..50 {
            let joint = sample_joint_transition(&prev, &model, &mut rng(100 + i));
            let mut r = rng(100 + i);
            let slot = &prev.targets()[0];
            let a = sample_activity_transition(slot.activity, &model.birth_death, &mut r);
            let x = sample_continuous_transition(&slot.state, slot.activity, a, &model, &mut r);
            assert_eq!(joint.targets()[0], TargetSlot { state: x, activity: a });
        }
    }

    #[test]
    fn zero_birth_keeps_everything_off() {
        let mut model = rf_model();
        model.birth_death = BirthDeathMatrix::new(0.0, 0.1).unwrap();
        let prev = inactive(4);
        let mut r = rng(6);
        for _ in 0..100 {
            assert_eq!(sample_joint_transition(&prev, &model, &mut r), prev);
        }
    }

    #[test]
    fn expected_births_from_all_off() {
        let model = rf_model();
        let prev = inactive(4);
        let mut r = rng(7);
        let n = 50_000;
        let total: usize = (0..n)
            .map(|_| sample_joint_transition(&prev, &model, &mut r).active_count())
            .sum();
        let mean = total as f64 / n as f64;
        // binomial(4, 0.2): variance 0.64
        let se = (0.64 / n as f64).sqrt();
        assert!((mean - 0.8).abs() < 4.0 * se, "mean {mean}");
    }

    #[test]
    fn joint_transition_deterministic_per_seed() {
        let model = rf_model();
        let prev = inactive(4);
        let a = sample_joint_transition(&prev, &model, &mut rng(8));
        let b = sample_joint_transition(&prev, &model, &mut rng(8));
        assert_eq!(a, b);
    }

    #[test]
    fn activity_chain_stationary_fraction() {
        let m = BirthDeathMatrix::new(0.2, 0.1).unwrap();
        assert!((m.stationary_active().unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let mut r = rng(9);
        let mut a = ActivityFlag::Inactive;
        let n = 1_000_000;
        let mut on = 0usize;
        for _ in 0..n {
            a = sample_activity_transition(a, &m, &mut r);
            on += a.as_u8() as usize;
        }
        let frac = on as f64 / n as f64;
        assert!((frac - 2.0 / 3.0).abs() < 0.01, "fraction {frac}");
    }

    #[test]
    fn target_flags_uncorrelated() {
        let model = rf_model();
        let mut state = inactive(2);
        let mut r = rng(10);
        let n = 100_000;
        let (mut s0, mut s1, mut s01) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            state = sample_joint_transition(&state, &model, &mut r);
            let f0 = state.targets()[0].activity.as_u8() as f64;
            let f1 = state.targets()[1].activity.as_u8() as f64;
            s0 += f0;
            s1 += f1;
            s01 += f0 * f1;
        }
        let nf = n as f64;
        let (m0, m1) = (s0 / nf, s1 / nf);
        let cov = s01 / nf - m0 * m1;
        let corr = cov / (m0 * (1.0 - m0) * m1 * (1.0 - m1)).sqrt();
        // chain autocorrelation 0.7 inflates the variance by (1+0.7)/(1-0.7)
        assert!(corr.abs() < 0.03, "correlation {corr}");
    }

    #[test]
    fn initial_default_setting_all_off_and_in_region() {
        let init = InitialDistribution::all_inactive(Arc::new(UniformRegionBirth {
            region: Region::square(20.0),
            velocity_std: 1.0,
        }));
        let mut r = rng(11);
        for _ in 0..1000 {
            let s = sample_initial(4, &init, &mut r);
            assert_eq!(s.active_count(), 0);
            for t in s.targets() {
                assert!((0.0..=20.0).contains(&t.state[0]) && (0.0..=20.0).contains(&t.state[2]));
            }
        }
        assert_eq!(sample_initial(0, &init, &mut r).n_max(), 0);
    }

    #[test]
    fn cv_matrices_match_kronecker_layout() {
        let f = cv_transition(0.25);
        let g = cv_noise_gain(0.25);
        #[rustfmt::skip]
        let f_expected = DMatrix::from_row_slice(4, 4, &[
            1.0, 0.25, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.25,
            0.0, 0.0, 0.0, 1.0,
        ]);
        #[rustfmt::skip]
        let g_expected = DMatrix::from_row_slice(4, 2, &[
            0.03125, 0.0,
            0.25, 0.0,
            0.0, 0.03125,
            0.0, 0.25,
        ]);
        assert_eq!(f, f_expected);
        assert_eq!(g, g_expected);
        let lg = LinearGaussian::constant_velocity_2d(0.25, 0.35).unwrap();
        let q = lg.noise_covariance();
        let q_expected = &g * g.transpose() * 0.35;
        assert!((q - q_expected).abs().max() < 1e-15);
    }
}
