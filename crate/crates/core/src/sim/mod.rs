//! RF-tomography scenario generation.
//!
//! Ground truth follows a deterministic activity schedule. A target that
//! switches on draws its state from the birth density; a target that stays
//! on moves under the nearly-constant-velocity model, optionally reflected
//! at the region boundary. Observation noise is scaled so that the
//! requested SNR holds on average over the steps with signal.

pub mod io;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::observation::{
    power, superpose, GaussianNoise, Observation, RfNetwork, RfSignalMap, SummedSignal,
    SuperpositionalModel, UniformNoise,
};
use crate::random::{stream, Purpose};
use crate::state::{
    ActivityFlag, BirthDeathMatrix, ContinuousState, LinearGaussian, MultiTargetState, StateDensity,
    SurvivalDensity, TargetSlot, UniformRegionBirth,
};

/// Perimeter network of `n_a` equally spaced nodes over all unordered pairs.
pub fn build_network(region: &Region, n_a: usize, phi: f64, sigma_h: f64) -> Result<RfNetwork> {
    RfNetwork::on_perimeter(region, n_a, phi, sigma_h)
}

/// Per-step on/off pattern of the ground-truth targets (`rows[t-1][i]`).
#[derive(Debug, Clone, PartialEq)]
pub struct ActivitySchedule {
    rows: Vec<Vec<bool>>,
    n_truth: usize,
}

impl ActivitySchedule {
    /// Target `i` is on for steps `start_i <= t < end_i` (1-based steps).
    pub fn from_intervals(n_steps: usize, intervals: &[(usize, usize)]) -> Result<Self> {
        for &(start, end) in intervals {
            if start < 1 || end < start {
                return Err(Error::InvalidConfig(format!(
                    "schedule interval [{start}, {end}) must satisfy 1 <= start <= end"
                )));
            }
        }
        let rows = (1..=n_steps)
            .map(|t| intervals.iter().map(|&(s, e)| s <= t && t < e).collect())
            .collect();
        Ok(Self {
            rows,
            n_truth: intervals.len(),
        })
    }

    pub fn from_rows(rows: Vec<Vec<bool>>) -> Result<Self> {
        let n_truth = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_truth) {
            return Err(Error::InvalidConfig("schedule rows differ in length".into()));
        }
        Ok(Self { rows, n_truth })
    }

    /// One target at step 1, growing to four, then shrinking back to one:
    /// births at steps 1, 40, 80, 120 and deaths at 140, 160, 180.
    pub fn staircase(n_steps: usize) -> Self {
        Self::from_intervals(n_steps, &DEFAULT_INTERVALS).expect("default intervals are valid")
    }

    pub fn n_steps(&self) -> usize {
        self.rows.len()
    }

    pub fn n_truth(&self) -> usize {
        self.n_truth
    }

    pub fn row(&self, t: usize) -> &[bool] {
        &self.rows[t - 1]
    }

    pub fn is_active(&self, t: usize, i: usize) -> bool {
        t >= 1 && t <= self.rows.len() && self.rows[t - 1][i]
    }

    pub fn active_count(&self, t: usize) -> usize {
        self.row(t).iter().filter(|&&a| a).count()
    }
}

pub const DEFAULT_INTERVALS: [(usize, usize); 4] = [(1, 140), (40, 160), (80, 180), (120, 201)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseLevel {
    /// Calibrate the noise to this SNR in dB.
    SnrDb(f64),
    /// Fixed noise standard deviation.
    Sigma(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseKind {
    #[default]
    Gaussian,
    Uniform,
}

impl NoiseKind {
    pub fn model(self, sigma: f64, network: RfNetwork) -> Result<SuperpositionalModel> {
        let map = Arc::new(RfSignalMap::new(network));
        Ok(match self {
            NoiseKind::Gaussian => SuperpositionalModel::additive(map, GaussianNoise::new(sigma)?),
            NoiseKind::Uniform => SuperpositionalModel::additive(map, UniformNoise::with_sigma(sigma)?),
        })
    }
}

/// Nearly-constant-velocity dynamics: sampling period and white
/// acceleration variance (per axis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dynamics {
    pub period: f64,
    pub accel_variance: f64,
}

impl Dynamics {
    pub fn survival(&self) -> Result<LinearGaussian> {
        LinearGaussian::constant_velocity_2d(self.period, self.accel_variance)
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub region: Region,
    pub network: RfNetwork,
    pub dynamics: Dynamics,
    pub birth_velocity_std: f64,
    pub birth_death: BirthDeathMatrix,
    pub schedule: ActivitySchedule,
    pub noise_level: NoiseLevel,
    pub noise_kind: NoiseKind,
    /// Reflect truth trajectories at the region boundary.
    pub reflect: bool,
    pub seed: u64,
}

impl Scenario {
    /// 20 m square, 24 perimeter nodes, T = 0.25 s, Sigma_w = 0.35 I,
    /// pi_b = 0.2, pi_d = 0.1, 200 steps, staircase schedule.
    pub fn rf_default(snr_db: f64, seed: u64) -> Self {
        let region = Region::square(20.0);
        Self {
            network: build_network(&region, 24, 5.0, 0.2).expect("default network is valid"),
            region,
            dynamics: Dynamics {
                period: 0.25,
                accel_variance: 0.35,
            },
            birth_velocity_std: 1.0,
            birth_death: BirthDeathMatrix::new(0.2, 0.1).expect("valid probabilities"),
            schedule: ActivitySchedule::staircase(200),
            noise_level: NoiseLevel::SnrDb(snr_db),
            noise_kind: NoiseKind::Gaussian,
            reflect: true,
            seed,
        }
    }

    pub fn n_steps(&self) -> usize {
        self.schedule.n_steps()
    }

    pub fn n_z(&self) -> usize {
        self.network.n_z()
    }

    pub fn birth_density(&self) -> UniformRegionBirth {
        UniformRegionBirth {
            region: self.region,
            velocity_std: self.birth_velocity_std,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps() == 0 {
            return Err(Error::InvalidConfig("scenario needs at least one step".into()));
        }
        if !self.region.is_valid() {
            return Err(Error::InvalidConfig("region has non-positive extent".into()));
        }
        if !(self.dynamics.period > 0.0 && self.dynamics.accel_variance > 0.0) {
            return Err(Error::InvalidConfig("period and process noise must be positive".into()));
        }
        if !(self.birth_velocity_std.is_finite() && self.birth_velocity_std >= 0.0) {
            return Err(Error::InvalidConfig("birth velocity std must be non-negative".into()));
        }
        match self.noise_level {
            NoiseLevel::SnrDb(db) if !db.is_finite() => {
                Err(Error::InvalidConfig(format!("SNR must be finite, got {db}")))
            }
            NoiseLevel::Sigma(s) if !(s.is_finite() && s > 0.0) => {
                Err(Error::InvalidConfig(format!("sigma_v must be positive, got {s}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// `states[t-1][i]`; only meaningful where `activity[t-1][i]` holds.
    pub states: Vec<Vec<ContinuousState>>,
    pub activity: Vec<Vec<bool>>,
    pub observations: Vec<Observation>,
    pub sigma_v: f64,
    /// `10 log10 <|s|^2> - 10 log10 <|v|^2>` over steps with signal, or
    /// `None` when no step has signal.
    pub realized_snr_db: Option<f64>,
}

impl GroundTruth {
    pub fn n_steps(&self) -> usize {
        self.observations.len()
    }

    pub fn n_truth(&self) -> usize {
        self.activity.first().map_or(0, Vec::len)
    }

    pub fn joint_state(&self, t: usize) -> MultiTargetState {
        MultiTargetState::new(
            self.states[t - 1]
                .iter()
                .zip(&self.activity[t - 1])
                .map(|(s, &a)| TargetSlot {
                    state: s.clone(),
                    activity: ActivityFlag::from(a),
                })
                .collect(),
        )
    }

    pub fn active_count(&self, t: usize) -> usize {
        self.activity[t - 1].iter().filter(|&&a| a).count()
    }
}

/// Noise standard deviation giving `snr_db` for the given signals, averaging
/// signal power over the steps where it is nonzero.
pub fn calibrate_noise(signal_history: &[SummedSignal], snr_db: f64) -> Result<f64> {
    let powers: Vec<(f64, usize)> = signal_history
        .iter()
        .map(|s| (s.power(), s.len()))
        .filter(|(p, _)| *p > 0.0)
        .collect();
    if powers.is_empty() {
        return Err(Error::ZeroSignal);
    }
    let mean_power = powers.iter().map(|(p, _)| p).sum::<f64>() / powers.len() as f64;
    let n_z = powers[0].1 as f64;
    let variance = mean_power / (n_z * 10f64.powf(snr_db / 10.0));
    Ok(variance.sqrt())
}

fn reflect_into(region: &Region, state: &ContinuousState) -> ContinuousState {
    let mut v: Vec<f64> = state.as_slice().to_vec();
    for (pos, vel, lo, hi) in [(0, 1, region.x_min, region.x_max), (2, 3, region.y_min, region.y_max)] {
        // a few folds suffice unless the step is many region widths long
        for _ in 0..8 {
            if v[pos] < lo {
                v[pos] = 2.0 * lo - v[pos];
                v[vel] = -v[vel];
            } else if v[pos] > hi {
                v[pos] = 2.0 * hi - v[pos];
                v[vel] = -v[vel];
            } else {
                break;
            }
        }
        v[pos] = v[pos].clamp(lo, hi);
    }
    ContinuousState::from_finite(v)
}

pub fn generate_truth(scn: &Scenario) -> Result<GroundTruth> {
    scn.validate()?;
    let survival = scn.dynamics.survival()?;
    let birth = scn.birth_density();
    let n_steps = scn.n_steps();
    let n_truth = scn.schedule.n_truth();

    let mut states: Vec<Vec<ContinuousState>> = Vec::with_capacity(n_steps);
    let mut rngs: Vec<_> = (0..n_truth)
        .map(|i| stream(scn.seed, 0, Purpose::Truth, i as u64))
        .collect();
    let mut current: Vec<ContinuousState> = rngs.iter_mut().map(|r| birth.sample(r)).collect();
    for t in 1..=n_steps {
        for (i, rng) in rngs.iter_mut().enumerate() {
            let on = scn.schedule.is_active(t, i);
            let was_on = scn.schedule.is_active(t - 1, i);
            current[i] = match (on, was_on) {
                (true, false) => birth.sample(rng),
                (true, true) => {
                    let moved = survival.sample(&current[i], rng);
                    if scn.reflect {
                        reflect_into(&scn.region, &moved)
                    } else {
                        moved
                    }
                }
                (false, _) => current[i].clone(),
            };
        }
        states.push(current.clone());
    }
    let activity: Vec<Vec<bool>> = (1..=n_steps).map(|t| scn.schedule.row(t).to_vec()).collect();

    let noiseless = SuperpositionalModel::new(
        Arc::new(RfSignalMap::new(scn.network.clone())),
        Arc::new(GaussianNoise::new(1.0)?),
    );
    let signals: Vec<SummedSignal> = (0..n_steps)
        .map(|t| {
            let joint = MultiTargetState::new(
                states[t]
                    .iter()
                    .zip(&activity[t])
                    .map(|(s, &a)| TargetSlot {
                        state: s.clone(),
                        activity: a.into(),
                    })
                    .collect(),
            );
            superpose(&joint, &noiseless)
        })
        .collect();

    let sigma_v = match scn.noise_level {
        NoiseLevel::SnrDb(db) => calibrate_noise(&signals, db)?,
        NoiseLevel::Sigma(s) => s,
    };
    let model = scn.noise_kind.model(sigma_v, scn.network.clone())?;
    let noise = model.noise.as_ref().ok_or(Error::MissingNoiseSampler)?;

    let mut observations = Vec::with_capacity(n_steps);
    let (mut signal_power, mut noise_power, mut counted) = (0.0, 0.0, 0usize);
    for (t, s) in signals.iter().enumerate() {
        let mut rng = stream(scn.seed, t as u64 + 1, Purpose::Noise, 0);
        let v = noise.sample(s.len(), &mut rng);
        let p = s.power();
        if p > 0.0 {
            signal_power += p;
            noise_power += power(&v);
            counted += 1;
        }
        let z = s.as_slice().iter().zip(&v).map(|(a, b)| a + b).collect();
        observations.push(Observation::new(z)?);
    }
    let realized_snr_db =
        (counted > 0).then(|| 10.0 * (signal_power / noise_power).log10());

    Ok(GroundTruth {
        states,
        activity,
        observations,
        sigma_v,
        realized_snr_db,
    })
}
