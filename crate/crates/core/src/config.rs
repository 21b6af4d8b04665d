//! TOML experiment configuration.
//!
//! Every field has a default, so an empty file describes the reference RF
//! experiment. See `README.md` for the full schema.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::metrics::OspaParams;
use crate::resample::ResamplingPolicy;
use crate::sim::{build_network, ActivitySchedule, Dynamics, NoiseKind, NoiseLevel, Scenario, DEFAULT_INTERVALS};
use crate::state::BirthDeathMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub scenario: ScenarioConfig,
    pub filter: FilterSettings,
    pub ospa: OspaConfig,
    pub sweep: SweepConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            scenario: ScenarioConfig::default(),
            filter: FilterSettings::default(),
            ospa: OspaConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NoiseName {
    #[default]
    Gaussian,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ResamplingName {
    #[default]
    Residual,
    Multinomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub width_m: f64,
    pub height_m: f64,
    pub n_nodes: usize,
    pub phi: f64,
    pub sigma_h_m: f64,
    pub period_s: f64,
    pub process_noise_var: f64,
    pub birth_velocity_std_mps: f64,
    pub pi_b: f64,
    pub pi_d: f64,
    pub n_steps: usize,
    pub snr_db: f64,
    /// Fixed noise std; overrides `snr_db` when set.
    pub sigma_v: Option<f64>,
    pub noise: NoiseName,
    pub reflect: bool,
    /// `[start, end)` step interval per truth target (1-based).
    pub schedule: Vec<[usize; 2]>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            width_m: 20.0,
            height_m: 20.0,
            n_nodes: 24,
            phi: 5.0,
            sigma_h_m: 0.2,
            period_s: 0.25,
            process_noise_var: 0.35,
            birth_velocity_std_mps: 1.0,
            pi_b: 0.2,
            pi_d: 0.1,
            n_steps: 200,
            snr_db: -5.0,
            sigma_v: None,
            noise: NoiseName::Gaussian,
            reflect: true,
            schedule: DEFAULT_INTERVALS.iter().map(|&(s, e)| [s, e]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterSettings {
    pub particles: usize,
    pub n_max: usize,
    pub resampling: ResamplingName,
    pub initial_active_prob: f64,
}

impl Default for FilterSettings {
    fn default() -> Self {
        Self {
            particles: 2000,
            n_max: 4,
            resampling: ResamplingName::Residual,
            initial_active_prob: 0.0,
        }
    }
}

impl FilterSettings {
    pub fn resampling_policy(&self) -> ResamplingPolicy {
        match self.resampling {
            ResamplingName::Residual => ResamplingPolicy::Residual,
            ResamplingName::Multinomial => ResamplingPolicy::Multinomial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OspaConfig {
    pub cutoff_m: f64,
    pub order: f64,
}

impl Default for OspaConfig {
    fn default() -> Self {
        let d = OspaParams::default();
        Self {
            cutoff_m: d.cutoff,
            order: d.order,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub snr_db: Vec<f64>,
    pub trials: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            snr_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0],
            trials: 100,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            message: e.to_string().trim_end().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// First 16 hex digits of the SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        hex::encode(digest)[..16].to_string()
    }

    pub fn ospa_params(&self) -> Result<OspaParams> {
        OspaParams::new(self.ospa.cutoff_m, self.ospa.order)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario(self.seed)?.validate()?;
        self.ospa_params()?;
        let f = &self.filter;
        if f.particles == 0 || f.n_max == 0 {
            return Err(Error::InvalidConfig("filter.particles and filter.n_max must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&f.initial_active_prob) {
            return Err(Error::InvalidConfig("filter.initial_active_prob must lie in [0, 1]".into()));
        }
        if self.sweep.trials == 0 {
            return Err(Error::InvalidConfig("sweep.trials must be at least 1".into()));
        }
        Ok(())
    }

    /// Scenario for one trial, seeded with `seed`.
    pub fn scenario(&self, seed: u64) -> Result<Scenario> {
        let s = &self.scenario;
        let region = Region {
            x_min: 0.0,
            x_max: s.width_m,
            y_min: 0.0,
            y_max: s.height_m,
        };
        if !region.is_valid() {
            return Err(Error::InvalidConfig("scenario.width_m and height_m must be positive".into()));
        }
        let intervals: Vec<(usize, usize)> = s.schedule.iter().map(|&[a, b]| (a, b)).collect();
        Ok(Scenario {
            network: build_network(&region, s.n_nodes, s.phi, s.sigma_h_m)?,
            region,
            dynamics: Dynamics {
                period: s.period_s,
                accel_variance: s.process_noise_var,
            },
            birth_velocity_std: s.birth_velocity_std_mps,
            birth_death: BirthDeathMatrix::new(s.pi_b, s.pi_d)?,
            schedule: ActivitySchedule::from_intervals(s.n_steps, &intervals)?,
            noise_level: match s.sigma_v {
                Some(sigma) => NoiseLevel::Sigma(sigma),
                None => NoiseLevel::SnrDb(s.snr_db),
            },
            noise_kind: match s.noise {
                NoiseName::Gaussian => NoiseKind::Gaussian,
                NoiseName::Uniform => NoiseKind::Uniform,
            },
            reflect: s.reflect,
            seed,
        })
    }
}
