//! Single-trial runs and SNR sweeps over the RF scenario, plus their CSV
//! reports.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::estimate::{extract, TrackEstimate};
use crate::filter::{initialize, step, FilterConfig};
use crate::geometry::Point;
use crate::metrics::{ospa, OspaParams, PointSet};
use crate::random::trial_seed;
use crate::sim::io::{format_meta, Meta};
use crate::sim::{generate_truth, GroundTruth, Scenario};
use crate::state::{InitialDistribution, TransitionModel};

/// Offset separating filter seeds from scenario seeds.
const FILTER_SEED_STREAM: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub estimate: TrackEstimate,
    pub n_true: usize,
    pub n_est: usize,
    pub ospa: f64,
    pub ess: f64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub seed: u64,
    pub config_hash: String,
    pub truth: GroundTruth,
    pub steps: Vec<StepRecord>,
    pub wall_clock_s: f64,
}

impl RunReport {
    pub fn mean_ospa(&self) -> f64 {
        if self.steps.is_empty() {
            return 0.0;
        }
        self.steps.iter().map(|s| s.ospa).sum::<f64>() / self.steps.len() as f64
    }

    /// Fraction of steps whose declared target count equals the truth count.
    pub fn cardinality_accuracy(&self) -> f64 {
        if self.steps.is_empty() {
            return 1.0;
        }
        self.steps.iter().filter(|s| s.n_true == s.n_est).count() as f64 / self.steps.len() as f64
    }

    pub fn meta(&self) -> Meta {
        report_meta(self.seed, &self.config_hash)
    }
}

fn report_meta(seed: u64, hash: &str) -> Meta {
    let mut meta = Meta::new();
    meta.insert("seed".into(), seed.to_string());
    meta.insert("config_hash".into(), hash.to_string());
    meta.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    meta
}

/// Filter matched to a scenario: same dynamics, birth density and
/// birth/death chain, likelihood with the scenario's noise level.
pub fn filter_config(cfg: &ExperimentConfig, scn: &Scenario, sigma_v: f64, seed: u64) -> Result<FilterConfig> {
    let birth = Arc::new(scn.birth_density());
    let transition = TransitionModel::new(Arc::new(scn.dynamics.survival()?), birth.clone(), scn.birth_death)?;
    let initial = InitialDistribution {
        state: birth,
        p_active: cfg.filter.initial_active_prob,
    };
    let observation = scn.noise_kind.model(sigma_v, scn.network.clone())?;
    let mut fc = FilterConfig::new(cfg.filter.particles, cfg.filter.n_max, transition, initial, observation, seed)?;
    fc.resampling = cfg.filter.resampling_policy();
    Ok(fc)
}

fn position(s: &crate::state::ContinuousState) -> Point {
    Point::new(s[0], s[2])
}

/// Filters a given truth and scores every step.
pub fn run_on_truth(cfg: &ExperimentConfig, scn: &Scenario, truth: GroundTruth, seed: u64) -> Result<RunReport> {
    let started = Instant::now();
    let params = cfg.ospa_params()?;
    let fc = filter_config(cfg, scn, truth.sigma_v, trial_seed(seed, FILTER_SEED_STREAM))?;
    let mut set = initialize(&fc);
    let mut steps = Vec::with_capacity(truth.n_steps());
    for (t, z) in truth.observations.iter().enumerate() {
        set = step(&set, z, &fc)?;
        let estimate = extract(&set);
        steps.push(score(t + 1, estimate, &truth, &params, set.effective_sample_size())?);
    }
    Ok(RunReport {
        seed,
        config_hash: cfg.hash(),
        truth,
        steps,
        wall_clock_s: started.elapsed().as_secs_f64(),
    })
}

fn score(step: usize, estimate: TrackEstimate, truth: &GroundTruth, params: &OspaParams, ess: f64) -> Result<StepRecord> {
    let truth_set = PointSet::new(
        truth.states[step - 1]
            .iter()
            .zip(&truth.activity[step - 1])
            .filter(|(_, &a)| a)
            .map(|(s, _)| position(s))
            .collect(),
    )?;
    let est_set = PointSet::new(estimate.active_states().map(position).collect())?;
    Ok(StepRecord {
        step,
        n_true: truth_set.len(),
        n_est: est_set.len(),
        ospa: ospa(&est_set, &truth_set, params),
        estimate,
        ess,
    })
}

/// Generates truth for `seed` and runs the filter on it.
pub fn run_trial(cfg: &ExperimentConfig, seed: u64) -> Result<RunReport> {
    let scn = cfg.scenario(seed)?;
    let truth = generate_truth(&scn)?;
    run_on_truth(cfg, &scn, truth, seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub seed: u64,
    pub mean_ospa: f64,
    pub cardinality_accuracy: f64,
    pub realized_snr_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub snr_db: f64,
    pub trials: Vec<TrialSummary>,
}

impl SweepRow {
    pub fn ospa_mean(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.mean_ospa))
    }

    /// Sample standard deviation across trials (0 for a single trial).
    pub fn ospa_std(&self) -> f64 {
        sample_std(self.trials.iter().map(|t| t.mean_ospa))
    }

    pub fn realized_snr_mean(&self) -> Option<f64> {
        let v: Vec<f64> = self.trials.iter().filter_map(|t| t.realized_snr_db).collect();
        (!v.is_empty()).then(|| mean(v.into_iter()))
    }

    pub fn cardinality_accuracy_mean(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.cardinality_accuracy))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub seed: u64,
    pub config_hash: String,
    pub rows: Vec<SweepRow>,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn sample_std(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values.clone());
    (values.map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64).sqrt()
}

/// `n_trials` trials per SNR. Trial `k` uses the same seed at every SNR, so
/// levels differ only in noise scale.
pub fn run_sweep(cfg: &ExperimentConfig, snr_list: &[f64], n_trials: usize) -> Result<SweepTable> {
    let jobs: Vec<(usize, u64)> = (0..snr_list.len())
        .flat_map(|i| (0..n_trials as u64).map(move |k| (i, k)))
        .collect();
    let results: Vec<TrialSummary> = jobs
        .par_iter()
        .map(|&(i, k)| {
            let mut c = cfg.clone();
            c.scenario.snr_db = snr_list[i];
            c.scenario.sigma_v = None;
            let seed = trial_seed(cfg.seed, k);
            let report = run_trial(&c, seed)?;
            log::info!(
                "snr {:+} dB trial {k}: mean OSPA {:.3} m ({:.1} s)",
                snr_list[i],
                report.mean_ospa(),
                report.wall_clock_s
            );
            Ok(TrialSummary {
                seed,
                mean_ospa: report.mean_ospa(),
                cardinality_accuracy: report.cardinality_accuracy(),
                realized_snr_db: report.truth.realized_snr_db,
            })
        })
        .collect::<Result<_>>()?;
    let mut results = results.into_iter();
    let rows = snr_list
        .iter()
        .map(|&snr_db| SweepRow {
            snr_db,
            trials: results.by_ref().take(n_trials).collect(),
        })
        .collect();
    Ok(SweepTable {
        seed: cfg.seed,
        config_hash: cfg.hash(),
        rows,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

/// `step,target,activity_prob,active,x_m,vx_mps,y_m,vy_mps`; state columns
/// are empty for targets not declared active.
pub fn tracks_csv(report: &RunReport) -> String {
    let mut out = format!("# tbdpf tracks v1\n{}\n", format_meta(&report.meta()));
    out.push_str("step,target,activity_prob,active,x_m,vx_mps,y_m,vy_mps\n");
    for rec in &report.steps {
        for (j, t) in rec.estimate.per_target.iter().enumerate() {
            let _ = write!(out, "{},{},{},{}", rec.step, j, t.activity_prob, t.active() as u8);
            match &t.state_mean {
                Some(s) => s.as_slice().iter().for_each(|v| {
                    let _ = write!(out, ",{v}");
                }),
                None => out.push_str(",,,,"),
            }
            out.push('\n');
        }
    }
    out
}

/// `step,n_true,n_est,ospa_m,ess`.
pub fn ospa_csv(report: &RunReport) -> String {
    let mut out = format!("# tbdpf ospa v1\n{}\n", format_meta(&report.meta()));
    out.push_str("step,n_true,n_est,ospa_m,ess\n");
    for r in &report.steps {
        let _ = writeln!(out, "{},{},{},{},{}", r.step, r.n_true, r.n_est, r.ospa, r.ess);
    }
    out
}

/// Run summary; the only output that carries wall-clock time.
pub fn summary_text(report: &RunReport) -> String {
    format!(
        "seed = {}\nconfig_hash = \"{}\"\nsteps = {}\nmean_ospa_m = {}\ncardinality_accuracy = {}\nsigma_v = {}\nrealized_snr_db = {}\nwall_clock_s = {:.3}\n",
        report.seed,
        report.config_hash,
        report.steps.len(),
        report.mean_ospa(),
        report.cardinality_accuracy(),
        report.truth.sigma_v,
        report.truth.realized_snr_db.map_or("nan".to_string(), |v| v.to_string()),
        report.wall_clock_s,
    )
}

/// `snr_db,trials,ospa_mean_m,ospa_std_m,cardinality_accuracy,realized_snr_db`.
pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = format!(
        "# tbdpf sweep v1\n{}\n",
        format_meta(&report_meta(table.seed, &table.config_hash))
    );
    out.push_str("snr_db,trials,ospa_mean_m,ospa_std_m,cardinality_accuracy,realized_snr_db\n");
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.snr_db,
            r.trials.len(),
            r.ospa_mean(),
            r.ospa_std(),
            r.cardinality_accuracy_mean(),
            opt(r.realized_snr_mean())
        );
    }
    out
}

/// `snr_db,trial,seed,mean_ospa_m,cardinality_accuracy,realized_snr_db`.
pub fn sweep_trials_csv(table: &SweepTable) -> String {
    let mut out = format!(
        "# tbdpf sweep-trials v1\n{}\n",
        format_meta(&report_meta(table.seed, &table.config_hash))
    );
    out.push_str("snr_db,trial,seed,mean_ospa_m,cardinality_accuracy,realized_snr_db\n");
    for r in &table.rows {
        for (k, t) in r.trials.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.snr_db,
                k,
                t.seed,
                t.mean_ospa,
                t.cardinality_accuracy,
                opt(t.realized_snr_db)
            );
        }
    }
    out
}
