use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tbdpf::config::ExperimentConfig;
use tbdpf::experiment::{
    ospa_csv, run_on_truth, run_sweep, summary_text, sweep_csv, sweep_trials_csv, tracks_csv,
};
use tbdpf::sim::generate_truth;
use tbdpf::sim::io::{read_truth, write_truth, Meta};
use tbdpf::{plot, Error};

#[derive(Parser)]
#[command(name = "tbdpf", version, about = "Multi-target track-before-detect particle filter")]
struct Cli {
    /// Worker threads for sweeps and particle updates (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write its truth CSVs.
    Generate(Common),
    /// Run one trial and write tracks, OSPA and a summary.
    Track {
        #[command(flatten)]
        common: Common,
        /// Replay truth previously written by `generate` instead of simulating.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Mean and standard deviation of time-averaged OSPA versus SNR.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trials: Option<usize>,
        /// SNR levels in dB, comma separated (default: from the config).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        snr_list: Option<Vec<f64>>,
    },
    /// Render SVG figures from the CSVs in a directory.
    Plot {
        /// Directory holding the CSV reports.
        #[arg(long = "in", default_value = ".")]
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<f64>,
    #[arg(long)]
    particles: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path).map_err(|e| match e {
                Error::Io(io) => Error::InvalidConfig(format!("{}: {io}", path.display())),
                other => other,
            })?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(snr) = self.snr {
            cfg.scenario.snr_db = snr;
            cfg.scenario.sigma_v = None;
        }
        if let Some(n) = self.particles {
            cfg.filter.particles = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::DegenerateLikelihood { .. } | Error::NonFinite(_) | Error::Unnormalized { .. } => 3,
        Error::Io(_) | Error::MissingNoiseSampler => 1,
        _ => 2,
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), Error> {
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn provenance(cfg: &ExperimentConfig) -> Meta {
    let mut meta = Meta::new();
    meta.insert("seed".into(), cfg.seed.to_string());
    meta.insert("config_hash".into(), cfg.hash());
    meta
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidConfig(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Generate(common) => {
            let cfg = common.load()?;
            let truth = generate_truth(&cfg.scenario(cfg.seed)?)?;
            fs::create_dir_all(&common.out)?;
            write_truth(&common.out, &truth, &provenance(&cfg))?;
            write(&common.out, "run.toml", &cfg.to_toml())?;
            match truth.realized_snr_db {
                Some(snr) => eprintln!("realized SNR {snr:.3} dB, sigma_v {:.6}", truth.sigma_v),
                None => eprintln!("no target signal, sigma_v {:.6}", truth.sigma_v),
            }
        }
        Command::Track { common, truth } => {
            let cfg = common.load()?;
            let scn = cfg.scenario(cfg.seed)?;
            let truth = match truth {
                Some(dir) => {
                    let (t, _) = read_truth(&dir)?;
                    if t.observations.first().is_some_and(|z| z.len() != scn.n_z()) {
                        return Err(Error::InvalidConfig(format!(
                            "{}: observations have {} links, configuration has {}",
                            dir.display(),
                            t.observations[0].len(),
                            scn.n_z()
                        )));
                    }
                    t
                }
                None => generate_truth(&scn)?,
            };
            let report = run_on_truth(&cfg, &scn, truth, cfg.seed)?;
            fs::create_dir_all(&common.out)?;
            write_truth(&common.out, &report.truth, &report.meta())?;
            write(&common.out, "tracks.csv", &tracks_csv(&report))?;
            write(&common.out, "ospa.csv", &ospa_csv(&report))?;
            write(&common.out, "summary.txt", &summary_text(&report))?;
            write(&common.out, "run.toml", &cfg.to_toml())?;
            eprintln!(
                "mean OSPA {:.4} m, cardinality match {:.1}% of steps",
                report.mean_ospa(),
                100.0 * report.cardinality_accuracy()
            );
        }
        Command::Sweep { common, trials, snr_list } => {
            let mut cfg = common.load()?;
            if let Some(n) = trials {
                cfg.sweep.trials = n;
            }
            if let Some(list) = snr_list {
                cfg.sweep.snr_db = list;
            }
            cfg.validate()?;
            let table = run_sweep(&cfg, &cfg.sweep.snr_db.clone(), cfg.sweep.trials)?;
            fs::create_dir_all(&common.out)?;
            write(&common.out, "sweep.csv", &sweep_csv(&table))?;
            write(&common.out, "sweep_trials.csv", &sweep_trials_csv(&table))?;
            write(&common.out, "run.toml", &cfg.to_toml())?;
            for row in &table.rows {
                eprintln!("SNR {:>6.1} dB: OSPA {:.4} +- {:.4} m", row.snr_db, row.ospa_mean(), row.ospa_std());
            }
        }
        Command::Plot { input, out } => {
            for path in plot::render_dir(&input, &out)? {
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
