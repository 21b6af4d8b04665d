//! One trial of the RF tomography scenario: simulate, filter, score, and
//! write the CSV reports plus SVG figures.
//!
//! ```text
//! cargo run --release --example rf_tracking -- [snr_db] [particles] [out_dir]
//! ```

use std::fs;
use std::path::PathBuf;

use tbdpf::config::ExperimentConfig;
use tbdpf::experiment::{ospa_csv, run_trial, tracks_csv};
use tbdpf::plot::render_dir;
use tbdpf::sim::io::write_truth;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let mut cfg = ExperimentConfig::default();
    if let Some(snr) = args.next() {
        cfg.scenario.snr_db = snr.parse()?;
    }
    cfg.filter.particles = args.next().map(|n| n.parse()).transpose()?.unwrap_or(1000);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "rf_tracking_out".into()));

    let report = run_trial(&cfg, cfg.seed)?;
    println!(
        "{} steps, {} particles, realized SNR {:.2} dB",
        report.steps.len(),
        cfg.filter.particles,
        report.truth.realized_snr_db.unwrap_or(f64::NAN)
    );
    for rec in report.steps.iter().step_by(20) {
        let probs: Vec<String> = rec.estimate.per_target.iter().map(|t| format!("{:.2}", t.activity_prob)).collect();
        println!(
            "t={:3}  true {}  declared {}  OSPA {:.2} m  P(active) [{}]",
            rec.step,
            rec.n_true,
            rec.n_est,
            rec.ospa,
            probs.join(" ")
        );
    }
    println!(
        "mean OSPA {:.3} m, count correct on {:.0}% of steps",
        report.mean_ospa(),
        100.0 * report.cardinality_accuracy()
    );

    fs::create_dir_all(&out)?;
    write_truth(&out, &report.truth, &report.meta())?;
    fs::write(out.join("tracks.csv"), tracks_csv(&report))?;
    fs::write(out.join("ospa.csv"), ospa_csv(&report))?;
    for path in render_dir(&out, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
