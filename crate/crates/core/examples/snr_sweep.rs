//! Mean and spread of time-averaged OSPA across SNR levels, on a reduced
//! budget so it finishes in about a minute.
//!
//! ```text
//! cargo run --release --example snr_sweep -- [trials] [particles]
//! ```

use tbdpf::config::ExperimentConfig;
use tbdpf::experiment::run_sweep;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let trials: usize = args.next().map(|v| v.parse()).transpose()?.unwrap_or(3);
    let mut cfg = ExperimentConfig::default();
    cfg.filter.particles = args.next().map(|v| v.parse()).transpose()?.unwrap_or(500);

    let snrs = [-10.0, -5.0, 0.0, 5.0, 10.0];
    let table = run_sweep(&cfg, &snrs, trials)?;
    println!("config {}  seed {}  {trials} trials per level", table.config_hash, table.seed);
    println!("{:>8} {:>10} {:>10} {:>10}", "SNR dB", "OSPA m", "std m", "count ok");
    for row in &table.rows {
        println!(
            "{:>8.1} {:>10.3} {:>10.3} {:>9.0}%",
            row.snr_db,
            row.ospa_mean(),
            row.ospa_std(),
            100.0 * row.cardinality_accuracy_mean()
        );
    }
    Ok(())
}
