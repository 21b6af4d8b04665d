//! Builds the 24-node perimeter network, simulates ground truth for a
//! staggered four-target schedule, and checks the noise calibration.

use tbdpf::sim::{generate_truth, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scn = Scenario::rf_default(-5.0, 42);
    let net = &scn.network;
    println!("{} nodes, {} links, phi {}, sigma_h {} m", net.nodes().len(), net.n_z(), net.phi(), net.sigma_h());
    for l in [0, 1, net.n_z() - 1] {
        let (a, b) = net.link_endpoints(l);
        println!("  link {l:3}: ({:.2}, {:.2}) -> ({:.2}, {:.2})", a.x, a.y, b.x, b.y);
    }

    let truth = generate_truth(&scn)?;
    println!(
        "sigma_v {:.4}, realized SNR {:.3} dB over {} steps",
        truth.sigma_v,
        truth.realized_snr_db.unwrap_or(f64::NAN),
        truth.n_steps()
    );
    for t in [1, 40, 80, 120, 160, 200] {
        let positions: Vec<String> = (0..truth.n_truth())
            .filter(|&i| truth.activity[t - 1][i])
            .map(|i| {
                let x = &truth.states[t - 1][i];
                format!("#{i} ({:.1}, {:.1})", x[0], x[2])
            })
            .collect();
        println!("t={t:3}: {} active  {}", truth.active_count(t), positions.join("  "));
    }
    Ok(())
}
