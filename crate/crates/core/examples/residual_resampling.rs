//! Residual versus multinomial resampling: residual keeps the integer part
//! of every expected count and so has lower offspring-count variance.

use tbdpf::random::{stream, Purpose};
use tbdpf::ResamplingPolicy;

fn main() {
    let weights = [0.35, 0.25, 0.25, 0.15, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let n = weights.len();
    let trials = 20_000;
    for policy in [ResamplingPolicy::Residual, ResamplingPolicy::Multinomial] {
        let mut rng = stream(7, 0, Purpose::User, 0);
        let mut sum = vec![0.0; n];
        let mut sum_sq = vec![0.0; n];
        for _ in 0..trials {
            let mut counts = vec![0.0; n];
            for i in policy.resample(&weights, &mut rng).unwrap() {
                counts[i] += 1.0;
            }
            for k in 0..n {
                sum[k] += counts[k];
                sum_sq[k] += counts[k] * counts[k];
            }
        }
        println!("{policy:?}");
        for k in 0..4 {
            let mean = sum[k] / trials as f64;
            let var = sum_sq[k] / trials as f64 - mean * mean;
            println!("  w={:.2}: expected {:.2}, mean {:.3}, variance {:.3}", weights[k], n as f64 * weights[k], mean, var);
        }
    }
}
