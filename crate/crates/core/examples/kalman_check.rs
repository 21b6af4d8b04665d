//! With one always-on target and a linear-Gaussian model the posterior is
//! Gaussian, so the particle filter should reproduce the Kalman filter.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use tbdpf::estimate::mmse_state;
use tbdpf::filter::{initialize, step, FilterConfig};
use tbdpf::observation::{GaussianNoise, SignalMap, SuperpositionalModel};
use tbdpf::random::{stream, Purpose};
use tbdpf::state::{
    BirthDeathMatrix, ContinuousState, DiagonalGaussian, InitialDistribution, LinearGaussian, TransitionModel,
};
use tbdpf::Observation;

#[derive(Debug)]
struct Direct;

impl SignalMap for Direct {
    fn n_z(&self) -> usize {
        1
    }

    fn accumulate(&self, s: &ContinuousState, acc: &mut [f64]) {
        acc[0] += s[0];
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (a, q, r) = (0.95_f64, 0.5_f64, 1.0_f64);
    let (m0, p0) = (1.0_f64, 2.0_f64);

    let mut rng = stream(3, 0, Purpose::User, 0);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut x = m0 + p0.sqrt() * normal();
    let zs: Vec<f64> = (0..30)
        .map(|_| {
            x = a * x + q.sqrt() * normal();
            x + r.sqrt() * normal()
        })
        .collect();

    let scalar = |v: f64| DMatrix::from_element(1, 1, v);
    let prior = Arc::new(DiagonalGaussian { mean: vec![m0], std: vec![p0.sqrt()] });
    let transition = TransitionModel::new(
        Arc::new(LinearGaussian::new(&scalar(a), &scalar(1.0), &scalar(q))?),
        prior.clone(),
        BirthDeathMatrix::new(0.0, 0.0)?,
    )?;
    let observation = SuperpositionalModel::additive(Arc::new(Direct), GaussianNoise::new(r.sqrt())?);
    let initial = InitialDistribution { state: prior, p_active: 1.0 };
    let config = FilterConfig::new(5000, 1, transition, initial, observation, 11)?;

    let mut set = initialize(&config);
    let (mut m, mut p) = (m0, p0);
    println!("{:>3} {:>9} {:>9} {:>9} {:>9} {:>7}", "t", "kalman", "particle", "P kalman", "P part.", "ESS");
    for (t, &z) in zs.iter().enumerate() {
        let (mp, pp) = (a * m, a * a * p + q);
        let gain = pp / (pp + r);
        m = mp + gain * (z - mp);
        p = (1.0 - gain) * pp;

        set = step(&set, &Observation::new(vec![z])?, &config)?;
        let mean = mmse_state(&set, 0)?.expect("target always on")[0];
        let var: f64 = set
            .particles()
            .iter()
            .map(|pt| pt.log_weight.exp() * (pt.state.targets()[0].state[0] - mean).powi(2))
            .sum();
        println!("{:>3} {m:>9.4} {mean:>9.4} {p:>9.4} {var:>9.4} {:>7.0}", t + 1, set.effective_sample_size());
    }
    Ok(())
}
