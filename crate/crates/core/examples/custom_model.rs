//! A user-defined complex-valued sensor: a line array of receivers picks up
//! a phasor from each target whose amplitude decays with range and whose
//! phase advances with it. Phasors add, so the model is superpositional and
//! the stock filter runs on it unchanged.

use std::sync::Arc;

use num_complex::Complex64;
use tbdpf::estimate::extract;
use tbdpf::filter::{initialize, step, FilterConfig};
use tbdpf::observation::{sample_observation, GaussianNoise, SignalMap, SuperpositionalModel};
use tbdpf::random::{stream, Purpose};
use tbdpf::state::{
    sample_joint_transition, ActivityFlag, BirthDeathMatrix, ContinuousState, DiagonalGaussian,
    InitialDistribution, LinearGaussian, MultiTargetState, TargetSlot, TransitionModel,
};
use nalgebra::DMatrix;

#[derive(Debug)]
struct PhasorArray {
    receivers: Vec<f64>,
    standoff: f64,
    wavenumber: f64,
}

impl SignalMap<Complex64> for PhasorArray {
    fn n_z(&self) -> usize {
        self.receivers.len()
    }

    fn accumulate(&self, s: &ContinuousState, acc: &mut [Complex64]) {
        for (out, &rx) in acc.iter_mut().zip(&self.receivers) {
            let range = (s[0] - rx).hypot(self.standoff);
            *out += Complex64::from_polar(4.0 / range, self.wavenumber * range);
        }
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let period = 0.5;
    let survival = LinearGaussian::new(
        &DMatrix::from_row_slice(2, 2, &[1.0, period, 0.0, 1.0]),
        &DMatrix::from_column_slice(2, 1, &[period * period / 2.0, period]),
        &DMatrix::from_element(1, 1, 0.05),
    )?;
    let birth = Arc::new(DiagonalGaussian { mean: vec![10.0, 0.0], std: vec![5.0, 0.5] });
    let transition = TransitionModel::new(Arc::new(survival), birth.clone(), BirthDeathMatrix::new(0.1, 0.05)?)?;
    let sensor = Arc::new(PhasorArray {
        receivers: (0..16).map(|i| 1.25 * i as f64).collect(),
        standoff: 2.0,
        wavenumber: 1.3,
    });
    let observation = SuperpositionalModel::additive(sensor, GaussianNoise::new(0.4)?);

    // two targets crossing the array in opposite directions
    let mut truth = MultiTargetState::new(vec![
        TargetSlot { state: ContinuousState::new([3.0, 0.4])?, activity: ActivityFlag::Active },
        TargetSlot { state: ContinuousState::new([17.0, -0.3])?, activity: ActivityFlag::Active },
    ]);
    let truth_model = TransitionModel::new(transition.survival.clone(), birth.clone(), BirthDeathMatrix::new(0.0, 0.0)?)?;

    let initial = InitialDistribution::all_inactive(birth);
    let config = FilterConfig::new(3000, 3, transition, initial, observation, 5)?;
    let mut set = initialize(&config);
    for t in 1..=40u64 {
        truth = sample_joint_transition(&truth, &truth_model, &mut stream(99, t, Purpose::Truth, 0));
        let z = sample_observation(&truth, &config.observation, &mut stream(99, t, Purpose::Noise, 0))?;
        set = step(&set, &z, &config)?;
        if t % 5 == 0 {
            let est = extract(&set);
            let declared: Vec<String> = est.active_states().map(|s| format!("{:.2}", s[0])).collect();
            let actual: Vec<String> = truth.active_states().map(|s| format!("{:.2}", s[0])).collect();
            println!("t={t:2}  truth [{}]  estimate [{}]", actual.join(", "), declared.join(", "));
        }
    }
    Ok(())
}
