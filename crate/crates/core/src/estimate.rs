//! Point estimates from a particle posterior.
//!
//! For target model `j`, the activity probability is `sum_k w_k a_jk`; the
//! target is declared active when that probability is at least 1/2. Its
//! state estimate is the posterior mean conditional on being active.

use crate::error::{Error, Result};
use crate::filter::ParticleSet;
use crate::state::{ActivityFlag, ContinuousState};

/// Denominators below this count as "no active support".
pub const MIN_ACTIVE_MASS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TargetEstimate {
    pub activity_prob: f64,
    /// Present iff the target is declared active and has active support.
    pub state_mean: Option<ContinuousState>,
}

impl TargetEstimate {
    pub fn active(&self) -> bool {
        declare(self.activity_prob).is_active()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackEstimate {
    pub per_target: Vec<TargetEstimate>,
}

impl TrackEstimate {
    pub fn active_count(&self) -> usize {
        self.per_target.iter().filter(|t| t.active()).count()
    }

    /// State means of the declared-active targets.
    pub fn active_states(&self) -> impl Iterator<Item = &ContinuousState> {
        self.per_target.iter().filter_map(|t| t.state_mean.as_ref())
    }
}

fn check_index(ps: &ParticleSet, j: usize) -> Result<()> {
    if j >= ps.n_max() {
        return Err(Error::IndexOutOfRange { index: j, len: ps.n_max() });
    }
    Ok(())
}

fn declare(prob: f64) -> ActivityFlag {
    // step function with u(0) = 1
    ActivityFlag::from(prob >= 0.5)
}

/// Posterior probability that target model `j` (0-based) is active.
pub fn activity_probability(ps: &ParticleSet, j: usize) -> Result<f64> {
    check_index(ps, j)?;
    let p: f64 = ps
        .particles()
        .iter()
        .filter(|p| p.state.targets()[j].activity.is_active())
        .map(|p| p.log_weight.exp())
        .sum();
    Ok(p.clamp(0.0, 1.0))
}

pub fn mmse_activity(ps: &ParticleSet, j: usize) -> Result<ActivityFlag> {
    activity_probability(ps, j).map(declare)
}

/// Conditional posterior mean of target `j` given that it is active, or
/// `None` when no particle carries it.
pub fn mmse_state(ps: &ParticleSet, j: usize) -> Result<Option<ContinuousState>> {
    check_index(ps, j)?;
    let mut mass = 0.0;
    let mut sum: Vec<f64> = Vec::new();
    for p in ps.particles() {
        let slot = &p.state.targets()[j];
        if !slot.activity.is_active() {
            continue;
        }
        let w = p.log_weight.exp();
        if sum.is_empty() {
            sum = vec![0.0; slot.state.dim()];
        }
        for (acc, x) in sum.iter_mut().zip(slot.state.as_slice()) {
            *acc += w * x;
        }
        mass += w;
    }
    if mass < MIN_ACTIVE_MASS {
        return Ok(None);
    }
    ContinuousState::new(sum.into_iter().map(|v| v / mass)).map(Some)
}

pub fn extract(ps: &ParticleSet) -> TrackEstimate {
    let per_target = (0..ps.n_max())
        .map(|j| {
            // j < n_max, so neither call can fail
            let activity_prob = activity_probability(ps, j).unwrap_or(0.0);
            let state_mean = if declare(activity_prob).is_active() {
                mmse_state(ps, j).ok().flatten()
            } else {
                None
            };
            TargetEstimate {
                activity_prob,
                state_mean,
            }
        })
        .collect();
    TrackEstimate { per_target }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::Particle;
    use crate::state::{MultiTargetState, TargetSlot};
    use proptest::prelude::*;

    fn particle(w: f64, targets: &[(f64, bool)]) -> Particle {
        Particle {
            state: MultiTargetState::new(
                targets
                    .iter()
                    .map(|&(x, on)| TargetSlot {
                        state: ContinuousState::from_finite([x, 0.0]),
                        activity: on.into(),
                    })
                    .collect(),
            ),
            log_weight: w.ln(),
        }
    }

    fn set(particles: Vec<Particle>) -> ParticleSet {
        ParticleSet::new(particles, 0).unwrap()
    }

    #[test]
    fn all_on_or_all_off() {
        let on = set(vec![particle(0.5, &[(1.0, true)]), particle(0.5, &[(2.0, true)])]);
        assert!((activity_probability(&on, 0).unwrap() - 1.0).abs() < 1e-15);
        let off = set(vec![particle(0.5, &[(1.0, false)]), particle(0.5, &[(2.0, false)])]);
        assert_eq!(activity_probability(&off, 0).unwrap(), 0.0);
        assert_eq!(mmse_state(&off, 0).unwrap(), None);
    }

    #[test]
    fn weighted_activity_and_decision() {
        let ps = set(vec![
            particle(0.5, &[(0.0, true)]),
            particle(0.3, &[(0.0, false)]),
            particle(0.2, &[(0.0, true)]),
        ]);
        assert!((activity_probability(&ps, 0).unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(mmse_activity(&ps, 0).unwrap(), ActivityFlag::Active);
    }

    #[test]
    fn threshold_and_tie() {
        let below = set(vec![particle(0.49, &[(0.0, true)]), particle(0.51, &[(0.0, false)])]);
        assert_eq!(mmse_activity(&below, 0).unwrap(), ActivityFlag::Inactive);
        let tie = set(vec![particle(0.5, &[(0.0, true)]), particle(0.5, &[(0.0, false)])]);
        assert_eq!(activity_probability(&tie, 0).unwrap(), 0.5);
        assert_eq!(mmse_activity(&tie, 0).unwrap(), ActivityFlag::Active);
    }

    #[test]
    fn conditional_mean() {
        let ps = set(vec![particle(0.6, &[(0.0, true)]), particle(0.4, &[(10.0, true)])]);
        let m = mmse_state(&ps, 0).unwrap().unwrap();
        assert!((m[0] - 4.0).abs() < 1e-12);
        let same = set(vec![particle(0.3, &[(2.5, true)]), particle(0.7, &[(2.5, true)])]);
        assert_eq!(mmse_state(&same, 0).unwrap().unwrap()[0], 2.5);
    }

    #[test]
    fn index_out_of_range() {
        let ps = set(vec![particle(1.0, &[(0.0, true)])]);
        assert!(matches!(activity_probability(&ps, 1), Err(Error::IndexOutOfRange { index: 1, len: 1 })));
        assert!(mmse_state(&ps, 3).is_err());
        assert!(mmse_activity(&ps, 1).is_err());
    }

    #[test]
    fn extract_toy_posterior() {
        // target 0: on in particles 0 and 2 (prob 0.7), mean (0.5*1 + 0.2*8)/0.7 = 3
        // target 1: on in particle 1 only (prob 0.3)
        let ps = set(vec![
            particle(0.5, &[(1.0, true), (0.0, false)]),
            particle(0.3, &[(5.0, false), (4.0, true)]),
            particle(0.2, &[(8.0, true), (0.0, false)]),
        ]);
        let est = extract(&ps);
        assert_eq!(est.per_target.len(), 2);
        assert!((est.per_target[0].activity_prob - 0.7).abs() < 1e-12);
        assert!((est.per_target[0].state_mean.as_ref().unwrap()[0] - 3.0).abs() < 1e-12);
        assert!((est.per_target[1].activity_prob - 0.3).abs() < 1e-12);
        assert!(est.per_target[1].state_mean.is_none());
        assert!(mmse_state(&ps, 1).unwrap().is_some());
        assert_eq!(est.active_count(), 1);
    }

    #[test]
    fn extract_inactive_posterior() {
        let ps = set(vec![particle(1.0, &[(1.0, false), (2.0, false)]); 3]);
        let est = extract(&ps);
        assert!(est.per_target.iter().all(|t| !t.active() && t.activity_prob == 0.0 && t.state_mean.is_none()));
    }

    #[test]
    fn single_particle_returns_its_state() {
        let ps = set(vec![particle(1.0, &[(3.25, true)])]);
        let est = extract(&ps);
        assert_eq!(est.per_target[0].state_mean.as_ref().unwrap().as_slice(), &[3.25, 0.0]);
    }

    proptest! {
        #[test]
        fn duplication_and_permutation_invariance(
            raw in prop::collection::vec((0.01f64..1.0, -10.0f64..10.0, any::<bool>()), 1..12),
            split in 0usize..12,
        ) {
            let original: Vec<Particle> = raw.iter().map(|&(w, x, on)| particle(w, &[(x, on)])).collect();
            let base = set(original.clone());

            let mut dup = original.clone();
            let k = split % dup.len();
            let half = dup[k].log_weight - 2f64.ln();
            dup[k].log_weight = half;
            let copy = dup[k].clone();
            dup.push(copy);
            let dup = set(dup);

            let mut rev = original;
            rev.reverse();
            let rev = set(rev);

            let p = activity_probability(&base, 0).unwrap();
            prop_assert!((p - activity_probability(&dup, 0).unwrap()).abs() < 1e-12);
            prop_assert!((p - activity_probability(&rev, 0).unwrap()).abs() < 1e-12);
            match (mmse_state(&base, 0).unwrap(), mmse_state(&dup, 0).unwrap()) {
                (Some(a), Some(b)) => prop_assert!((a[0] - b[0]).abs() < 1e-9),
                (None, None) => {}
                _ => prop_assert!(false, "support changed"),
            }
        }

        #[test]
        fn more_active_weight_never_lowers_probability(
            raw in prop::collection::vec((0.01f64..1.0, any::<bool>()), 2..10),
            boost in 0.0f64..5.0,
        ) {
            prop_assume!(raw.iter().any(|r| r.1));
            let before = set(raw.iter().map(|&(w, on)| particle(w, &[(0.0, on)])).collect());
            let after = set(raw.iter().map(|&(w, on)| particle(if on { w + boost } else { w }, &[(0.0, on)])).collect());
            prop_assert!(activity_probability(&after, 0).unwrap() >= activity_probability(&before, 0).unwrap() - 1e-12);
        }
    }
}
