//! Parent selection from normalized weights.

use rand::{Rng, RngCore};

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResamplingPolicy {
    #[default]
    Residual,
    Multinomial,
}

impl ResamplingPolicy {
    pub fn resample(self, weights: &[f64], rng: &mut dyn RngCore) -> Result<Vec<usize>> {
        match self {
            ResamplingPolicy::Residual => residual_resample(weights, rng),
            ResamplingPolicy::Multinomial => multinomial_resample(weights, rng),
        }
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::Unnormalized { sum });
    }
    Ok(())
}

/// Residual resampling.
///
/// Index `k` is first copied `floor(n * w_k)` times, in index order; the
/// remaining slots are filled by multinomial draws proportional to the
/// fractional parts `n * w_k - floor(n * w_k)`, appended in draw order.
pub fn residual_resample(weights: &[f64], rng: &mut dyn RngCore) -> Result<Vec<usize>> {
    check_weights(weights)?;
    let n = weights.len();
    let mut parents = Vec::with_capacity(n);
    let mut residual = Vec::with_capacity(n);
    for (k, &w) in weights.iter().enumerate() {
        let expected = n as f64 * w;
        let copies = expected.floor();
        parents.extend(std::iter::repeat_n(k, copies as usize));
        residual.push(expected - copies);
    }
    // sum slightly above 1 can overshoot by one copy
    parents.truncate(n);
    let remaining = n - parents.len();
    if remaining > 0 {
        let residual = if residual.iter().sum::<f64>() > 0.0 {
            residual
        } else {
            weights.to_vec()
        };
        parents.extend(draw_categorical(&residual, remaining, rng));
    }
    Ok(parents)
}

pub fn multinomial_resample(weights: &[f64], rng: &mut dyn RngCore) -> Result<Vec<usize>> {
    check_weights(weights)?;
    Ok(draw_categorical(weights, weights.len(), rng))
}

/// `count` independent draws proportional to the non-negative `mass`.
fn draw_categorical(mass: &[f64], count: usize, rng: &mut dyn RngCore) -> Vec<usize> {
    let mut cumulative = Vec::with_capacity(mass.len());
    let mut acc = 0.0;
    for &m in mass {
        acc += m;
        cumulative.push(acc);
    }
    let total = acc;
    let last = mass.iter().rposition(|&m| m > 0.0).unwrap_or(0);
    (0..count)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            cumulative.partition_point(|&c| c <= u).min(last)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{stream, Purpose};
    use proptest::prelude::*;

    fn counts(parents: &[usize], n: usize) -> Vec<usize> {
        let mut c = vec![0; n];
        for &p in parents {
            c[p] += 1;
        }
        c
    }

    #[test]
    fn point_mass_copies_everything() {
        let mut rng = stream(0, 0, Purpose::User, 0);
        assert_eq!(residual_resample(&[1.0, 0.0, 0.0, 0.0], &mut rng).unwrap(), vec![0; 4]);
    }

    #[test]
    fn exact_integer_counts() {
        let mut rng = stream(0, 0, Purpose::User, 1);
        assert_eq!(residual_resample(&[0.5, 0.5, 0.0, 0.0], &mut rng).unwrap(), vec![0, 0, 1, 1]);
    }

    #[test]
    fn floors_come_first_in_index_order() {
        let mut rng = stream(0, 0, Purpose::User, 2);
        let w = [0.35, 0.25, 0.25, 0.15];
        let p = residual_resample(&w, &mut rng).unwrap();
        assert_eq!(p.len(), 4);
        // n = 4: floors (1, 1, 1, 0)
        assert_eq!(&p[..3], &[0, 1, 2]);
    }

    #[test]
    fn rejects_unnormalized() {
        let mut rng = stream(0, 0, Purpose::User, 3);
        assert!(matches!(residual_resample(&[0.5, 0.4], &mut rng), Err(Error::Unnormalized { .. })));
        assert!(residual_resample(&[1.5, -0.5], &mut rng).is_err());
        assert!(residual_resample(&[], &mut rng).is_err());
        assert!(multinomial_resample(&[0.2], &mut rng).is_err());
    }

    #[test]
    fn multinomial_mean_counts() {
        let w = [0.1, 0.6, 0.3];
        let trials = 20_000;
        let mut total = [0usize; 3];
        for t in 0..trials {
            let mut rng = stream(9, t, Purpose::User, 0);
            let c = counts(&multinomial_resample(&w, &mut rng).unwrap(), 3);
            for k in 0..3 {
                total[k] += c[k];
            }
        }
        for k in 0..3 {
            let mean = total[k] as f64 / trials as f64;
            assert!((mean - 3.0 * w[k]).abs() < 0.03, "k={k}: {mean}");
        }
    }

    proptest! {
        #[test]
        fn residual_floor_guarantee(raw in prop::collection::vec(0.0f64..1.0, 1..40), seed in any::<u64>()) {
            let sum: f64 = raw.iter().sum();
            prop_assume!(sum > 1e-6);
            let w: Vec<f64> = raw.iter().map(|r| r / sum).collect();
            let n = w.len();
            let mut rng = stream(seed, 0, Purpose::User, 0);
            let p = residual_resample(&w, &mut rng).unwrap();
            prop_assert_eq!(p.len(), n);
            let c = counts(&p, n);
            let floors: Vec<usize> = w.iter().map(|wk| (n as f64 * wk).floor() as usize).collect();
            let spare = n.saturating_sub(floors.iter().sum());
            for k in 0..n {
                prop_assert!(c[k] >= floors[k].min(n));
                prop_assert!(c[k] <= floors[k] + spare);
                if w[k] == 0.0 {
                    prop_assert_eq!(c[k], 0);
                }
            }
        }
    }
}
