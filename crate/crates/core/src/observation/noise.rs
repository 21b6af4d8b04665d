use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};

use super::{Likelihood, NoiseSampler};
use crate::error::{Error, Result};

/// White Gaussian noise with covariance `sigma^2 I`.
///
/// For complex channels this is the circular complex normal with
/// `E|v_i|^2 = sigma^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianNoise {
    sigma: f64,
    log_norm_real: f64,
    log_norm_complex: f64,
    inv_var: f64,
}

impl GaussianNoise {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidConfig(format!("noise sigma must be positive, got {sigma}")));
        }
        let var = sigma * sigma;
        Ok(Self {
            sigma,
            log_norm_real: -0.5 * (2.0 * PI * var).ln(),
            log_norm_complex: -(PI * var).ln(),
            inv_var: 1.0 / var,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl Likelihood<f64> for GaussianNoise {
    fn log_density(&self, z: &[f64], s: &[f64]) -> f64 {
        let sq: f64 = z.iter().zip(s).map(|(a, b)| (a - b) * (a - b)).sum();
        z.len() as f64 * self.log_norm_real - 0.5 * sq * self.inv_var
    }
}

impl NoiseSampler<f64> for GaussianNoise {
    fn sample(&self, n_z: usize, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..n_z)
            .map(|_| {
                let e: f64 = StandardNormal.sample(&mut *rng);
                self.sigma * e
            })
            .collect()
    }
}

impl Likelihood<Complex64> for GaussianNoise {
    fn log_density(&self, z: &[Complex64], s: &[Complex64]) -> f64 {
        let sq: f64 = z.iter().zip(s).map(|(a, b)| (a - b).norm_sqr()).sum();
        z.len() as f64 * self.log_norm_complex - sq * self.inv_var
    }
}

impl NoiseSampler<Complex64> for GaussianNoise {
    fn sample(&self, n_z: usize, rng: &mut dyn RngCore) -> Vec<Complex64> {
        let scale = self.sigma / 2f64.sqrt();
        (0..n_z)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut *rng);
                let im: f64 = StandardNormal.sample(&mut *rng);
                Complex64::new(scale * re, scale * im)
            })
            .collect()
    }
}

/// Independent uniform noise on `[-half_width, half_width]` per channel.
///
/// The likelihood is zero (log `-inf`) as soon as any residual leaves the
/// support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformNoise {
    half_width: f64,
}

impl UniformNoise {
    pub fn new(half_width: f64) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "uniform noise half-width must be positive, got {half_width}"
            )));
        }
        Ok(Self { half_width })
    }

    /// Uniform noise with standard deviation `sigma`.
    pub fn with_sigma(sigma: f64) -> Result<Self> {
        Self::new(sigma * 3f64.sqrt())
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }
}

impl Likelihood<f64> for UniformNoise {
    fn log_density(&self, z: &[f64], s: &[f64]) -> f64 {
        if z.iter().zip(s).all(|(a, b)| (a - b).abs() <= self.half_width) {
            -(z.len() as f64) * (2.0 * self.half_width).ln()
        } else {
            f64::NEG_INFINITY
        }
    }
}

impl NoiseSampler<f64> for UniformNoise {
    fn sample(&self, n_z: usize, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..n_z)
            .map(|_| self.half_width * (2.0 * rng.random::<f64>() - 1.0))
            .collect()
    }
}
