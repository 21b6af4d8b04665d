//! OSPA distance between finite point sets.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::assignment::optimal_assignment;
use crate::error::{Error, Result};
use crate::geometry::Point;

pub use crate::assignment::Assignment;

/// Finite set of planar positions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::NonFinite("point set"));
        }
        Ok(Self { points })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Cutoff `c` (meters) and order `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OspaParams {
    pub cutoff: f64,
    pub order: f64,
}

impl Default for OspaParams {
    fn default() -> Self {
        Self {
            cutoff: 5.0,
            order: 1.0,
        }
    }
}

impl OspaParams {
    pub fn new(cutoff: f64, order: f64) -> Result<Self> {
        let params = Self { cutoff, order };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cutoff.is_finite() && self.cutoff > 0.0 && self.order.is_finite() && self.order >= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "OSPA needs c > 0 and p >= 1, got c={}, p={}",
                self.cutoff, self.order
            )));
        }
        Ok(())
    }
}

/// OSPA distance of order `p` with cutoff `c`.
///
/// With `|a| = m <= n = |b|`:
/// `((min_sigma sum_i min(c, d(a_i, b_sigma(i)))^p + c^p (n - m)) / n)^(1/p)`.
pub fn ospa(a: &PointSet, b: &PointSet, params: &OspaParams) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let (m, n) = (small.len(), large.len());
    if n == 0 {
        return 0.0;
    }
    let c = params.cutoff;
    let p = params.order;
    let cost = DMatrix::from_fn(m, n, |i, j| {
        small.points[i].distance(large.points[j]).min(c).powf(p)
    });
    // m <= n and all entries finite
    let matched = optimal_assignment(&cost).map(|a| a.cost).unwrap_or(f64::NAN);
    let total = matched + c.powf(p) * (n - m) as f64;
    (total / n as f64).powf(1.0 / p)
}
