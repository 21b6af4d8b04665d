//! RSS-attenuation sensor model for a network of radio nodes.
//!
//! Each link `i` between nodes `tx_i` and `rx_i` sees an attenuation
//! `phi * exp(-d_i / sigma_h)` from a target at planar position `p`, where
//! `d_i = |p - tx_i| + |p - rx_i| - |tx_i - rx_i|` is the excess path length
//! (an elliptical distance: its level sets are ellipses with foci at the
//! two nodes, and it vanishes on the link segment).

use crate::error::{Error, Result};
use crate::geometry::{Point, Region};
use crate::state::ContinuousState;

use super::SignalMap;

#[derive(Debug, Clone, PartialEq)]
pub struct RfNetwork {
    nodes: Vec<Point>,
    links: Vec<(usize, usize)>,
    phi: f64,
    sigma_h: f64,
}

impl RfNetwork {
    /// Network over explicit node positions; every unordered pair becomes a
    /// link, enumerated as `(0,1), (0,2), ..., (1,2), ...`.
    pub fn new(region: &Region, nodes: Vec<Point>, phi: f64, sigma_h: f64) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "an RF network needs at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        if !(phi.is_finite() && phi > 0.0 && sigma_h.is_finite() && sigma_h > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "phi and sigma_h must be positive, got phi={phi}, sigma_h={sigma_h}"
            )));
        }
        if let Some(p) = nodes.iter().find(|p| region.boundary_distance(**p) > 1e-9) {
            return Err(Error::InvalidConfig(format!(
                "node ({}, {}) is not on the region perimeter",
                p.x, p.y
            )));
        }
        let n = nodes.len();
        let links = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        Ok(Self {
            nodes,
            links,
            phi,
            sigma_h,
        })
    }

    /// `n_a` nodes equally spaced along the perimeter, counterclockwise from
    /// the `(x_min, y_min)` corner.
    pub fn on_perimeter(region: &Region, n_a: usize, phi: f64, sigma_h: f64) -> Result<Self> {
        if !region.is_valid() {
            return Err(Error::InvalidConfig("region has non-positive extent".into()));
        }
        let spacing = region.perimeter() / n_a as f64;
        let nodes = (0..n_a)
            .map(|k| region.perimeter_point(k as f64 * spacing))
            .collect();
        Self::new(region, nodes, phi, sigma_h)
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn links(&self) -> &[(usize, usize)] {
        &self.links
    }

    pub fn n_z(&self) -> usize {
        self.links.len()
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn sigma_h(&self) -> f64 {
        self.sigma_h
    }

    pub fn link_endpoints(&self, i: usize) -> (Point, Point) {
        let (a, b) = self.links[i];
        (self.nodes[a], self.nodes[b])
    }
}

pub fn excess_path_length(p: Point, tx: Point, rx: Point) -> f64 {
    (p.distance(tx) + p.distance(rx) - tx.distance(rx)).max(0.0)
}

/// `h(state)` for the RF network; position taken from state indices 0 and 2.
pub fn rf_signal_map(state: &ContinuousState, net: &RfNetwork) -> Vec<f64> {
    RfSignalMap::new(net.clone()).signal(state)
}

/// [`SignalMap`] over an [`RfNetwork`] with precomputed link geometry.
#[derive(Debug, Clone)]
pub struct RfSignalMap {
    network: RfNetwork,
    position_index: (usize, usize),
    // (tx.x, tx.y, rx.x, rx.y, |tx - rx|) per link
    geometry: Vec<[f64; 5]>,
}

impl RfSignalMap {
    /// Position read from state coordinates 0 and 2 (`(x, vx, y, vy)` layout).
    pub fn new(network: RfNetwork) -> Self {
        Self::with_position_index(network, (0, 2))
    }

    pub fn with_position_index(network: RfNetwork, position_index: (usize, usize)) -> Self {
        let geometry = (0..network.n_z())
            .map(|i| {
                let (tx, rx) = network.link_endpoints(i);
                [tx.x, tx.y, rx.x, rx.y, tx.distance(rx)]
            })
            .collect();
        Self {
            network,
            position_index,
            geometry,
        }
    }

    pub fn network(&self) -> &RfNetwork {
        &self.network
    }

    pub fn position(&self, state: &ContinuousState) -> Point {
        Point::new(state[self.position_index.0], state[self.position_index.1])
    }
}

impl SignalMap for RfSignalMap {
    fn n_z(&self) -> usize {
        self.geometry.len()
    }

    fn accumulate(&self, state: &ContinuousState, acc: &mut [f64]) {
        let p = self.position(state);
        let phi = self.network.phi;
        let inv_sigma = 1.0 / self.network.sigma_h;
        for (out, g) in acc.iter_mut().zip(&self.geometry) {
            let (ax, ay) = (p.x - g[0], p.y - g[1]);
            let (bx, by) = (p.x - g[2], p.y - g[3]);
            let d_tx = (ax * ax + ay * ay).sqrt();
            let d_rx = (bx * bx + by * by).sqrt();
            let d = (d_tx + d_rx - g[4]).max(0.0);
            *out += phi * (-d * inv_sigma).exp();
        }
    }
}
