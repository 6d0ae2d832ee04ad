//! AP/UE placement and cluster partitioning.
//!
//! With `C = 4` the square service area is split into four equal quadrants,
//! numbered row-major from the origin corner:
//!
//! ```text
//!   +-----+-----+
//!   |  2  |  3  |
//!   +-----+-----+
//!   |  0  |  1  |
//!   +-----+-----+
//! ```
//!
//! Each cluster receives exactly `M / C` APs and `K / C` UEs drawn uniformly
//! inside its quadrant. Indices are contiguous per cluster: cluster 0 owns
//! the first `M / C` APs, and so on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Axis-aligned cluster region `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Region {
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkTopology {
    pub side_length: f64,
    pub ap_positions: Vec<Point>,
    pub ue_positions: Vec<Point>,
    pub num_clusters: usize,
    pub ap_cluster: Vec<usize>,
    pub ue_cluster: Vec<usize>,
}

impl NetworkTopology {
    pub fn num_aps(&self) -> usize {
        self.ap_positions.len()
    }

    pub fn num_ues(&self) -> usize {
        self.ue_positions.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    /// Global AP indices belonging to cluster `c`, ascending.
    pub fn cluster_aps(&self, c: usize) -> Vec<usize> {
        members(&self.ap_cluster, c)
    }

    /// Global UE indices belonging to cluster `c`, ascending.
    pub fn cluster_ues(&self, c: usize) -> Vec<usize> {
        members(&self.ue_cluster, c)
    }

    pub fn region(&self, c: usize) -> Region {
        cluster_region(self.side_length, self.num_clusters, c)
    }
}

fn members(assignment: &[usize], c: usize) -> Vec<usize> {
    assignment
        .iter()
        .enumerate()
        .filter_map(|(i, &owner)| (owner == c).then_some(i))
        .collect()
}

fn cluster_region(side: f64, num_clusters: usize, c: usize) -> Region {
    if num_clusters == 1 {
        return Region {
            x0: 0.0,
            y0: 0.0,
            x1: side,
            y1: side,
        };
    }
    let half = side / 2.0;
    let x0 = (c % 2) as f64 * half;
    let y0 = (c / 2) as f64 * half;
    Region {
        x0,
        y0,
        x1: x0 + half,
        y1: y0 + half,
    }
}

fn sample_in(rng: &mut ChaCha8Rng, region: &Region) -> Point {
    let x = rng.gen_range(region.x0..region.x1);
    let y = rng.gen_range(region.y0..region.y1);
    Point::new(x, y)
}

/// Places `m` APs and `k` UEs in a `side_length` square split into
/// `num_clusters` quadrants. Deterministic in `seed`.
pub fn generate_topology(
    seed: u64,
    m: usize,
    k: usize,
    num_clusters: usize,
    side_length: f64,
) -> Result<NetworkTopology> {
    if m == 0 || k == 0 {
        return Err(Error::InvalidParameter(format!(
            "need at least one AP and one UE (M={m}, K={k})"
        )));
    }
    if num_clusters != 1 && num_clusters != 4 {
        return Err(Error::InvalidParameter(format!(
            "number of clusters must be 1 or 4, got {num_clusters}"
        )));
    }
    if m % num_clusters != 0 || k % num_clusters != 0 {
        return Err(Error::InvalidParameter(format!(
            "M={m} and K={k} must both be divisible by C={num_clusters}"
        )));
    }
    if !(side_length > 0.0 && side_length.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "side length must be positive, got {side_length}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m_c, k_c) = (m / num_clusters, k / num_clusters);
    let mut topo = NetworkTopology {
        side_length,
        ap_positions: Vec::with_capacity(m),
        ue_positions: Vec::with_capacity(k),
        num_clusters,
        ap_cluster: Vec::with_capacity(m),
        ue_cluster: Vec::with_capacity(k),
    };
    for c in 0..num_clusters {
        let region = cluster_region(side_length, num_clusters, c);
        for _ in 0..m_c {
            topo.ap_positions.push(sample_in(&mut rng, &region));
            topo.ap_cluster.push(c);
        }
        for _ in 0..k_c {
            topo.ue_positions.push(sample_in(&mut rng, &region));
            topo.ue_cluster.push(c);
        }
    }
    Ok(topo)
}

/// Euclidean distance in meters.
pub fn distance(ap: Point, ue: Point) -> f64 {
    let dx = ap.x - ue.x;
    let dy = ap.y - ue.y;
    (dx * dx + dy * dy).sqrt()
}
