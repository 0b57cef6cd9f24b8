use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{PtId, SpatialGraph};

use super::SimError;

const MIN_WEIGHT: f64 = 50.0;
const MAX_WEIGHT: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// Square lattice with two-way streets; `n` must be a perfect square.
    Grid,
    /// One-way loop `i -> i+1 mod n`.
    Ring,
    /// Two-way streets between junctions closer than a connection radius.
    RandomGeometric,
}

impl FromStr for Topology {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grid" => Ok(Topology::Grid),
            "ring" => Ok(Topology::Ring),
            "random-geometric" => Ok(Topology::RandomGeometric),
            other => Err(SimError::BadTopologyArgs(format!("unknown topology {other:?}"))),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::Grid => "grid",
            Topology::Ring => "ring",
            Topology::RandomGeometric => "random-geometric",
        })
    }
}

/// Junction topology plus per-junction turn probabilities aligned with
/// `spatial.neighbors(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    pub spatial: SpatialGraph,
    routing: Vec<Vec<f64>>,
}

impl RoadNetwork {
    /// `routing[i][k]` is the share of junction `i`'s through traffic sent to
    /// its `k`-th out-neighbor. Rows must sum to 1, or be empty for sinks.
    pub fn new(spatial: SpatialGraph, routing: Vec<Vec<f64>>) -> Result<Self, SimError> {
        if routing.len() != spatial.n_nodes() {
            return Err(SimError::BadTopologyArgs("routing table size mismatch".into()));
        }
        for (i, row) in routing.iter().enumerate() {
            if row.len() != spatial.out_degree(i) {
                return Err(SimError::BadTopologyArgs(format!("routing row {i} does not match out-degree")));
            }
            let sum: f64 = row.iter().sum();
            if !row.is_empty() && ((sum - 1.0).abs() > 1e-9 || row.iter().any(|p| *p < 0.0)) {
                return Err(SimError::BadTopologyArgs(format!("turn probabilities at {i} sum to {sum}")));
            }
        }
        Ok(Self { spatial, routing })
    }

    /// Uniform turn probabilities over each junction's out-edges.
    pub fn uniform(spatial: SpatialGraph) -> Self {
        let routing = (0..spatial.n_nodes())
            .map(|i| {
                let d = spatial.out_degree(i);
                vec![1.0 / d as f64; d]
            })
            .collect();
        Self { spatial, routing }
    }

    pub fn n_nodes(&self) -> usize {
        self.spatial.n_nodes()
    }

    pub fn turn_probabilities(&self, i: PtId) -> &[f64] {
        &self.routing[i]
    }
}

/// Builds a deterministic road network for `(n, topology, seed)`. Edge lengths
/// fall in `[50, 500]` meters.
pub fn generate_network(n: usize, topology: Topology, seed: u64) -> Result<RoadNetwork, SimError> {
    if n < 2 {
        return Err(SimError::BadTopologyArgs(format!("need at least 2 junctions, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let length = |rng: &mut ChaCha8Rng| rng.random_range(MIN_WEIGHT..=MAX_WEIGHT);
    let edges: Vec<(PtId, PtId, f64)> = match topology {
        Topology::Ring => (0..n).map(|i| (i, (i + 1) % n, length(&mut rng))).collect(),
        Topology::Grid => {
            let side = (n as f64).sqrt().round() as usize;
            if side < 2 || side * side != n {
                return Err(SimError::BadTopologyArgs(format!("grid needs a square junction count, got {n}")));
            }
            let mut edges = Vec::new();
            for r in 0..side {
                for c in 0..side {
                    let i = r * side + c;
                    if c + 1 < side {
                        let w = length(&mut rng);
                        edges.push((i, i + 1, w));
                        edges.push((i + 1, i, w));
                    }
                    if r + 1 < side {
                        let w = length(&mut rng);
                        edges.push((i, i + side, w));
                        edges.push((i + side, i, w));
                    }
                }
            }
            edges
        }
        Topology::RandomGeometric => random_geometric(n, &mut rng),
    };
    let spatial = SpatialGraph::new(n, edges).map_err(|e| SimError::BadTopologyArgs(e.to_string()))?;
    let routing = (0..n)
        .map(|i| {
            let raw: Vec<f64> = (0..spatial.out_degree(i)).map(|_| rng.random_range(0.5..1.5)).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|p| p / s).collect()
        })
        .collect();
    RoadNetwork::new(spatial, routing)
}

fn random_geometric(n: usize, rng: &mut ChaCha8Rng) -> Vec<(PtId, PtId, f64)> {
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
    let dist = |a: usize, b: usize| ((pts[a].0 - pts[b].0).powi(2) + (pts[a].1 - pts[b].1).powi(2)).sqrt();
    let radius = (2.5 * (n as f64).ln().max(1.0) / (std::f64::consts::PI * n as f64)).sqrt();

    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let d = dist(a, b);
            if d <= radius {
                pairs.push((a, b, d));
            }
        }
        // every junction gets at least its nearest neighbor
        let nearest = (0..n).filter(|&b| b != a).min_by(|&x, &y| dist(a, x).total_cmp(&dist(a, y))).expect("n >= 2");
        let (lo, hi) = (a.min(nearest), a.max(nearest));
        if !pairs.iter().any(|&(x, y, _)| x == lo && y == hi) {
            pairs.push((lo, hi, dist(lo, hi)));
        }
    }
    let d_max = pairs.iter().map(|p| p.2).fold(f64::MIN_POSITIVE, f64::max);
    pairs
        .into_iter()
        .flat_map(|(a, b, d)| {
            let w = MIN_WEIGHT + (MAX_WEIGHT - MIN_WEIGHT) * (d / d_max);
            [(a, b, w), (b, a, w)]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_of_four() {
        let net = generate_network(4, Topology::Ring, 1).unwrap();
        assert_eq!(net.spatial.edges().len(), 4);
        assert!((0..4).all(|i| net.spatial.out_degree(i) == 1));
        assert!(net.spatial.is_strongly_connected());
    }

    #[test]
    fn grid_needs_square_count() {
        assert!(matches!(generate_network(6, Topology::Grid, 1), Err(SimError::BadTopologyArgs(_))));
        let g = generate_network(9, Topology::Grid, 1).unwrap();
        assert_eq!(g.spatial.edges().len(), 24);
        assert!(g.spatial.is_strongly_connected());
    }

    #[test]
    fn too_small() {
        assert!(generate_network(1, Topology::Ring, 0).is_err());
    }

    #[test]
    fn random_geometric_is_deterministic_and_in_range() {
        let a = generate_network(20, Topology::RandomGeometric, 7).unwrap();
        let b = generate_network(20, Topology::RandomGeometric, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.spatial.edges().iter().all(|e| (50.0..=500.0).contains(&e.weight)));
        assert!((0..20).all(|i| a.spatial.out_degree(i) >= 1));
        for i in 0..20 {
            let s: f64 = a.turn_probabilities(i).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        let c = generate_network(20, Topology::RandomGeometric, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn parses_names() {
        assert_eq!("ring".parse::<Topology>().unwrap(), Topology::Ring);
        assert!("hexagon".parse::<Topology>().is_err());
        assert_eq!(Topology::RandomGeometric.to_string(), "random-geometric");
    }
}
