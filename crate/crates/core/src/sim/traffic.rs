use std::collections::VecDeque;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Poisson};

use crate::graph::{GraphSignal, PtId, Tick};

use super::{RoadNetwork, SimError};

/// Feature layout of every measurement and graph signal row.
pub const FEATURES: [&str; 3] = ["current", "incoming", "outgoing"];

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficConfig {
    /// Mean vehicles inserted per entry junction per tick.
    pub insertion_rate: f64,
    /// Fraction of a junction's vehicles served per tick, before modulation.
    pub service_frac: f64,
    /// Upper bound on vehicles served per tick (0 = unbounded).
    pub service_cap: f64,
    /// Fraction of served vehicles that leave the network at that junction.
    pub exit_frac: f64,
    /// Log-normal sigma of per-junction demand weights (0 = uniform demand).
    pub demand_skew: f64,
    /// Network-wide demand wave amplitude and period.
    pub demand_amplitude: f64,
    pub demand_period: f64,
    /// Traffic-signal modulation of the service fraction: the first half of
    /// each `cycle_period`-tick cycle serves `1 + amplitude` times the base
    /// fraction, the second half `1 - amplitude`. Offsets differ per junction.
    pub cycle_amplitude: f64,
    pub cycle_period: u64,
    /// Measurements are emitted at ticks divisible by this interval.
    pub sample_interval: u64,
    /// Ticks of ground-truth history kept for [`TrafficSim::ground_truth`].
    pub retention: usize,
    /// Steps run (and discarded) before tick 0.
    pub burn_in: u64,
    pub payload_bytes: u64,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        Self {
            insertion_rate: 150.0,
            service_frac: 0.35,
            service_cap: 0.0,
            exit_frac: 0.7,
            demand_skew: 1.5,
            demand_amplitude: 0.5,
            demand_period: 400.0,
            cycle_amplitude: 0.6,
            cycle_period: 2,
            sample_interval: 1,
            retention: 4096,
            burn_in: 200,
            payload_bytes: 1000,
        }
    }
}

impl TrafficConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::BadTraffic(m.into()));
        if !(self.insertion_rate >= 0.0 && self.insertion_rate.is_finite()) {
            return bad("insertion_rate must be finite and >= 0");
        }
        if !(0.0..=1.0).contains(&self.service_frac) || !(0.0..=1.0).contains(&self.exit_frac) {
            return bad("service_frac and exit_frac must be in [0, 1]");
        }
        if self.service_cap < 0.0 || self.demand_skew < 0.0 {
            return bad("service_cap and demand_skew must be >= 0");
        }
        if !(0.0..=1.0).contains(&self.demand_amplitude) || self.cycle_amplitude < 0.0 {
            return bad("demand_amplitude must be in [0, 1], cycle_amplitude >= 0");
        }
        if self.demand_period <= 0.0 || self.cycle_period < 2 {
            return bad("demand_period must be > 0 and cycle_period >= 2");
        }
        if self.sample_interval == 0 || self.retention == 0 {
            return bad("sample_interval and retention must be >= 1");
        }
        Ok(())
    }
}

/// Ground-truth traffic at one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficState {
    pub tick: Tick,
    pub counts: Vec<f64>,
    pub incoming: Vec<f64>,
    pub outgoing: Vec<f64>,
    /// Vehicles inserted / retired during this tick.
    pub inserted: f64,
    pub exited: f64,
}

impl TrafficState {
    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    pub fn signal(&self) -> GraphSignal<f64> {
        let values =
            (0..self.counts.len()).flat_map(|i| [self.counts[i], self.incoming[i], self.outgoing[i]]).collect();
        GraphSignal::new(self.tick, self.counts.len(), FEATURES.len(), values).expect("finite traffic state")
    }
}

/// One junction's report for one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub pt: PtId,
    pub gen_tick: Tick,
    /// `[current_density, incoming_flow, outgoing_flow]`
    pub features: [f64; 3],
    pub payload_bytes: u64,
}

/// Macroscopic density/flow simulator.
///
/// Each tick every junction serves a (signal-cycle modulated) fraction of its
/// vehicles; a share of those retire, the rest is split over out-edges by the
/// turn probabilities. Entry junctions receive Poisson arrivals whose rate
/// follows a network-wide demand wave. All draws come from one seeded stream.
#[derive(Debug, Clone)]
pub struct TrafficSim {
    network: RoadNetwork,
    cfg: TrafficConfig,
    rng: ChaCha8Rng,
    demand: Vec<f64>,
    offset: Vec<u64>,
    state: TrafficState,
    initial_total: f64,
    inserted_total: f64,
    exited_total: f64,
    history: VecDeque<(GraphSignal<f64>, f64)>,
}

impl TrafficSim {
    pub fn new(network: RoadNetwork, cfg: TrafficConfig, seed: u64) -> Result<Self, SimError> {
        let n = network.n_nodes();
        Self::with_counts(network, cfg, seed, vec![0.0; n], true)
    }

    /// Starts from explicit per-junction counts. With `burn_in` false the
    /// configured burn-in is skipped, so tick 0 is exactly `counts`.
    pub fn with_counts(
        network: RoadNetwork,
        cfg: TrafficConfig,
        seed: u64,
        counts: Vec<f64>,
        burn_in: bool,
    ) -> Result<Self, SimError> {
        cfg.validate()?;
        let n = network.n_nodes();
        if counts.len() != n || counts.iter().any(|c| !(*c >= 0.0 && c.is_finite())) {
            return Err(SimError::BadTraffic("initial counts must be N finite nonnegative values".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let demand = if cfg.demand_skew > 0.0 {
            let dist = LogNormal::new(0.0, cfg.demand_skew).map_err(|e| SimError::BadTraffic(e.to_string()))?;
            let raw: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
            let mean = raw.iter().sum::<f64>() / n as f64;
            raw.into_iter().map(|w| w / mean).collect()
        } else {
            vec![1.0; n]
        };
        let offset = (0..n).map(|_| rng.random_range(0..cfg.cycle_period)).collect();
        let state = TrafficState {
            tick: 0,
            counts,
            incoming: vec![0.0; n],
            outgoing: vec![0.0; n],
            inserted: 0.0,
            exited: 0.0,
        };
        let mut sim = Self {
            network,
            cfg,
            rng,
            demand,
            offset,
            state,
            initial_total: 0.0,
            inserted_total: 0.0,
            exited_total: 0.0,
            history: VecDeque::new(),
        };
        if burn_in {
            for _ in 0..sim.cfg.burn_in {
                sim.advance();
            }
        }
        sim.state.tick = 0;
        sim.initial_total = sim.state.total();
        sim.inserted_total = 0.0;
        sim.exited_total = 0.0;
        sim.history.clear();
        sim.record_history();
        Ok(sim)
    }

    pub fn network(&self) -> &RoadNetwork {
        &self.network
    }

    pub fn config(&self) -> &TrafficConfig {
        &self.cfg
    }

    pub fn tick(&self) -> Tick {
        self.state.tick
    }

    pub fn state(&self) -> &TrafficState {
        &self.state
    }

    /// Relative demand weight of each junction (mean 1).
    pub fn demand_weights(&self) -> &[f64] {
        &self.demand
    }

    pub fn total_vehicles(&self) -> f64 {
        self.state.total()
    }

    /// `total - (initial + inserted - exited)`; zero up to rounding.
    pub fn conservation_error(&self) -> f64 {
        self.state.total() - (self.initial_total + self.inserted_total - self.exited_total)
    }

    /// Advances one tick.
    pub fn step(&mut self) -> &TrafficState {
        self.advance();
        debug_assert!(
            self.conservation_error().abs() <= 1e-6 * self.state.total().max(1.0),
            "vehicle conservation violated by {}",
            self.conservation_error()
        );
        self.record_history();
        &self.state
    }

    fn advance(&mut self) {
        let n = self.network.n_nodes();
        let t = self.state.tick + 1;
        let wave = 1.0 + self.cfg.demand_amplitude * (TAU * t as f64 / self.cfg.demand_period).sin();

        let mut incoming = vec![0.0; n];
        let mut outgoing = vec![0.0; n];
        let mut inserted = 0.0;
        let mut exited = 0.0;
        for i in 0..n {
            let c = self.state.counts[i];
            let green = (t + self.offset[i]) % self.cfg.cycle_period < self.cfg.cycle_period.div_ceil(2);
            let cycle = if green { 1.0 + self.cfg.cycle_amplitude } else { 1.0 - self.cfg.cycle_amplitude };
            let mut served = c * (self.cfg.service_frac * cycle).clamp(0.0, 1.0);
            if self.cfg.service_cap > 0.0 {
                served = served.min(self.cfg.service_cap);
            }
            outgoing[i] = served;
            let nbrs = self.network.spatial.neighbors(i);
            if nbrs.is_empty() {
                exited += served;
                continue;
            }
            let leaving = served * self.cfg.exit_frac;
            exited += leaving;
            let through = served - leaving;
            for (&(j, _), &p) in nbrs.iter().zip(self.network.turn_probabilities(i)) {
                incoming[j] += through * p;
            }
        }
        for i in 0..n {
            let rate = self.cfg.insertion_rate * self.demand[i] * wave;
            let arrivals =
                if rate > 0.0 { Poisson::new(rate).map(|d| d.sample(&mut self.rng)).unwrap_or(0.0) } else { 0.0 };
            incoming[i] += arrivals;
            inserted += arrivals;
        }
        for i in 0..n {
            self.state.counts[i] = (self.state.counts[i] - outgoing[i] + incoming[i]).max(0.0);
        }
        self.state.tick = t;
        self.state.incoming = incoming;
        self.state.outgoing = outgoing;
        self.state.inserted = inserted;
        self.state.exited = exited;
        self.inserted_total += inserted;
        self.exited_total += exited;
    }

    fn record_history(&mut self) {
        if self.history.len() == self.cfg.retention {
            self.history.pop_front();
        }
        self.history.push_back((self.state.signal(), self.state.total()));
    }

    fn history_index(&self, t: Tick) -> Result<usize, SimError> {
        let newest = self.state.tick;
        let oldest = newest + 1 - self.history.len() as Tick;
        if t > newest || t < oldest {
            return Err(SimError::OutOfRetention { requested: t, oldest, newest });
        }
        Ok((t - oldest) as usize)
    }

    /// Exact `N x 3` feature matrix at tick `t`.
    pub fn ground_truth(&self, t: Tick) -> Result<GraphSignal<f64>, SimError> {
        Ok(self.history[self.history_index(t)?].0.clone())
    }

    /// Total vehicles in the network at tick `t`.
    pub fn total_at(&self, t: Tick) -> Result<f64, SimError> {
        Ok(self.history[self.history_index(t)?].1)
    }

    /// One measurement per junction when the current tick is a sampling tick.
    pub fn emit_measurements(&self) -> Vec<Measurement> {
        if !self.state.tick.is_multiple_of(self.cfg.sample_interval) {
            return Vec::new();
        }
        (0..self.network.n_nodes())
            .map(|i| Measurement {
                pt: i,
                gen_tick: self.state.tick,
                features: [self.state.counts[i], self.state.incoming[i], self.state.outgoing[i]],
                payload_bytes: self.cfg.payload_bytes,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SpatialGraph;
    use crate::sim::{generate_network, Topology};

    fn quiet() -> TrafficConfig {
        TrafficConfig { insertion_rate: 0.0, cycle_amplitude: 0.0, burn_in: 0, ..TrafficConfig::default() }
    }

    #[test]
    fn closed_ring_conserves_vehicles() {
        let net = generate_network(5, Topology::Ring, 3).unwrap();
        let cfg = TrafficConfig { exit_frac: 0.0, ..quiet() };
        let mut sim = TrafficSim::with_counts(net, cfg, 1, vec![10.0, 0.0, 0.0, 0.0, 0.0], false).unwrap();
        for _ in 0..200 {
            sim.step();
            assert!((sim.total_vehicles() - 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn two_node_path_moves_vehicle() {
        let g = SpatialGraph::new(2, [(0, 1, 100.0)]).unwrap();
        let net = RoadNetwork::uniform(g);
        let cfg = TrafficConfig { service_frac: 1.0, exit_frac: 0.0, ..quiet() };
        let mut sim = TrafficSim::with_counts(net, cfg, 1, vec![1.0, 0.0], false).unwrap();
        let s = sim.step();
        assert_eq!(s.counts, vec![0.0, 1.0]);
        assert_eq!(s.incoming, vec![0.0, 1.0]);
        assert_eq!(s.outgoing, vec![1.0, 0.0]);
        // B is a sink: the vehicle retires on the following tick
        let s = sim.step();
        assert_eq!(s.counts, vec![0.0, 0.0]);
        assert_eq!(s.exited, 1.0);
    }

    #[test]
    fn per_junction_identity_and_accounting() {
        let net = generate_network(12, Topology::RandomGeometric, 4).unwrap();
        let mut sim = TrafficSim::new(net, TrafficConfig::default(), 9).unwrap();
        let start_total = sim.total_vehicles();
        let mut net_flow = 0.0;
        for _ in 0..50 {
            let prev = sim.state().counts.clone();
            let s = sim.step();
            for i in 0..12 {
                let lhs = s.counts[i];
                let rhs = prev[i] + s.incoming[i] - s.outgoing[i];
                assert!((lhs - rhs).abs() < 1e-9 * rhs.abs().max(1.0));
            }
            net_flow += s.incoming.iter().sum::<f64>() - s.outgoing.iter().sum::<f64>();
        }
        assert!((sim.total_vehicles() - start_total - net_flow).abs() < 1e-6 * start_total.max(1.0));
        assert!(sim.conservation_error().abs() < 1e-6 * start_total.max(1.0));
    }

    #[test]
    fn replay_is_bit_identical() {
        let run = || {
            let net = generate_network(10, Topology::RandomGeometric, 2).unwrap();
            let mut sim = TrafficSim::new(net, TrafficConfig::default(), 5).unwrap();
            (0..100).map(|_| sim.step().clone()).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn ground_truth_retention() {
        let net = generate_network(4, Topology::Ring, 1).unwrap();
        let cfg = TrafficConfig { retention: 5, ..TrafficConfig::default() };
        let mut sim = TrafficSim::new(net, cfg, 1).unwrap();
        for _ in 0..10 {
            sim.step();
        }
        assert!(sim.ground_truth(10).is_ok());
        assert!(sim.ground_truth(6).is_ok());
        assert!(matches!(sim.ground_truth(5), Err(SimError::OutOfRetention { .. })));
        assert!(matches!(sim.ground_truth(11), Err(SimError::OutOfRetention { .. })));
    }

    #[test]
    fn measurements_match_ground_truth() {
        let net = generate_network(20, Topology::RandomGeometric, 1).unwrap();
        let mut sim = TrafficSim::new(net, TrafficConfig::default(), 1).unwrap();
        sim.step();
        let ms = sim.emit_measurements();
        assert_eq!(ms.len(), 20);
        let gt = sim.ground_truth(sim.tick()).unwrap();
        for m in &ms {
            assert_eq!(m.gen_tick, 1);
            assert_eq!(&m.features[..], gt.row(m.pt));
            assert_eq!(m.payload_bytes, 1000);
        }
    }

    #[test]
    fn sampling_interval() {
        let net = generate_network(4, Topology::Ring, 1).unwrap();
        let cfg = TrafficConfig { sample_interval: 5, ..TrafficConfig::default() };
        let mut sim = TrafficSim::new(net, cfg, 1).unwrap();
        for t in 1..=20 {
            sim.step();
            let ms = sim.emit_measurements();
            assert_eq!(ms.len(), if t % 5 == 0 { 4 } else { 0 });
        }
    }
}
