//! One simulated deployment: physical traffic, the lossy channel, the
//! spatiotemporal twin fed through ingest queues and, optionally, a
//! traditional twin receiving the same arrivals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::agent::State;
use crate::graph::{GraphError, GraphNativeStore, GraphSignal, PtId, SpatialGraph, Tick, TwinStore};
use crate::ingest::{AppliedResult, EtlMode, IngestEngine, IngestError, TraditionalTwin, UpdateAction};
use crate::sim::{generate_network, ChannelConfig, InFlight, SimError, Topology, TrafficConfig, TrafficSim, FEATURES};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WorldError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldConfig {
    pub n: usize,
    pub topology: Topology,
    pub traffic: TrafficConfig,
    /// Channel latency mean at `n = 1`; grows by `latency_log_coef * ln(n)`.
    pub latency_mean: f64,
    pub latency_log_coef: f64,
    pub latency_jitter: f64,
    pub loss_prob: f64,
    pub queue_capacity: usize,
    pub etl_mode: EtlMode,
    /// Run a traditional twin next to the store; `Some(None)` has no budget.
    pub traditional: Option<Option<usize>>,
    /// Keep per-measurement fate logs (needed for hit/miss labels).
    pub event_log: bool,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            n: 20,
            topology: Topology::RandomGeometric,
            traffic: TrafficConfig::default(),
            latency_mean: 2.0,
            latency_log_coef: 1.0,
            latency_jitter: 1.0,
            loss_prob: 0.05,
            queue_capacity: 64,
            etl_mode: EtlMode::Migrate,
            traditional: None,
            event_log: false,
        }
    }
}

impl WorldConfig {
    pub fn channel(&self) -> Result<ChannelConfig, SimError> {
        ChannelConfig::scaled(self.latency_mean, self.latency_log_coef, self.n, self.latency_jitter, self.loss_prob)
    }
}

#[derive(Debug, Clone)]
pub struct World<T> {
    sim: TrafficSim,
    channel: ChannelConfig,
    in_flight: InFlight,
    rng: ChaCha8Rng,
    ingest: IngestEngine<T, GraphNativeStore<T>>,
    traditional: Option<TraditionalTwin<T>>,
    lost: Option<Vec<(PtId, Tick)>>,
}

impl<T: Scalar> World<T> {
    /// Builds the network, burns in traffic and seeds both twins with the
    /// exact state at tick 0. Every random stream derives from `seed`.
    pub fn new(cfg: &WorldConfig, seed: u64) -> Result<Self, WorldError> {
        let mut master = ChaCha8Rng::seed_from_u64(seed);
        let (net_seed, sim_seed, ch_seed) = (master.random(), master.random(), master.random());
        let channel = cfg.channel()?;
        let network = generate_network(cfg.n, cfg.topology, net_seed)?;
        let spatial = network.spatial.clone();
        let sim = TrafficSim::new(network, cfg.traffic.clone(), sim_seed)?;
        let initial: GraphSignal<T> = sim.ground_truth(0)?.cast();

        let store = GraphNativeStore::new(spatial, FEATURES.len());
        let mut ingest = IngestEngine::new(store, cfg.queue_capacity, cfg.etl_mode);
        if cfg.event_log {
            ingest = ingest.with_event_log();
        }
        ingest.bootstrap(&initial)?;
        let traditional = cfg.traditional.map(|budget| {
            let twin = TraditionalTwin::new(initial.clone(), budget);
            if cfg.event_log {
                twin.with_event_log()
            } else {
                twin
            }
        });
        Ok(Self {
            sim,
            channel,
            in_flight: InFlight::new(),
            rng: ChaCha8Rng::seed_from_u64(ch_seed),
            ingest,
            traditional,
            lost: cfg.event_log.then(Vec::new),
        })
    }

    pub fn tick(&self) -> Tick {
        self.sim.tick()
    }

    pub fn n_nodes(&self) -> usize {
        self.sim.network().n_nodes()
    }

    pub fn topology(&self) -> &SpatialGraph {
        &self.sim.network().spatial
    }

    pub fn sim(&self) -> &TrafficSim {
        &self.sim
    }

    pub fn channel(&self) -> &ChannelConfig {
        &self.channel
    }

    pub fn ingest(&self) -> &IngestEngine<T, GraphNativeStore<T>> {
        &self.ingest
    }

    pub fn store(&self) -> &GraphNativeStore<T> {
        self.ingest.store()
    }

    pub fn traditional(&self) -> Option<&TraditionalTwin<T>> {
        self.traditional.as_ref()
    }

    /// Measurements dropped by the channel, as `(pt, gen_tick)`.
    pub fn lost(&self) -> &[(PtId, Tick)] {
        self.lost.as_deref().unwrap_or(&[])
    }

    /// Moves to the next tick: steps traffic, sends this tick's measurements
    /// and hands everything that arrives by now to both twins.
    pub fn advance(&mut self) -> Result<Tick, WorldError> {
        self.sim.step();
        let t = self.sim.tick();
        for m in self.sim.emit_measurements() {
            let (pt, gen) = (m.pt, m.gen_tick);
            if !self.in_flight.send(m, &self.channel, &mut self.rng) {
                if let Some(lost) = &mut self.lost {
                    lost.push((pt, gen));
                }
            }
        }
        if let Some(tr) = &mut self.traditional {
            tr.begin_tick(t);
        }
        for d in self.in_flight.arrivals(t) {
            if let Some(tr) = &mut self.traditional {
                tr.apply_traditional(d.clone())?;
            }
            self.ingest.enqueue(d)?;
        }
        Ok(t)
    }

    pub fn apply(&mut self, action: &UpdateAction) -> Result<AppliedResult<T>, WorldError> {
        let t = self.tick();
        Ok(self.ingest.apply_action(action, t)?)
    }

    /// Applies every queued measurement; returns the memory operations spent.
    pub fn drain(&mut self) -> Result<u64, WorldError> {
        let all = UpdateAction::ones(self.n_nodes());
        let mut ops = 0;
        while self.ingest.pending() > 0 {
            ops += self.apply(&all)?.memory_ops_delta;
        }
        Ok(ops)
    }

    /// The last `delta` stored snapshots ending at the current tick.
    pub fn state(&self, delta: usize) -> Result<State<T>, WorldError> {
        Ok(State::from_store(self.store(), self.tick(), delta)?)
    }

    /// Newest stored value of every pt.
    pub fn live_view(&self) -> Result<GraphSignal<T>, WorldError> {
        Ok(self.store().snapshot(self.tick())?)
    }

    pub fn ground_truth(&self, t: Tick) -> Result<GraphSignal<f64>, WorldError> {
        Ok(self.sim.ground_truth(t)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal() -> WorldConfig {
        WorldConfig {
            n: 9,
            topology: Topology::Grid,
            latency_mean: 0.0,
            latency_log_coef: 0.0,
            latency_jitter: 0.0,
            loss_prob: 0.0,
            traditional: Some(None),
            ..WorldConfig::default()
        }
    }

    #[test]
    fn perfect_channel_tracks_ground_truth() {
        let mut w = World::<f64>::new(&ideal(), 3).unwrap();
        for _ in 0..20 {
            let t = w.advance().unwrap();
            w.drain().unwrap();
            let truth = w.ground_truth(t).unwrap();
            assert_eq!(w.live_view().unwrap().as_slice(), truth.as_slice());
            assert_eq!(w.traditional().unwrap().snapshot().as_slice(), truth.as_slice());
        }
    }

    #[test]
    fn same_seed_same_world() {
        let cfg = WorldConfig { n: 16, ..WorldConfig::default() };
        let run = |seed| {
            let mut w = World::<f64>::new(&cfg, seed).unwrap();
            for _ in 0..30 {
                w.advance().unwrap();
                w.apply(&UpdateAction::ones(16)).unwrap();
            }
            (w.store().stats(), w.live_view().unwrap())
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5).1, run(6).1);
    }
}
