//! Spatiotemporal digital twin of a road network with DQN-gated updates.
//!
//! The core is generic over the scalar type (`f32` or `f64`); the aliases
//! below fix it to `f64`, which every experiment uses.

pub mod agent;
pub mod config;
pub mod graph;
pub mod ingest;
pub mod metrics;
mod scalar;
pub mod sim;
pub mod suite;
pub mod world;

pub use scalar::Scalar;

pub type Signal = graph::GraphSignal<f64>;
pub type Record = graph::TwinRecord<f64>;
pub type GraphStore = graph::GraphNativeStore<f64>;
pub type TableStore = graph::JoinTableStore<f64>;
pub type Engine<S = GraphStore> = ingest::IngestEngine<f64, S>;
pub type Traditional = ingest::TraditionalTwin<f64>;
pub type QNet = agent::QNetwork<f64>;
pub type DqnAgent = agent::Agent<f64>;
pub type TwinWorld = world::World<f64>;
