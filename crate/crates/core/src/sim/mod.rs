//! Seeded physical layer: junction topology, macroscopic traffic flow, per-junction
//! measurements and a lossy, latent delivery channel.

mod channel;
mod network;
mod traffic;

pub use channel::{deliver, ChannelConfig, Delivery, InFlight};
pub use network::{generate_network, RoadNetwork, Topology};
pub use traffic::{Measurement, TrafficConfig, TrafficSim, TrafficState, FEATURES};

use crate::graph::{GraphError, Tick};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("bad topology arguments: {0}")]
    BadTopologyArgs(String),
    #[error("tick {requested} is outside the retained history [{oldest}, {newest}]")]
    OutOfRetention { requested: Tick, oldest: Tick, newest: Tick },
    #[error("invalid channel config: {0}")]
    BadChannel(String),
    #[error("invalid traffic config: {0}")]
    BadTraffic(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
