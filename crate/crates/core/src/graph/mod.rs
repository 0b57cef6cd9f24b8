//! Spatiotemporal twin graph: the static junction topology, graph signals and
//! the record store with its two interchangeable backends.

mod error;
mod export;
mod native;
mod query;
mod signal;
mod store;
mod table;
mod topology;

pub use error::GraphError;
pub use export::{write_edges_csv, write_records_csv};
pub use native::GraphNativeStore;
pub use query::{timed_query, Direction, Neighbor, QueryResult, QueryRow, TimedQuery};
pub use signal::GraphSignal;
pub use store::{
    EdgeKind, EdgeRef, RamCosts, RecordId, SpatialEdge, StoreStats, TemporalEdge, TwinRecord, TwinStore, WindowRecords,
};
pub use table::JoinTableStore;
pub use topology::{SpatialGraph, TopologyEdge};

/// Tick counter; one tick is one simulated second.
pub type Tick = u64;
/// Dense junction / physical-twin index in `0..N`.
pub type PtId = usize;
