use crate::Scalar;

use super::{GraphError, GraphSignal, PtId, QueryResult, SpatialGraph, Tick};

/// Opaque record handle. Both backends hand out ids sequentially from 0, so an
/// identical mutation sequence yields identical ids.
pub type RecordId = u64;

/// One stored observation of one physical twin.
#[derive(Debug, Clone, PartialEq)]
pub struct TwinRecord<T> {
    pub id: RecordId,
    pub pt: PtId,
    pub gen_tick: Tick,
    pub features: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Temporal,
    Spatial,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Temporal => "temporal",
            EdgeKind::Spatial => "spatial",
        }
    }
}

/// Newer record -> older record of the same pt, carrying the tick difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemporalEdge {
    pub from: RecordId,
    pub to: RecordId,
    pub dt: Tick,
}

/// Record -> record across a topology edge, carrying the segment length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialEdge {
    pub from: RecordId,
    pub to: RecordId,
    pub weight: f64,
}

/// Flat edge view used for export. `value` is `dt` for temporal edges and the
/// weight for spatial edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRef {
    pub kind: EdgeKind,
    pub src: RecordId,
    pub dst: RecordId,
    pub value: f64,
}

/// Fixed byte costs of the RAM proxy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RamCosts {
    pub record: u64,
    pub edge: u64,
    /// Per queued message, on top of its payload.
    pub queued_overhead: u64,
}

impl RamCosts {
    pub fn for_features(f: usize) -> Self {
        Self { record: 16 + 8 * f as u64, edge: 24, queued_overhead: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StoreStats {
    pub record_count: u64,
    pub temporal_edge_count: u64,
    pub spatial_edge_count: u64,
    /// Successful mutation calls since the store was created.
    pub memory_ops: u64,
    /// Bytes held in ingest queues; zero when read straight from a store.
    pub queued_bytes: u64,
    pub ram_proxy_bytes: u64,
}

impl StoreStats {
    pub(crate) fn compute(
        costs: RamCosts,
        record_count: u64,
        temporal_edge_count: u64,
        spatial_edge_count: u64,
        memory_ops: u64,
    ) -> Self {
        let mut s = Self {
            record_count,
            temporal_edge_count,
            spatial_edge_count,
            memory_ops,
            queued_bytes: 0,
            ram_proxy_bytes: 0,
        };
        s.ram_proxy_bytes = s.structural_bytes(costs);
        s
    }

    fn structural_bytes(&self, costs: RamCosts) -> u64 {
        self.record_count * costs.record + (self.temporal_edge_count + self.spatial_edge_count) * costs.edge
    }

    /// Adds queued bytes to the accounting.
    pub fn with_queued(mut self, costs: RamCosts, queued_bytes: u64) -> Self {
        self.queued_bytes = queued_bytes;
        self.ram_proxy_bytes = self.structural_bytes(costs) + queued_bytes;
        self
    }
}

/// Records grouped by pt (index = pt id), each list ascending in `gen_tick`.
pub type WindowRecords<T> = Vec<Vec<TwinRecord<T>>>;

/// Storage interface for the spatiotemporal graph.
///
/// Mutations take `&mut self` and reads take `&self`, so the borrow checker
/// enforces the single-writer / many-reader contract; wrap a store in an
/// `RwLock` to share it across threads.
///
/// Every successful mutation increments `memory_ops` by exactly one. Failed
/// calls leave the store untouched.
pub trait TwinStore<T: Scalar> {
    fn topology(&self) -> &SpatialGraph;
    fn n_features(&self) -> usize;

    fn create_record(&mut self, pt: PtId, gen_tick: Tick, features: &[T]) -> Result<RecordId, GraphError>;
    fn link_temporal(&mut self, newer: RecordId, older: RecordId) -> Result<TemporalEdge, GraphError>;
    /// Re-points the outgoing temporal edge of `newer` at `older`, used when a
    /// late record is spliced into the middle of a chain.
    fn relink_temporal(&mut self, newer: RecordId, older: RecordId) -> Result<TemporalEdge, GraphError>;
    /// Duplicate links are allowed and each call counts as one memory op.
    fn link_spatial(&mut self, from: RecordId, to: RecordId) -> Result<SpatialEdge, GraphError>;
    /// Removes one spatial edge `from -> to`; returns whether one existed.
    fn unlink_spatial(&mut self, from: RecordId, to: RecordId) -> Result<bool, GraphError>;

    fn record(&self, id: RecordId) -> Option<TwinRecord<T>>;
    fn latest_record(&self, pt: PtId) -> Result<Option<RecordId>, GraphError>;
    /// Record of `pt` with maximal `gen_tick <= t`.
    fn record_at(&self, pt: PtId, t: Tick) -> Result<Option<RecordId>, GraphError>;
    /// Record of `pt` with minimal `gen_tick > t`.
    fn record_after(&self, pt: PtId, t: Tick) -> Result<Option<RecordId>, GraphError>;
    fn snapshot(&self, t: Tick) -> Result<GraphSignal<T>, GraphError>;
    /// Records with `lo < gen_tick <= hi`.
    fn query_window(&self, lo: Tick, hi: Tick) -> Result<WindowRecords<T>, GraphError>;
    /// Records `ids` with their 1-hop spatial and temporal neighbors.
    fn neighborhood(&self, ids: &[RecordId]) -> Result<QueryResult<T>, GraphError>;

    fn stats(&self) -> StoreStats;
    fn records(&self) -> Vec<TwinRecord<T>>;
    fn edges(&self) -> Vec<EdgeRef>;

    fn gen_tick(&self, id: RecordId) -> Option<Tick> {
        self.record(id).map(|r| r.gen_tick)
    }
}

pub(crate) fn check_features<T: Scalar>(features: &[T], f: usize) -> Result<(), GraphError> {
    if features.len() != f || features.iter().any(|v| !v.is_finite()) {
        return Err(GraphError::BadFeatureVector { expected: f, got: features.iter().map(|v| v.as_f64()).collect() });
    }
    Ok(())
}
