use std::collections::BTreeMap;

use crate::Scalar;

use super::query::{Direction, Neighbor, QueryResult};
use super::store::check_features;
use super::{
    EdgeKind, EdgeRef, GraphError, GraphSignal, PtId, RamCosts, RecordId, SpatialEdge, SpatialGraph, StoreStats,
    TemporalEdge, Tick, TwinRecord, TwinStore, WindowRecords,
};

#[derive(Debug, Clone)]
struct Node<T> {
    pt: PtId,
    gen_tick: Tick,
    features: Vec<T>,
    out: Vec<usize>,
    inc: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    kind: EdgeKind,
    src: RecordId,
    dst: RecordId,
    value: f64,
    live: bool,
}

/// Graph-native backend: records own their features inline and keep per-record
/// adjacency lists, so neighborhood reads are direct pointer chasing.
#[derive(Debug, Clone)]
pub struct GraphNativeStore<T> {
    topology: SpatialGraph,
    n_features: usize,
    nodes: Vec<Node<T>>,
    edges: Vec<Edge>,
    by_pt: Vec<BTreeMap<Tick, RecordId>>,
    temporal_edges: u64,
    spatial_edges: u64,
    memory_ops: u64,
}

impl<T: Scalar> GraphNativeStore<T> {
    pub fn new(topology: SpatialGraph, n_features: usize) -> Self {
        let n = topology.n_nodes();
        Self {
            topology,
            n_features,
            nodes: Vec::new(),
            edges: Vec::new(),
            by_pt: vec![BTreeMap::new(); n],
            temporal_edges: 0,
            spatial_edges: 0,
            memory_ops: 0,
        }
    }

    fn node(&self, id: RecordId) -> Result<&Node<T>, GraphError> {
        self.nodes.get(id as usize).ok_or(GraphError::MissingRecord(id))
    }

    fn check_pt(&self, pt: PtId) -> Result<(), GraphError> {
        if pt >= self.topology.n_nodes() {
            return Err(GraphError::UnknownPt(pt));
        }
        Ok(())
    }

    fn push_edge(&mut self, kind: EdgeKind, src: RecordId, dst: RecordId, value: f64) {
        let k = self.edges.len();
        self.edges.push(Edge { kind, src, dst, value, live: true });
        self.nodes[src as usize].out.push(k);
        self.nodes[dst as usize].inc.push(k);
    }

    fn temporal_check(&self, newer: RecordId, older: RecordId) -> Result<Tick, GraphError> {
        let (a, b) = (self.node(newer)?, self.node(older)?);
        if a.pt != b.pt {
            return Err(GraphError::CrossPtTemporal { newer: a.pt, older: b.pt });
        }
        if a.gen_tick <= b.gen_tick {
            return Err(GraphError::NonPositiveDt { newer: a.gen_tick, older: b.gen_tick });
        }
        Ok(a.gen_tick - b.gen_tick)
    }

    fn to_record(&self, id: RecordId) -> TwinRecord<T> {
        let n = &self.nodes[id as usize];
        TwinRecord { id, pt: n.pt, gen_tick: n.gen_tick, features: n.features.clone() }
    }
}

impl<T: Scalar> TwinStore<T> for GraphNativeStore<T> {
    fn topology(&self) -> &SpatialGraph {
        &self.topology
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn create_record(&mut self, pt: PtId, gen_tick: Tick, features: &[T]) -> Result<RecordId, GraphError> {
        self.check_pt(pt)?;
        check_features(features, self.n_features)?;
        if self.by_pt[pt].contains_key(&gen_tick) {
            return Err(GraphError::DuplicateRecord { pt, tick: gen_tick });
        }
        let id = self.nodes.len() as RecordId;
        self.nodes.push(Node { pt, gen_tick, features: features.to_vec(), out: Vec::new(), inc: Vec::new() });
        self.by_pt[pt].insert(gen_tick, id);
        self.memory_ops += 1;
        Ok(id)
    }

    fn link_temporal(&mut self, newer: RecordId, older: RecordId) -> Result<TemporalEdge, GraphError> {
        let dt = self.temporal_check(newer, older)?;
        self.push_edge(EdgeKind::Temporal, newer, older, dt as f64);
        self.temporal_edges += 1;
        self.memory_ops += 1;
        Ok(TemporalEdge { from: newer, to: older, dt })
    }

    fn relink_temporal(&mut self, newer: RecordId, older: RecordId) -> Result<TemporalEdge, GraphError> {
        let dt = self.temporal_check(newer, older)?;
        let k = self.nodes[newer as usize]
            .out
            .iter()
            .copied()
            .find(|&k| self.edges[k].kind == EdgeKind::Temporal)
            .ok_or(GraphError::NoTemporalEdge(newer))?;
        let prev = self.edges[k].dst;
        self.nodes[prev as usize].inc.retain(|&e| e != k);
        self.edges[k].dst = older;
        self.edges[k].value = dt as f64;
        self.nodes[older as usize].inc.push(k);
        self.memory_ops += 1;
        Ok(TemporalEdge { from: newer, to: older, dt })
    }

    fn link_spatial(&mut self, from: RecordId, to: RecordId) -> Result<SpatialEdge, GraphError> {
        let (a, b) = (self.node(from)?.pt, self.node(to)?.pt);
        let weight = self.topology.weight(a, b).ok_or(GraphError::NoSuchSpatialRelation(a, b))?;
        self.push_edge(EdgeKind::Spatial, from, to, weight);
        self.spatial_edges += 1;
        self.memory_ops += 1;
        Ok(SpatialEdge { from, to, weight })
    }

    fn unlink_spatial(&mut self, from: RecordId, to: RecordId) -> Result<bool, GraphError> {
        self.node(from)?;
        self.node(to)?;
        let found = self.nodes[from as usize]
            .out
            .iter()
            .rposition(|&k| self.edges[k].kind == EdgeKind::Spatial && self.edges[k].dst == to);
        self.memory_ops += 1;
        let Some(pos) = found else { return Ok(false) };
        let k = self.nodes[from as usize].out.remove(pos);
        self.nodes[to as usize].inc.retain(|&e| e != k);
        self.edges[k].live = false;
        self.spatial_edges -= 1;
        Ok(true)
    }

    fn record(&self, id: RecordId) -> Option<TwinRecord<T>> {
        (id < self.nodes.len() as RecordId).then(|| self.to_record(id))
    }

    fn gen_tick(&self, id: RecordId) -> Option<Tick> {
        self.nodes.get(id as usize).map(|n| n.gen_tick)
    }

    fn latest_record(&self, pt: PtId) -> Result<Option<RecordId>, GraphError> {
        self.check_pt(pt)?;
        Ok(self.by_pt[pt].values().next_back().copied())
    }

    fn record_at(&self, pt: PtId, t: Tick) -> Result<Option<RecordId>, GraphError> {
        self.check_pt(pt)?;
        Ok(self.by_pt[pt].range(..=t).next_back().map(|(_, &id)| id))
    }

    fn record_after(&self, pt: PtId, t: Tick) -> Result<Option<RecordId>, GraphError> {
        self.check_pt(pt)?;
        Ok(self.by_pt[pt].range(t + 1..).next().map(|(_, &id)| id))
    }

    fn snapshot(&self, t: Tick) -> Result<GraphSignal<T>, GraphError> {
        let n = self.topology.n_nodes();
        let mut values = Vec::with_capacity(n * self.n_features);
        let mut missing = Vec::new();
        for pt in 0..n {
            match self.by_pt[pt].range(..=t).next_back() {
                Some((_, &id)) => values.extend_from_slice(&self.nodes[id as usize].features),
                None => missing.push(pt),
            }
        }
        if !missing.is_empty() {
            return Err(GraphError::MissingPtAt { tick: t, pts: missing });
        }
        GraphSignal::new(t, n, self.n_features, values)
    }

    fn query_window(&self, lo: Tick, hi: Tick) -> Result<WindowRecords<T>, GraphError> {
        if lo > hi {
            return Err(GraphError::BadRange { lo, hi });
        }
        Ok(self
            .by_pt
            .iter()
            .map(|m| {
                if lo == hi {
                    return Vec::new();
                }
                m.range(lo + 1..=hi).map(|(_, &id)| self.to_record(id)).collect()
            })
            .collect())
    }

    fn neighborhood(&self, ids: &[RecordId]) -> Result<QueryResult<T>, GraphError> {
        let mut out = QueryResult::with_capacity(self.n_features, ids.len());
        let mut nbs: Vec<(Neighbor, &[T])> = Vec::new();
        for &id in ids {
            let node = self.node(id)?;
            nbs.clear();
            let sides = [(Direction::Out, &node.out), (Direction::In, &node.inc)];
            for (direction, list) in sides {
                for &k in list {
                    let e = &self.edges[k];
                    let other = if direction == Direction::Out { e.dst } else { e.src };
                    let on = &self.nodes[other as usize];
                    nbs.push((
                        Neighbor {
                            kind: e.kind,
                            direction,
                            record: other,
                            pt: on.pt,
                            gen_tick: on.gen_tick,
                            value: e.value,
                        },
                        &on.features,
                    ));
                }
            }
            nbs.sort_by_key(|(nb, _)| nb.sort_key());
            out.push_row(id, node.pt, node.gen_tick, &node.features, nbs.iter().copied());
        }
        Ok(out)
    }

    fn stats(&self) -> StoreStats {
        StoreStats::compute(
            RamCosts::for_features(self.n_features),
            self.nodes.len() as u64,
            self.temporal_edges,
            self.spatial_edges,
            self.memory_ops,
        )
    }

    fn records(&self) -> Vec<TwinRecord<T>> {
        (0..self.nodes.len() as RecordId).map(|id| self.to_record(id)).collect()
    }

    fn edges(&self) -> Vec<EdgeRef> {
        self.edges
            .iter()
            .filter(|e| e.live)
            .map(|e| EdgeRef { kind: e.kind, src: e.src, dst: e.dst, value: e.value })
            .collect()
    }
}
