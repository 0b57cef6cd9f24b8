use std::collections::{HashMap, HashSet};

use crate::Scalar;

use super::query::{Direction, Neighbor, QueryResult};
use super::store::check_features;
use super::{
    EdgeKind, EdgeRef, GraphError, GraphSignal, PtId, RamCosts, RecordId, SpatialEdge, SpatialGraph, StoreStats,
    TemporalEdge, Tick, TwinRecord, TwinStore, WindowRecords,
};

#[derive(Debug, Clone, Copy)]
struct RecordRow {
    id: RecordId,
    pt: PtId,
    gen_tick: Tick,
}

#[derive(Debug, Clone, Copy)]
struct PropertyRow<T> {
    id: RecordId,
    feature: usize,
    value: T,
}

#[derive(Debug, Clone, Copy)]
struct EdgeRow {
    src: RecordId,
    dst: RecordId,
    kind: EdgeKind,
    value: f64,
}

/// Relational emulation with three normalized tables:
/// `records(record_id, pt_id, gen_tick)`, `properties(record_id, feature_idx, value)`
/// and `edges(src, dst, kind, weight)`.
///
/// Writes validate constraints through a primary-key index. Every read
/// reassembles rows with hash-join passes over the full tables, the way an
/// unindexed join plan would.
#[derive(Debug, Clone)]
pub struct JoinTableStore<T> {
    topology: SpatialGraph,
    n_features: usize,
    records: Vec<RecordRow>,
    properties: Vec<PropertyRow<T>>,
    edges: Vec<EdgeRow>,
    pk: HashMap<RecordId, usize>,
    unique: HashSet<(PtId, Tick)>,
    temporal_edges: u64,
    spatial_edges: u64,
    memory_ops: u64,
}

impl<T: Scalar> JoinTableStore<T> {
    pub fn new(topology: SpatialGraph, n_features: usize) -> Self {
        Self {
            topology,
            n_features,
            records: Vec::new(),
            properties: Vec::new(),
            edges: Vec::new(),
            pk: HashMap::new(),
            unique: HashSet::new(),
            temporal_edges: 0,
            spatial_edges: 0,
            memory_ops: 0,
        }
    }

    fn check_pt(&self, pt: PtId) -> Result<(), GraphError> {
        if pt >= self.topology.n_nodes() {
            return Err(GraphError::UnknownPt(pt));
        }
        Ok(())
    }

    fn row(&self, id: RecordId) -> Result<RecordRow, GraphError> {
        self.pk.get(&id).map(|&k| self.records[k]).ok_or(GraphError::MissingRecord(id))
    }

    fn temporal_check(&self, newer: RecordId, older: RecordId) -> Result<Tick, GraphError> {
        let (a, b) = (self.row(newer)?, self.row(older)?);
        if a.pt != b.pt {
            return Err(GraphError::CrossPtTemporal { newer: a.pt, older: b.pt });
        }
        if a.gen_tick <= b.gen_tick {
            return Err(GraphError::NonPositiveDt { newer: a.gen_tick, older: b.gen_tick });
        }
        Ok(a.gen_tick - b.gen_tick)
    }

    /// Join pass over `properties` for the given ids.
    fn features_of(&self, ids: &HashSet<RecordId>) -> HashMap<RecordId, Vec<T>> {
        let mut out: HashMap<RecordId, Vec<T>> = HashMap::with_capacity(ids.len());
        for p in &self.properties {
            if ids.contains(&p.id) {
                out.entry(p.id).or_insert_with(|| vec![T::zero(); self.n_features])[p.feature] = p.value;
            }
        }
        out
    }

    /// Scan of `records` keeping, per pt, the newest row accepted by `keep`.
    fn best_per_pt(&self, keep: impl Fn(&RecordRow) -> bool) -> Vec<Option<RecordRow>> {
        let mut best: Vec<Option<RecordRow>> = vec![None; self.topology.n_nodes()];
        for r in self.records.iter().filter(|r| keep(r)) {
            let slot = &mut best[r.pt];
            if slot.is_none_or(|b| r.gen_tick > b.gen_tick) {
                *slot = Some(*r);
            }
        }
        best
    }
}

impl<T: Scalar> TwinStore<T> for JoinTableStore<T> {
    fn topology(&self) -> &SpatialGraph {
        &self.topology
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn create_record(&mut self, pt: PtId, gen_tick: Tick, features: &[T]) -> Result<RecordId, GraphError> {
        self.check_pt(pt)?;
        check_features(features, self.n_features)?;
        if !self.unique.insert((pt, gen_tick)) {
            return Err(GraphError::DuplicateRecord { pt, tick: gen_tick });
        }
        let id = self.records.len() as RecordId;
        self.pk.insert(id, self.records.len());
        self.records.push(RecordRow { id, pt, gen_tick });
        self.properties.extend(features.iter().enumerate().map(|(feature, &value)| PropertyRow { id, feature, value }));
        self.memory_ops += 1;
        Ok(id)
    }

    fn link_temporal(&mut self, newer: RecordId, older: RecordId) -> Result<TemporalEdge, GraphError> {
        let dt = self.temporal_check(newer, older)?;
        self.edges.push(EdgeRow { src: newer, dst: older, kind: EdgeKind::Temporal, value: dt as f64 });
        self.temporal_edges += 1;
        self.memory_ops += 1;
        Ok(TemporalEdge { from: newer, to: older, dt })
    }

    fn relink_temporal(&mut self, newer: RecordId, older: RecordId) -> Result<TemporalEdge, GraphError> {
        let dt = self.temporal_check(newer, older)?;
        let row = self
            .edges
            .iter_mut()
            .find(|e| e.kind == EdgeKind::Temporal && e.src == newer)
            .ok_or(GraphError::NoTemporalEdge(newer))?;
        row.dst = older;
        row.value = dt as f64;
        self.memory_ops += 1;
        Ok(TemporalEdge { from: newer, to: older, dt })
    }

    fn link_spatial(&mut self, from: RecordId, to: RecordId) -> Result<SpatialEdge, GraphError> {
        let (a, b) = (self.row(from)?.pt, self.row(to)?.pt);
        let weight = self.topology.weight(a, b).ok_or(GraphError::NoSuchSpatialRelation(a, b))?;
        self.edges.push(EdgeRow { src: from, dst: to, kind: EdgeKind::Spatial, value: weight });
        self.spatial_edges += 1;
        self.memory_ops += 1;
        Ok(SpatialEdge { from, to, weight })
    }

    fn unlink_spatial(&mut self, from: RecordId, to: RecordId) -> Result<bool, GraphError> {
        self.row(from)?;
        self.row(to)?;
        let found = self.edges.iter().rposition(|e| e.kind == EdgeKind::Spatial && e.src == from && e.dst == to);
        self.memory_ops += 1;
        let Some(k) = found else { return Ok(false) };
        self.edges.remove(k);
        self.spatial_edges -= 1;
        Ok(true)
    }

    fn record(&self, id: RecordId) -> Option<TwinRecord<T>> {
        let row = *self.records.iter().find(|r| r.id == id)?;
        let mut features = self.features_of(&HashSet::from([id]));
        Some(TwinRecord { id, pt: row.pt, gen_tick: row.gen_tick, features: features.remove(&id)? })
    }

    fn gen_tick(&self, id: RecordId) -> Option<Tick> {
        self.records.iter().find(|r| r.id == id).map(|r| r.gen_tick)
    }

    fn latest_record(&self, pt: PtId) -> Result<Option<RecordId>, GraphError> {
        self.check_pt(pt)?;
        Ok(self.best_per_pt(|r| r.pt == pt)[pt].map(|r| r.id))
    }

    fn record_at(&self, pt: PtId, t: Tick) -> Result<Option<RecordId>, GraphError> {
        self.check_pt(pt)?;
        Ok(self.best_per_pt(|r| r.pt == pt && r.gen_tick <= t)[pt].map(|r| r.id))
    }

    fn record_after(&self, pt: PtId, t: Tick) -> Result<Option<RecordId>, GraphError> {
        self.check_pt(pt)?;
        Ok(self.records.iter().filter(|r| r.pt == pt && r.gen_tick > t).min_by_key(|r| r.gen_tick).map(|r| r.id))
    }

    fn snapshot(&self, t: Tick) -> Result<GraphSignal<T>, GraphError> {
        let best = self.best_per_pt(|r| r.gen_tick <= t);
        let missing: Vec<PtId> = (0..best.len()).filter(|&pt| best[pt].is_none()).collect();
        if !missing.is_empty() {
            return Err(GraphError::MissingPtAt { tick: t, pts: missing });
        }
        let ids: HashSet<RecordId> = best.iter().flatten().map(|r| r.id).collect();
        let feats = self.features_of(&ids);
        let values = best.iter().flatten().flat_map(|r| feats[&r.id].iter().copied()).collect();
        GraphSignal::new(t, best.len(), self.n_features, values)
    }

    fn query_window(&self, lo: Tick, hi: Tick) -> Result<WindowRecords<T>, GraphError> {
        if lo > hi {
            return Err(GraphError::BadRange { lo, hi });
        }
        let rows: Vec<RecordRow> =
            self.records.iter().filter(|r| r.gen_tick > lo && r.gen_tick <= hi).copied().collect();
        let mut feats = self.features_of(&rows.iter().map(|r| r.id).collect());
        let mut out: WindowRecords<T> = vec![Vec::new(); self.topology.n_nodes()];
        for r in rows {
            let features = feats.remove(&r.id).unwrap_or_default();
            out[r.pt].push(TwinRecord { id: r.id, pt: r.pt, gen_tick: r.gen_tick, features });
        }
        for list in &mut out {
            list.sort_by_key(|r| r.gen_tick);
        }
        Ok(out)
    }

    fn neighborhood(&self, ids: &[RecordId]) -> Result<QueryResult<T>, GraphError> {
        let wanted: HashSet<RecordId> = ids.iter().copied().collect();

        // edges ⋈ query set, on either endpoint
        let mut incident: HashMap<RecordId, Vec<(EdgeKind, Direction, RecordId, f64)>> = HashMap::new();
        let mut needed = wanted.clone();
        for e in &self.edges {
            if wanted.contains(&e.src) {
                incident.entry(e.src).or_default().push((e.kind, Direction::Out, e.dst, e.value));
                needed.insert(e.dst);
            }
            if wanted.contains(&e.dst) {
                incident.entry(e.dst).or_default().push((e.kind, Direction::In, e.src, e.value));
                needed.insert(e.src);
            }
        }

        // records ⋈ needed ids
        let mut meta: HashMap<RecordId, (PtId, Tick)> = HashMap::with_capacity(needed.len());
        for r in &self.records {
            if needed.contains(&r.id) {
                meta.insert(r.id, (r.pt, r.gen_tick));
            }
        }
        // properties ⋈ needed ids
        let feats = self.features_of(&needed);

        let mut out = QueryResult::with_capacity(self.n_features, ids.len());
        let mut nbs: Vec<(Neighbor, &[T])> = Vec::new();
        for &id in ids {
            let &(pt, gen_tick) = meta.get(&id).ok_or(GraphError::MissingRecord(id))?;
            nbs.clear();
            for &(kind, direction, other, value) in incident.get(&id).map(Vec::as_slice).unwrap_or(&[]) {
                let (opt, ogen) = meta[&other];
                nbs.push((
                    Neighbor { kind, direction, record: other, pt: opt, gen_tick: ogen, value },
                    feats[&other].as_slice(),
                ));
            }
            nbs.sort_by_key(|(nb, _)| nb.sort_key());
            out.push_row(id, pt, gen_tick, &feats[&id], nbs.iter().copied());
        }
        Ok(out)
    }

    fn stats(&self) -> StoreStats {
        StoreStats::compute(
            RamCosts::for_features(self.n_features),
            self.records.len() as u64,
            self.temporal_edges,
            self.spatial_edges,
            self.memory_ops,
        )
    }

    fn records(&self) -> Vec<TwinRecord<T>> {
        let all: HashSet<RecordId> = self.records.iter().map(|r| r.id).collect();
        let mut feats = self.features_of(&all);
        self.records
            .iter()
            .map(|r| TwinRecord {
                id: r.id,
                pt: r.pt,
                gen_tick: r.gen_tick,
                features: feats.remove(&r.id).unwrap_or_default(),
            })
            .collect()
    }

    fn edges(&self) -> Vec<EdgeRef> {
        self.edges.iter().map(|e| EdgeRef { kind: e.kind, src: e.src, dst: e.dst, value: e.value }).collect()
    }
}
