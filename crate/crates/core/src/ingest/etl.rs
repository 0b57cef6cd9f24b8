use std::marker::PhantomData;

use crate::graph::{GraphSignal, PtId, RamCosts, RecordId, StoreStats, Tick, TwinStore};
use crate::sim::Delivery;
use crate::Scalar;

use super::{IngestError, PtQueue, UpdateAction};

/// How same-tick updates of two neighboring pts are linked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EtlMode {
    /// Fresh records of two neighbors updated in the same tick are linked to
    /// each other.
    #[default]
    Migrate,
    /// Literal create-then-delete of the edge to the neighbor's previous
    /// record; the two fresh records end up unlinked. Costs two memory ops.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApplyOutcome {
    /// Became the pt's newest record.
    Updated,
    /// Arrived after a newer record and was spliced into the chain.
    Backfilled,
    /// Discarded by a zero action bit.
    Dropped,
}

/// What happened to one dequeued measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApplyEvent {
    pub pt: PtId,
    pub gen_tick: Tick,
    pub tick: Tick,
    pub outcome: ApplyOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppliedResult<T> {
    pub updated_pts: Vec<PtId>,
    pub dropped_pts: Vec<PtId>,
    pub backfilled_pts: Vec<PtId>,
    pub memory_ops_delta: u64,
    /// Payload bytes of the measurements written to the store.
    pub bytes_processed: u64,
    /// Latest value of every pt after the update.
    pub new_signal: GraphSignal<T>,
}

/// Queues deliveries per pt and applies update actions to a twin store.
#[derive(Debug, Clone)]
pub struct IngestEngine<T, S> {
    store: S,
    queues: Vec<PtQueue>,
    mode: EtlMode,
    costs: RamCosts,
    bytes_processed: u64,
    events: Option<Vec<ApplyEvent>>,
    _scalar: PhantomData<T>,
}

impl<T: Scalar, S: TwinStore<T>> IngestEngine<T, S> {
    pub fn new(store: S, queue_capacity: usize, mode: EtlMode) -> Self {
        let n = store.topology().n_nodes();
        let costs = RamCosts::for_features(store.n_features());
        Self {
            store,
            queues: (0..n).map(|i| PtQueue::new(i, queue_capacity)).collect(),
            mode,
            costs,
            bytes_processed: 0,
            events: None,
            _scalar: PhantomData,
        }
    }

    /// Keeps a log of every dequeued measurement's fate.
    pub fn with_event_log(mut self) -> Self {
        self.events = Some(Vec::new());
        self
    }

    pub fn store(&self) -> &S {
        &self.store
    }

    pub fn into_store(self) -> S {
        self.store
    }

    pub fn queue(&self, pt: PtId) -> &PtQueue {
        &self.queues[pt]
    }

    pub fn events(&self) -> &[ApplyEvent] {
        self.events.as_deref().unwrap_or(&[])
    }

    pub fn bytes_processed(&self) -> u64 {
        self.bytes_processed
    }

    pub fn queued_bytes(&self) -> u64 {
        self.queues.iter().map(PtQueue::queued_bytes).sum()
    }

    pub fn pending(&self) -> usize {
        self.queues.iter().map(PtQueue::len).sum()
    }

    /// Store statistics including queued bytes in the RAM proxy.
    pub fn stats(&self) -> StoreStats {
        self.store.stats().with_queued(self.costs, self.queued_bytes())
    }

    /// Seeds the store with one record per pt and the spatial edges between
    /// them, as the initial state of the twin.
    pub fn bootstrap(&mut self, initial: &GraphSignal<T>) -> Result<(), IngestError> {
        let n = self.queues.len();
        let ids: Vec<RecordId> =
            (0..n).map(|i| self.store.create_record(i, initial.tick(), initial.row(i))).collect::<Result<_, _>>()?;
        for i in 0..n {
            let nbrs: Vec<PtId> = self.store.topology().neighbors(i).iter().map(|&(j, _)| j).collect();
            for j in nbrs {
                self.store.link_spatial(ids[i], ids[j])?;
            }
        }
        Ok(())
    }

    pub fn enqueue(&mut self, delivery: Delivery) -> Result<(), IngestError> {
        let pt = delivery.measurement.pt;
        let q = self.queues.get_mut(pt).ok_or(IngestError::UnknownPt(pt))?;
        q.push(delivery);
        Ok(())
    }

    /// Latest value per pt (zeros for pts without records), stamped `t`.
    pub fn current_view(&self, t: Tick) -> Result<GraphSignal<T>, IngestError> {
        let n = self.queues.len();
        let mut view = GraphSignal::zeros(t, n, self.store.n_features());
        for i in 0..n {
            if let Some(id) = self.store.latest_record(i)? {
                if let Some(r) = self.store.record(id) {
                    view.set_row(i, &r.features);
                }
            }
        }
        Ok(view)
    }

    fn log(&mut self, pt: PtId, gen_tick: Tick, tick: Tick, outcome: ApplyOutcome) {
        if let Some(ev) = &mut self.events {
            ev.push(ApplyEvent { pt, gen_tick, tick, outcome });
        }
    }

    /// Applies one action at tick `t`.
    ///
    /// For each pt with a nonempty queue the head is popped. With bit 1 it is
    /// written as a new record, temporally linked to the pt's previous newest
    /// record; with bit 0 it is discarded. Updated pts are then spatially linked
    /// to each out-neighbor's newest record (the neighbor's fresh record when it
    /// updated in the same tick). A head older than the pt's newest record is
    /// spliced into the temporal chain instead.
    pub fn apply_action(&mut self, action: &UpdateAction, t: Tick) -> Result<AppliedResult<T>, IngestError> {
        let n = self.queues.len();
        if action.len() != n {
            return Err(IngestError::ActionLength { expected: n, got: action.len() });
        }
        let ops_before = self.store.stats().memory_ops;
        let bytes_before = self.bytes_processed;
        let mut fresh: Vec<Option<RecordId>> = vec![None; n];
        let mut previous: Vec<Option<RecordId>> = vec![None; n];
        let (mut updated, mut dropped, mut backfilled) = (Vec::new(), Vec::new(), Vec::new());

        for i in 0..n {
            let Some(delivery) = self.queues[i].pop() else { continue };
            let m = delivery.measurement;
            if !action.get(i) {
                dropped.push(i);
                self.log(i, m.gen_tick, t, ApplyOutcome::Dropped);
                continue;
            }
            let features: Vec<T> = m.features.iter().map(|&v| T::of(v)).collect();
            let latest = self.store.latest_record(i)?;
            let latest_tick = latest.and_then(|id| self.store.gen_tick(id));
            if latest_tick.is_some_and(|g| g >= m.gen_tick) {
                if self.store.record_at(i, m.gen_tick)?.and_then(|id| self.store.gen_tick(id)) == Some(m.gen_tick) {
                    // already stored; nothing to do
                    dropped.push(i);
                    self.log(i, m.gen_tick, t, ApplyOutcome::Dropped);
                    continue;
                }
                self.backfill(i, m.gen_tick, &features)?;
                self.bytes_processed += m.payload_bytes;
                backfilled.push(i);
                self.log(i, m.gen_tick, t, ApplyOutcome::Backfilled);
                continue;
            }
            let id = self.store.create_record(i, m.gen_tick, &features)?;
            if let Some(prev) = latest {
                self.store.link_temporal(id, prev)?;
            }
            previous[i] = latest;
            fresh[i] = Some(id);
            self.bytes_processed += m.payload_bytes;
            updated.push(i);
            self.log(i, m.gen_tick, t, ApplyOutcome::Updated);
        }

        for &i in &updated {
            let from = fresh[i].expect("updated pts have fresh records");
            let nbrs: Vec<PtId> = self.store.topology().neighbors(i).iter().map(|&(j, _)| j).collect();
            for j in nbrs {
                match (fresh[j], self.mode) {
                    (Some(to), EtlMode::Migrate) => {
                        self.store.link_spatial(from, to)?;
                    }
                    (Some(_), EtlMode::Literal) => {
                        if let Some(old) = previous[j] {
                            self.store.link_spatial(from, old)?;
                            self.store.unlink_spatial(from, old)?;
                        }
                    }
                    (None, _) => {
                        if let Some(to) = self.store.latest_record(j)? {
                            self.store.link_spatial(from, to)?;
                        }
                    }
                }
            }
        }

        let new_signal = self.current_view(t)?;
        Ok(AppliedResult {
            updated_pts: updated,
            dropped_pts: dropped,
            backfilled_pts: backfilled,
            memory_ops_delta: self.store.stats().memory_ops - ops_before,
            bytes_processed: self.bytes_processed - bytes_before,
            new_signal,
        })
    }

    /// Inserts a late record between its chronological neighbors and links it
    /// to the neighbors' records that were current at its generation tick.
    fn backfill(&mut self, pt: PtId, gen_tick: Tick, features: &[T]) -> Result<RecordId, IngestError> {
        let pred = if gen_tick == 0 { None } else { self.store.record_at(pt, gen_tick - 1)? };
        let succ = self.store.record_after(pt, gen_tick)?;
        let id = self.store.create_record(pt, gen_tick, features)?;
        if let Some(p) = pred {
            self.store.link_temporal(id, p)?;
        }
        if let Some(s) = succ {
            if pred.is_some() {
                self.store.relink_temporal(s, id)?;
            } else {
                self.store.link_temporal(s, id)?;
            }
        }
        let nbrs: Vec<PtId> = self.store.topology().neighbors(pt).iter().map(|&(j, _)| j).collect();
        for j in nbrs {
            if let Some(to) = self.store.record_at(j, gen_tick)? {
                self.store.link_spatial(id, to)?;
            }
        }
        Ok(id)
    }
}
