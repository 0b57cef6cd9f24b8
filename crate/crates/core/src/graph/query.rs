use std::time::{Duration, Instant};

use crate::Scalar;

use super::{EdgeKind, GraphError, PtId, RecordId, Tick, TwinStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Out,
    In,
}

/// One edge incident to a queried record, with the record on the other end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub kind: EdgeKind,
    pub direction: Direction,
    pub record: RecordId,
    pub pt: PtId,
    pub gen_tick: Tick,
    pub value: f64,
}

impl Neighbor {
    pub(crate) fn sort_key(&self) -> (EdgeKind, Direction, RecordId, u64) {
        (self.kind, self.direction, self.record, self.value.to_bits())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryRow {
    pub id: RecordId,
    pub pt: PtId,
    pub gen_tick: Tick,
    neighbors: (usize, usize),
}

/// Flat neighborhood query result.
///
/// Rows follow the requested id order. Features of row `k` live at
/// `features[k*F..(k+1)*F]`; neighbor `m` carries its own features at
/// `neighbor_features[m*F..(m+1)*F]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QueryResult<T> {
    pub n_features: usize,
    pub rows: Vec<QueryRow>,
    pub features: Vec<T>,
    pub neighbors: Vec<Neighbor>,
    pub neighbor_features: Vec<T>,
}

impl<T: Scalar> QueryResult<T> {
    pub(crate) fn with_capacity(n_features: usize, rows: usize) -> Self {
        Self {
            n_features,
            rows: Vec::with_capacity(rows),
            features: Vec::with_capacity(rows * n_features),
            neighbors: Vec::new(),
            neighbor_features: Vec::new(),
        }
    }

    /// Appends one row; `neighbors` must already be sorted.
    pub(crate) fn push_row(
        &mut self,
        id: RecordId,
        pt: PtId,
        gen_tick: Tick,
        features: &[T],
        neighbors: impl IntoIterator<Item = (Neighbor, impl AsRef<[T]>)>,
    ) {
        let start = self.neighbors.len();
        for (nb, feats) in neighbors {
            self.neighbors.push(nb);
            self.neighbor_features.extend_from_slice(feats.as_ref());
        }
        self.features.extend_from_slice(features);
        self.rows.push(QueryRow { id, pt, gen_tick, neighbors: (start, self.neighbors.len()) });
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row_features(&self, k: usize) -> &[T] {
        &self.features[k * self.n_features..(k + 1) * self.n_features]
    }

    pub fn row_neighbors(&self, k: usize) -> &[Neighbor] {
        let (a, b) = self.rows[k].neighbors;
        &self.neighbors[a..b]
    }

    pub fn total_records(&self) -> usize {
        self.rows.len() + self.neighbors.len()
    }
}

#[derive(Debug, Clone)]
pub struct TimedQuery<T> {
    pub result: QueryResult<T>,
    pub elapsed: Duration,
}

/// Retrieves records `0..query_size` with their 1-hop neighborhoods and times
/// the retrieval on the monotonic clock.
pub fn timed_query<T: Scalar, S: TwinStore<T> + ?Sized>(
    store: &S,
    query_size: usize,
) -> Result<TimedQuery<T>, GraphError> {
    let available = store.stats().record_count as usize;
    if query_size > available {
        return Err(GraphError::InsufficientData { requested: query_size, available });
    }
    let ids: Vec<RecordId> = (0..query_size as RecordId).collect();
    let start = Instant::now();
    let result = store.neighborhood(&ids)?;
    let elapsed = start.elapsed();
    Ok(TimedQuery { result, elapsed })
}
