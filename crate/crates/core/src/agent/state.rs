use crate::graph::{GraphError, GraphSignal, Tick, TwinStore};
use crate::Scalar;

/// The last `delta` snapshots of the twin, `N x F x delta`.
///
/// Stored window-major: entry `(i, j, k)` sits at `(k * N + i) * F + j`, with
/// `k = delta - 1` the newest snapshot. Windows shorter than `delta` are padded
/// at the front with copies of the oldest available snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T> {
    n: usize,
    f: usize,
    ticks: Vec<Tick>,
    data: Vec<T>,
}

impl<T: Scalar> State<T> {
    /// Builds a state from snapshots ordered oldest to newest.
    pub fn from_snapshots(snapshots: &[GraphSignal<T>], delta: usize) -> Result<Self, GraphError> {
        let first = snapshots.first().ok_or(GraphError::MissingPtAt { tick: 0, pts: Vec::new() })?;
        let (n, f) = first.shape();
        let kept = &snapshots[snapshots.len().saturating_sub(delta)..];
        let pad = delta - kept.len();
        let mut ticks = Vec::with_capacity(delta);
        let mut data = Vec::with_capacity(n * f * delta);
        for s in std::iter::repeat_n(&kept[0], pad).chain(kept) {
            if s.shape() != (n, f) {
                return Err(GraphError::ShapeMismatch { expected: (n, f), got: s.shape() });
            }
            ticks.push(s.tick());
            data.extend_from_slice(s.as_slice());
        }
        Ok(Self { n, f, ticks, data })
    }

    /// Snapshots of `store` at ticks `t - delta + 1 ..= t`; ticks the store
    /// cannot cover yet are padded.
    pub fn from_store<S: TwinStore<T> + ?Sized>(store: &S, t: Tick, delta: usize) -> Result<Self, GraphError> {
        let lo = (t + 1).saturating_sub(delta as Tick);
        let mut snaps = Vec::with_capacity(delta);
        let mut last_err = None;
        for k in lo..=t {
            match store.snapshot(k) {
                Ok(s) => snaps.push(s),
                Err(e @ GraphError::MissingPtAt { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        if snaps.is_empty() {
            return Err(last_err.unwrap_or(GraphError::MissingPtAt { tick: t, pts: Vec::new() }));
        }
        Self::from_snapshots(&snaps, delta)
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn n_features(&self) -> usize {
        self.f
    }

    pub fn delta(&self) -> usize {
        self.ticks.len()
    }

    pub fn ticks(&self) -> &[Tick] {
        &self.ticks
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        self.data[(k * self.n + i) * self.f + j]
    }

    /// Flattened tensor, length `N * F * delta`.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Network input: the flattened tensor times `scale`.
    pub fn encode(&self, scale: T) -> Vec<T> {
        self.data.iter().map(|&v| v * scale).collect()
    }
}
