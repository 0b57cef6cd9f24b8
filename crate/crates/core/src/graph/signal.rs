use crate::Scalar;

use super::{GraphError, Tick};

/// `N x F` feature matrix stamped with one tick, stored row-major (one row per pt).
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSignal<T> {
    tick: Tick,
    n: usize,
    f: usize,
    values: Vec<T>,
}

impl<T: Scalar> GraphSignal<T> {
    /// Builds a signal, rejecting non-finite values.
    pub fn new(tick: Tick, n: usize, f: usize, values: Vec<T>) -> Result<Self, GraphError> {
        if values.len() != n * f {
            return Err(GraphError::ShapeMismatch { expected: (n, f), got: (values.len() / f.max(1), f) });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(GraphError::BadSignalValue { row: k / f, col: k % f });
        }
        Ok(Self { tick, n, f, values })
    }

    /// Like [`GraphSignal::new`] but additionally requires every value to be
    /// nonnegative (densities and flows).
    pub fn nonnegative(tick: Tick, n: usize, f: usize, values: Vec<T>) -> Result<Self, GraphError> {
        if let Some(k) = values.iter().position(|v| *v < T::zero()) {
            return Err(GraphError::BadSignalValue { row: k / f.max(1), col: k % f.max(1) });
        }
        Self::new(tick, n, f, values)
    }

    pub fn from_rows(tick: Tick, rows: &[Vec<T>]) -> Result<Self, GraphError> {
        let n = rows.len();
        let f = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != f) {
            return Err(GraphError::ShapeMismatch { expected: (n, f), got: (n, bad.len()) });
        }
        Self::new(tick, n, f, rows.concat())
    }

    pub fn zeros(tick: Tick, n: usize, f: usize) -> Self {
        Self { tick, n, f, values: vec![T::zero(); n * f] }
    }

    pub fn tick(&self) -> Tick {
        self.tick
    }

    pub fn with_tick(mut self, tick: Tick) -> Self {
        self.tick = tick;
        self
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn n_features(&self) -> usize {
        self.f
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n, self.f)
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.f + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.f..(i + 1) * self.f]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.values.chunks(self.f.max(1))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub(crate) fn set_row(&mut self, i: usize, row: &[T]) {
        self.values[i * self.f..(i + 1) * self.f].copy_from_slice(row);
    }

    /// Sum of column `j` over all pts.
    pub fn column_sum(&self, j: usize) -> T {
        self.rows().map(|r| r[j]).sum()
    }

    pub fn cast<U: Scalar>(&self) -> GraphSignal<U> {
        GraphSignal {
            tick: self.tick,
            n: self.n,
            f: self.f,
            values: self.values.iter().map(|v| U::of(v.as_f64())).collect(),
        }
    }
}
