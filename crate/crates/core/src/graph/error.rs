use super::{PtId, RecordId, Tick};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("record for pt {pt} at tick {tick} already exists")]
    DuplicateRecord { pt: PtId, tick: Tick },
    #[error("unknown physical twin {0}")]
    UnknownPt(PtId),
    #[error("bad feature vector: expected {expected} finite values, got {got:?}")]
    BadFeatureVector { expected: usize, got: Vec<f64> },
    #[error("temporal edge must stay within one pt ({newer} vs {older})")]
    CrossPtTemporal { newer: PtId, older: PtId },
    #[error("temporal edge needs newer tick > older tick ({newer} <= {older})")]
    NonPositiveDt { newer: Tick, older: Tick },
    #[error("no record with id {0}")]
    MissingRecord(RecordId),
    #[error("no spatial relation {0} -> {1} in the topology")]
    NoSuchSpatialRelation(PtId, PtId),
    #[error("no record at or before tick {tick} for pts {pts:?}")]
    MissingPtAt { tick: Tick, pts: Vec<PtId> },
    #[error("bad range: {lo} > {hi}")]
    BadRange { lo: Tick, hi: Tick },
    #[error("store holds {available} records, query needs {requested}")]
    InsufficientData { requested: usize, available: usize },
    #[error("record {0} has no outgoing temporal edge to relink")]
    NoTemporalEdge(RecordId),
    #[error("invalid topology: {0}")]
    BadTopology(String),
    #[error("signal shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch { expected: (usize, usize), got: (usize, usize) },
    #[error("non-finite or negative signal value at ({row}, {col})")]
    BadSignalValue { row: usize, col: usize },
}
