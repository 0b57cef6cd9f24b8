//! Per-device queues, the action-gated ETL into the twin store, and the
//! traditional update-on-arrival baseline.

mod action;
mod etl;
mod queue;
mod traditional;

pub use action::UpdateAction;
pub use etl::{AppliedResult, ApplyEvent, ApplyOutcome, EtlMode, IngestEngine};
pub use queue::PtQueue;
pub use traditional::TraditionalTwin;

use crate::graph::{GraphError, PtId};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IngestError {
    #[error("unknown physical twin {0}")]
    UnknownPt(PtId),
    #[error("action has {got} entries, topology has {expected} pts")]
    ActionLength { expected: usize, got: usize },
    #[error("action bits must be 0 or 1, found {0}")]
    BadActionBit(u8),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
