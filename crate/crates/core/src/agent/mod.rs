//! DQN-based adaptive twinning: per-pt Q outputs gated by a binary step, the
//! literal reward/penalty, replay memory, Bellman updates and target syncing.

mod config;
mod dqn;
mod nn;
mod policy;
mod replay;
mod reward;
mod state;
mod train;

pub use config::AgentConfig;
pub use dqn::{composite_q, optimize, sync_target, td_loss_and_gradients};
pub use nn::{Dense, Gradients, QNetwork};
pub use policy::select_action;
pub use replay::{Experience, ReplayMemory};
pub use reward::{change_term, penalty, reward};
pub use state::State;
pub use train::{train, Agent, EpisodeRow, TrainingLog};

use crate::graph::GraphError;
use crate::ingest::IngestError;
use crate::sim::SimError;
use crate::world::WorldError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AgentError {
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("replay memory holds {have} experiences, batch needs {need}")]
    InsufficientExperience { have: usize, need: usize },
    #[error("empty batch")]
    EmptyBatch,
    #[error("invalid agent config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    World(#[from] WorldError),
}
