//! Experiment drivers behind the command-line subcommands. Each driver returns
//! its rows so tests can check them directly; [`run_suite`] adds CSV output,
//! a text summary and the resolved config.

mod accuracy;
mod query;
mod resources;
mod sync;
mod training;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub use accuracy::{run_accuracy, AccuracyReport};
pub use query::{build_bench_stores, run_query_bench, QueryBenchRow};
pub use resources::{run_resources, ResourceRow};
pub use sync::{mean_abs_deviation, run_sync, SyncReport};
pub use training::{run_training, train_agent};

use crate::agent::AgentError;
use crate::config::{ConfigError, RunConfig};
use crate::graph::GraphError;
use crate::metrics::MetricsError;
use crate::world::WorldError;

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("backends disagree at query size {0}")]
    BackendMismatch(usize),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Accuracy,
    QueryBench,
    Train,
    Resources,
    Sync,
}

impl Command {
    pub const ALL: [Command; 5] =
        [Command::Accuracy, Command::QueryBench, Command::Train, Command::Resources, Command::Sync];

    pub fn name(self) -> &'static str {
        match self {
            Command::Accuracy => "accuracy",
            Command::QueryBench => "query-bench",
            Command::Train => "train",
            Command::Resources => "resources",
            Command::Sync => "sync",
        }
    }

    /// Main CSV written by the command.
    pub fn csv_name(self) -> &'static str {
        match self {
            Command::Accuracy => "accuracy.csv",
            Command::QueryBench => "query_bench.csv",
            Command::Train => "training.csv",
            Command::Resources => "resources.csv",
            Command::Sync => "sync.csv",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown command {s:?}"))
    }
}

/// Files written and the human-readable summary of one run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SuiteError + '_ {
    move |source| SuiteError::Io { path: path.to_path_buf(), source }
}

pub(crate) fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, SuiteError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(file))
}

/// Derived seed for the `k`-th independent stream of a run.
pub(crate) fn sub_seed(seed: u64, k: u64) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(k.wrapping_mul(0xbf58_476d_1ce4_e5b9)) ^ k
}

/// Runs one experiment into `cfg.out_dir`.
pub fn run_suite(cmd: Command, cfg: &RunConfig) -> Result<Outcome, SuiteError> {
    cfg.validate()?;
    let dir = &cfg.out_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let resolved = dir.join("config.resolved");
    fs::write(&resolved, cfg.resolved()).map_err(io_err(&resolved))?;

    let mut files = vec![resolved];
    let summary = match cmd {
        Command::Accuracy => accuracy::write(cfg, dir, &mut files)?,
        Command::QueryBench => query::write(cfg, dir, &mut files)?,
        Command::Train => training::write(cfg, dir, &mut files)?,
        Command::Resources => resources::write(cfg, dir, &mut files)?,
        Command::Sync => sync::write(cfg, dir, &mut files)?,
    };
    let path = dir.join(format!("{}_summary.txt", cmd.name().replace('-', "_")));
    fs::write(&path, &summary).map_err(io_err(&path))?;
    files.push(path);
    Ok(Outcome { files, summary })
}
