use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::agent::{train, Agent, AgentConfig, TrainingLog};
use crate::config::RunConfig;
use crate::world::{World, WorldConfig};

use super::{csv_writer, io_err, SuiteError};

/// Trains a fresh agent on `world`. Every episode replays the same seeded
/// world from tick 0, so only the agent changes between episodes.
pub fn train_agent(
    cfg: &RunConfig,
    agent_cfg: AgentConfig,
    world: &WorldConfig,
    episodes: usize,
    horizon: usize,
) -> Result<(Agent<f64>, TrainingLog), SuiteError> {
    let mut agent = Agent::new(world.n, crate::sim::FEATURES.len(), agent_cfg, cfg.seed)?;
    let log = train(&mut agent, episodes, horizon, || World::new(world, cfg.seed), &cfg.energy)?;
    Ok((agent, log))
}

/// One training log per learning rate in `cfg.lrs`.
pub fn run_training(cfg: &RunConfig) -> Result<Vec<TrainingLog>, SuiteError> {
    cfg.lrs
        .iter()
        .map(|&lr| {
            let agent_cfg = AgentConfig { lr, ..cfg.agent.clone() };
            train_agent(cfg, agent_cfg, &cfg.world, cfg.train_episodes, cfg.train_horizon).map(|(_, log)| log)
        })
        .collect()
}

pub(super) fn write(cfg: &RunConfig, dir: &Path, files: &mut Vec<PathBuf>) -> Result<String, SuiteError> {
    let logs = run_training(cfg)?;
    let path = dir.join("training.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(TrainingLog::HEADER)?;
    for log in &logs {
        log.write_rows(&mut w)?;
    }
    w.flush().map_err(io_err(&path))?;
    files.push(path);

    let window = 20.min(cfg.train_episodes);
    let mut s = format!("cumulative reward, last {window} episodes\n");
    let _ = writeln!(s, "{:>8} {:>12} {:>12} {:>12} {:>8}", "lr", "final", "sd", "range", "sd/range");
    for (lr, log) in cfg.lrs.iter().zip(&logs) {
        let (sd, range) = log.convergence(window);
        let last = log.rewards().last().copied().unwrap_or(0.0);
        let rel = if range > 0.0 { sd / range } else { 0.0 };
        let _ = writeln!(s, "{lr:>8} {last:>12.1} {sd:>12.2} {range:>12.1} {rel:>8.3}");
    }
    Ok(s)
}
