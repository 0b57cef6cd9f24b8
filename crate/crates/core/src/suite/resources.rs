use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::agent::Agent;
use crate::config::RunConfig;
use crate::graph::TwinStore;
use crate::ingest::UpdateAction;
use crate::metrics::{energy_proxy, mse};
use crate::world::{World, WorldConfig};

use super::training::train_agent;
use super::{csv_writer, io_err, SuiteError};

pub const RL_AT: &str = "rl-at";
pub const UPDATE_ALL: &str = "update-all";

#[derive(Debug, Clone, PartialEq)]
pub struct ResourceRow {
    pub payload_bytes: u64,
    pub mode: &'static str,
    pub energy_mj: f64,
    /// Largest RAM proxy seen during the run.
    pub ram_proxy_bytes: u64,
    /// Mean snapshot MSE of the live view after warmup.
    pub mse: f64,
}

fn evaluate(
    cfg: &RunConfig,
    world_cfg: &WorldConfig,
    mut agent: Option<&mut Agent<f64>>,
    mode: &'static str,
) -> Result<ResourceRow, SuiteError> {
    let mut world = World::<f64>::new(world_cfg, cfg.seed)?;
    let ops0 = world.store().stats().memory_ops;
    let bytes0 = world.ingest().bytes_processed();
    let mut peak = world.ingest().stats().ram_proxy_bytes;
    let (mut err, mut scored) = (0.0, 0usize);
    for _ in 0..cfg.resources_horizon {
        let t = world.advance()?;
        peak = peak.max(world.ingest().stats().ram_proxy_bytes);
        let a = match agent.as_deref_mut() {
            Some(agent) => agent.act(&world.state(cfg.agent.delta)?, 0.0)?,
            None => UpdateAction::ones(world.n_nodes()),
        };
        let applied = world.apply(&a)?;
        peak = peak.max(world.ingest().stats().ram_proxy_bytes);
        if t >= cfg.warmup {
            err += mse(&applied.new_signal, &world.ground_truth(t)?)?;
            scored += 1;
        }
    }
    let ops = world.store().stats().memory_ops - ops0;
    let bytes = world.ingest().bytes_processed() - bytes0;
    Ok(ResourceRow {
        payload_bytes: world_cfg.traffic.payload_bytes,
        mode,
        energy_mj: energy_proxy(ops, bytes, &cfg.energy),
        ram_proxy_bytes: peak,
        mse: if scored > 0 { err / scored as f64 } else { 0.0 },
    })
}

/// Trains one agent, then runs it greedily against update-all at every
/// payload size. Payload size does not enter the reward, so a single
/// trained agent serves the whole sweep.
pub fn run_resources(cfg: &RunConfig) -> Result<Vec<ResourceRow>, SuiteError> {
    let (mut agent, _) =
        train_agent(cfg, cfg.agent.clone(), &cfg.world, cfg.resources_train_episodes, cfg.train_horizon)?;
    let mut rows = Vec::new();
    for &payload in &cfg.resources_payloads {
        let mut world_cfg = cfg.world.clone();
        world_cfg.traffic.payload_bytes = payload as u64;
        rows.push(evaluate(cfg, &world_cfg, Some(&mut agent), RL_AT)?);
        rows.push(evaluate(cfg, &world_cfg, None, UPDATE_ALL)?);
    }
    Ok(rows)
}

pub(super) fn write(cfg: &RunConfig, dir: &Path, files: &mut Vec<PathBuf>) -> Result<String, SuiteError> {
    let rows = run_resources(cfg)?;
    let path = dir.join("resources.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["payload_bytes", "mode", "energy_mj", "ram_proxy_bytes", "mse"])?;
    for r in &rows {
        w.write_record([
            r.payload_bytes.to_string(),
            r.mode.to_string(),
            r.energy_mj.to_string(),
            r.ram_proxy_bytes.to_string(),
            r.mse.to_string(),
        ])?;
    }
    w.flush().map_err(io_err(&path))?;
    files.push(path);

    let mut s = String::from("RL-AT relative to update-all\n");
    let _ = writeln!(s, "{:>8} {:>10} {:>10} {:>10}", "payload", "energy", "peak ram", "mse");
    for pair in rows.chunks(2) {
        let [rl, all] = pair else { continue };
        let _ = writeln!(
            s,
            "{:>8} {:>10.3} {:>10.3} {:>10.3}",
            rl.payload_bytes,
            rl.energy_mj / all.energy_mj,
            rl.ram_proxy_bytes as f64 / all.ram_proxy_bytes as f64,
            rl.mse / all.mse
        );
    }
    Ok(s)
}
