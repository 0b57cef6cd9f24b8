use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::graph::{GraphSignal, PtId, Tick};
use crate::ingest::{ApplyEvent, ApplyOutcome};
use crate::metrics::{mean_std, sync_series, Capture, SyncLog, SyncPoint};
use crate::world::World;

use super::training::train_agent;
use super::{csv_writer, io_err, sub_seed, SuiteError};

pub const TRADITIONAL: &str = "traditional";
pub const RL_AT: &str = "rl-at";

#[derive(Debug, Clone)]
pub struct SyncReport {
    pub traditional: Vec<SyncPoint>,
    pub rl_at: Vec<SyncPoint>,
    /// Exact per-pt state, one signal per tick.
    pub ground_truth: Vec<GraphSignal<f64>>,
}

/// Mean of `|dt_value - baseline|` over a slice of points.
pub fn mean_abs_deviation(points: &[SyncPoint]) -> f64 {
    let d: Vec<f64> = points.iter().map(|p| (p.dt_value - p.baseline).abs()).collect();
    mean_std(&d).0
}

impl SyncReport {
    /// Mean absolute deviation over the first and last quarter of the run.
    pub fn quartile_deviation(points: &[SyncPoint]) -> (f64, f64) {
        let q = (points.len() / 4).max(1);
        (mean_abs_deviation(&points[..q]), mean_abs_deviation(&points[points.len() - q..]))
    }
}

fn current_total(x: &GraphSignal<f64>) -> f64 {
    x.column_sum(0)
}

fn captures(
    events: &[ApplyEvent],
    lost: &HashSet<(PtId, Tick)>,
    tracked: &[PtId],
    ticks: &[Tick],
) -> BTreeMap<Tick, Capture> {
    let mut fate: BTreeMap<(PtId, Tick), Capture> = BTreeMap::new();
    for e in events {
        let c = match e.outcome {
            ApplyOutcome::Updated | ApplyOutcome::Backfilled => Capture::Applied(e.tick),
            ApplyOutcome::Dropped => Capture::Dropped,
        };
        fate.entry((e.pt, e.gen_tick)).or_insert(c);
    }
    ticks
        .iter()
        .map(|&t| {
            let pt = tracked[t as usize % tracked.len()];
            let c = if lost.contains(&(pt, t)) {
                Capture::Lost
            } else {
                fate.get(&(pt, t)).copied().unwrap_or(Capture::Pending)
            };
            (t, c)
        })
        .collect()
}

/// Runs the trained agent and a budget-limited traditional twin side by side
/// on one world and compares their total vehicle counts with the simulator.
pub fn run_sync(cfg: &RunConfig) -> Result<SyncReport, SuiteError> {
    let (mut agent, _) = train_agent(cfg, cfg.agent.clone(), &cfg.world, cfg.sync_train_episodes, cfg.train_horizon)?;

    let n = cfg.world.n;
    let budget = ((cfg.sync_budget_frac * n as f64).floor() as usize).max(1);
    let mut world_cfg = cfg.world.clone();
    world_cfg.traditional = Some(Some(budget));
    world_cfg.event_log = true;
    let mut world = World::<f64>::new(&world_cfg, cfg.seed)?;

    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, 7));
    let k = cfg.sync_samples.clamp(1, n);
    let tracked: Vec<PtId> = sample(&mut rng, n, k).into_vec();

    let mut ticks = Vec::with_capacity(cfg.horizon);
    let mut baseline = Vec::with_capacity(cfg.horizon);
    let (mut rl_value, mut tr_value) = (Vec::with_capacity(cfg.horizon), Vec::with_capacity(cfg.horizon));
    let mut truth = Vec::with_capacity(cfg.horizon);
    for _ in 0..cfg.horizon {
        let t = world.advance()?;
        let a = agent.act(&world.state(cfg.agent.delta)?, 0.0)?;
        let applied = world.apply(&a)?;
        let gt = world.ground_truth(t)?;
        ticks.push(t);
        baseline.push(world.sim().total_at(t).map_err(crate::world::WorldError::from)?);
        rl_value.push(current_total(&applied.new_signal));
        let tr = world.traditional().expect("traditional twin enabled");
        tr_value.push(current_total(tr.snapshot()));
        truth.push(gt);
    }

    let lost: HashSet<(PtId, Tick)> = world.lost().iter().copied().collect();
    let tr_events = world.traditional().map(|tr| tr.events()).unwrap_or(&[]);
    let rl_log = SyncLog {
        mode: RL_AT.into(),
        ticks: ticks.clone(),
        baseline: baseline.clone(),
        dt_value: rl_value,
        samples: captures(world.ingest().events(), &lost, &tracked, &ticks),
    };
    let tr_log = SyncLog {
        mode: TRADITIONAL.into(),
        samples: captures(tr_events, &lost, &tracked, &ticks),
        ticks,
        baseline,
        dt_value: tr_value,
    };
    let threshold = cfg.hit_threshold;
    Ok(SyncReport {
        traditional: sync_series(&tr_log, threshold)?,
        rl_at: sync_series(&rl_log, threshold)?,
        ground_truth: truth,
    })
}

pub(super) fn write(cfg: &RunConfig, dir: &Path, files: &mut Vec<PathBuf>) -> Result<String, SuiteError> {
    let report = run_sync(cfg)?;
    let path = dir.join("sync.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["tick", "mode", "baseline", "dt_value", "label"])?;
    for p in report.traditional.iter().chain(&report.rl_at) {
        w.write_record([
            p.tick.to_string(),
            p.mode.clone(),
            p.baseline.to_string(),
            p.dt_value.to_string(),
            p.label.to_string(),
        ])?;
    }
    w.flush().map_err(io_err(&path))?;
    files.push(path);

    let path = dir.join("ground_truth.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["tick", "pt_id", "current", "incoming", "outgoing"])?;
    for x in &report.ground_truth {
        for (i, row) in x.rows().enumerate() {
            let mut rec = vec![x.tick().to_string(), i.to_string()];
            rec.extend(row.iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
    }
    w.flush().map_err(io_err(&path))?;
    files.push(path);

    let mut s = String::from("absolute deviation of total vehicles from the simulator\n");
    let _ =
        writeln!(s, "{:>12} {:>10} {:>10} {:>10} {:>6} {:>6}", "mode", "mean", "first q", "last q", "hits", "misses");
    for points in [&report.traditional, &report.rl_at] {
        let (first, last) = SyncReport::quartile_deviation(points);
        let hits = points.iter().filter(|p| p.label == crate::metrics::SyncLabel::Hit).count();
        let misses = points.iter().filter(|p| p.label == crate::metrics::SyncLabel::Miss).count();
        let _ = writeln!(
            s,
            "{:>12} {:>10.2} {:>10.2} {:>10.2} {hits:>6} {misses:>6}",
            points[0].mode,
            mean_abs_deviation(points),
            first,
            last
        );
    }
    Ok(s)
}
