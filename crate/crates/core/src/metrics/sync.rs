use std::collections::BTreeMap;
use std::fmt;

use crate::graph::Tick;

use super::MetricsError;

/// Fate of one sampled observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capture {
    /// Reflected in the twin at this tick.
    Applied(Tick),
    /// Discarded by the gating action.
    Dropped,
    /// Lost in the channel.
    Lost,
    /// Still waiting when the run ended.
    Pending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyncLabel {
    Hit,
    Miss,
    None,
}

impl fmt::Display for SyncLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SyncLabel::Hit => "hit",
            SyncLabel::Miss => "miss",
            SyncLabel::None => "none",
        })
    }
}

/// Per-tick trajectories of one twin mode, plus the fate of the observations
/// sampled for hit/miss labeling (keyed by generation tick).
#[derive(Debug, Clone, Default)]
pub struct SyncLog {
    pub mode: String,
    pub ticks: Vec<Tick>,
    pub baseline: Vec<f64>,
    pub dt_value: Vec<f64>,
    pub samples: BTreeMap<Tick, Capture>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyncPoint {
    pub tick: Tick,
    pub mode: String,
    pub baseline: f64,
    pub dt_value: f64,
    pub label: SyncLabel,
}

/// Labels every tick: the observation generated at that tick is a hit when the
/// twin captured it within `hit_threshold` ticks, a miss when later or never,
/// and `none` when it was dropped, lost, or not sampled.
pub fn sync_series(log: &SyncLog, hit_threshold: Tick) -> Result<Vec<SyncPoint>, MetricsError> {
    if log.ticks.is_empty() {
        return Err(MetricsError::MissingLog(format!("{}: no ticks", log.mode)));
    }
    if log.baseline.len() != log.ticks.len() || log.dt_value.len() != log.ticks.len() {
        return Err(MetricsError::MissingLog(format!(
            "{}: {} ticks, {} baseline values, {} twin values",
            log.mode,
            log.ticks.len(),
            log.baseline.len(),
            log.dt_value.len()
        )));
    }
    Ok(log
        .ticks
        .iter()
        .zip(&log.baseline)
        .zip(&log.dt_value)
        .map(|((&tick, &baseline), &dt_value)| {
            let label = match log.samples.get(&tick) {
                Some(Capture::Applied(at)) if at.saturating_sub(tick) <= hit_threshold => SyncLabel::Hit,
                Some(Capture::Applied(_)) | Some(Capture::Pending) => SyncLabel::Miss,
                Some(Capture::Dropped) | Some(Capture::Lost) | None => SyncLabel::None,
            };
            SyncPoint { tick, mode: log.mode.clone(), baseline, dt_value, label }
        })
        .collect())
}
