use std::fmt;

use crate::graph::{Tick, TwinStore};
use crate::world::{World, WorldConfig, WorldError};

use super::mse;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccuracyMode {
    Spatiotemporal,
    Traditional,
}

impl fmt::Display for AccuracyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AccuracyMode::Spatiotemporal => "spatiotemporal",
            AccuracyMode::Traditional => "traditional",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyRow {
    pub n: usize,
    pub mode: AccuracyMode,
    pub seed: u64,
    pub mse: f64,
}

/// Time-averaged snapshot error of both twin models on one world.
///
/// Every arrival is applied. The traditional twin is scored on its value
/// table at each tick. The spatiotemporal twin is scored on `snapshot(t - d)`
/// taken at tick `t`, where `d` is the channel's largest delay, so every
/// measurement generated at `t - d` has had the chance to arrive. Ticks
/// before `warmup` are skipped. Returns `(spatiotemporal, traditional)`.
pub fn accuracy_run(cfg: &WorldConfig, horizon: usize, warmup: Tick, seed: u64) -> Result<(f64, f64), WorldError> {
    let cfg = WorldConfig { traditional: Some(None), ..cfg.clone() };
    let mut world = World::<f64>::new(&cfg, seed)?;
    let settle = world.channel().max_delay();
    let (mut st_sum, mut st_count, mut tr_sum, mut tr_count) = (0.0, 0usize, 0.0, 0usize);
    for _ in 0..horizon {
        let t = world.advance()?;
        world.drain()?;
        if t >= warmup {
            let table = world.traditional().expect("traditional twin enabled").snapshot();
            tr_sum += mse(table, &world.ground_truth(t)?).expect("same shape");
            tr_count += 1;
        }
        if t >= warmup + settle {
            let at = t - settle;
            st_sum += mse(&world.store().snapshot(at)?, &world.ground_truth(at)?).expect("same shape");
            st_count += 1;
        }
    }
    let avg = |s: f64, c: usize| if c == 0 { f64::NAN } else { s / c as f64 };
    Ok((avg(st_sum, st_count), avg(tr_sum, tr_count)))
}

/// One row per `(n, mode, seed)`.
pub fn accuracy_sweep(
    base: &WorldConfig,
    ns: &[usize],
    seeds: &[u64],
    horizon: usize,
    warmup: Tick,
) -> Result<Vec<AccuracyRow>, WorldError> {
    let mut rows = Vec::new();
    for &n in ns {
        let cfg = WorldConfig { n, ..base.clone() };
        for &seed in seeds {
            let (st, tr) = accuracy_run(&cfg, horizon, warmup, seed)?;
            rows.push(AccuracyRow { n, mode: AccuracyMode::Spatiotemporal, seed, mse: st });
            rows.push(AccuracyRow { n, mode: AccuracyMode::Traditional, seed, mse: tr });
        }
    }
    Ok(rows)
}
