use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::metrics::{accuracy_sweep, mean_std, AccuracyMode, AccuracyRow};

use super::{csv_writer, sub_seed, SuiteError};

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    pub rows: Vec<AccuracyRow>,
}

impl AccuracyReport {
    /// Seed-averaged MSE per `n` for one mode, in sweep order.
    pub fn means(&self, mode: AccuracyMode) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        for n in self.rows.iter().map(|r| r.n) {
            if out.iter().any(|&(m, _)| m == n) {
                continue;
            }
            let v: Vec<f64> = self.rows.iter().filter(|r| r.n == n && r.mode == mode).map(|r| r.mse).collect();
            out.push((n, mean_std(&v).0));
        }
        out
    }
}

pub fn run_accuracy(cfg: &RunConfig) -> Result<AccuracyReport, SuiteError> {
    let seeds: Vec<u64> = (0..cfg.accuracy_seeds as u64).map(|k| sub_seed(cfg.seed, k)).collect();
    let rows = accuracy_sweep(&cfg.world, &cfg.accuracy_ns, &seeds, cfg.horizon, cfg.warmup)?;
    Ok(AccuracyReport { rows })
}

pub(super) fn write(cfg: &RunConfig, dir: &Path, files: &mut Vec<PathBuf>) -> Result<String, SuiteError> {
    let report = run_accuracy(cfg)?;
    let path = dir.join("accuracy.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["n", "mode", "seed", "mse"])?;
    for r in &report.rows {
        w.write_record([r.n.to_string(), r.mode.to_string(), r.seed.to_string(), r.mse.to_string()])?;
    }
    w.flush().map_err(super::io_err(&path))?;
    files.push(path);

    let mut s = String::from("snapshot MSE vs ground truth, averaged over seeds\n");
    let _ = writeln!(s, "{:>6} {:>16} {:>16} {:>8}", "N", "spatiotemporal", "traditional", "ratio");
    let st = report.means(AccuracyMode::Spatiotemporal);
    let tr = report.means(AccuracyMode::Traditional);
    for ((n, a), (_, b)) in st.iter().zip(&tr) {
        let _ = writeln!(s, "{n:>6} {a:>16.3} {b:>16.3} {:>8.2}", b / a);
    }
    Ok(s)
}
