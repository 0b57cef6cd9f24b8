//! Evaluation quantities: snapshot error, energy proxy, synchronization series
//! and the accuracy sweep.

mod accuracy;
mod energy;
mod sync;

pub use accuracy::{accuracy_run, accuracy_sweep, AccuracyMode, AccuracyRow};
pub use energy::{energy_proxy, EnergyModel};
pub use sync::{sync_series, Capture, SyncLabel, SyncLog, SyncPoint};

use crate::graph::GraphSignal;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("shape mismatch: {expected:?} vs {got:?}")]
    ShapeMismatch { expected: (usize, usize), got: (usize, usize) },
    #[error("incomplete run log: {0}")]
    MissingLog(String),
}

/// Mean of squared elementwise differences over all `N * F` entries.
pub fn mse<T: Scalar>(a: &GraphSignal<T>, b: &GraphSignal<T>) -> Result<f64, MetricsError> {
    if a.shape() != b.shape() {
        return Err(MetricsError::ShapeMismatch { expected: a.shape(), got: b.shape() });
    }
    let len = a.as_slice().len();
    if len == 0 {
        return Ok(0.0);
    }
    let sum: f64 = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&x, &y)| {
            let d = x.as_f64() - y.as_f64();
            d * d
        })
        .sum();
    Ok(sum / len as f64)
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Median of `xs` (mean of the middle pair for even lengths).
pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mse_hand_value() {
        let a = GraphSignal::from_rows(0, &[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = GraphSignal::from_rows(0, &[vec![1.0, 2.0], vec![3.0, 6.0]]).unwrap();
        assert_eq!(mse(&a, &a).unwrap(), 0.0);
        assert_eq!(mse(&a, &b).unwrap(), 1.0);
        assert_eq!(mse(&b, &a).unwrap(), 1.0);
    }

    #[test]
    fn mse_shape() {
        let a = GraphSignal::<f64>::zeros(0, 2, 2);
        let b = GraphSignal::<f64>::zeros(0, 2, 3);
        assert!(mse(&a, &b).is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-12);
    }
}
