use crate::graph::{GraphSignal, SpatialGraph};
use crate::ingest::UpdateAction;
use crate::Scalar;

use super::{AgentConfig, AgentError};

/// Memory operations charged for `a`: retrieval, record creation and temporal
/// edge per selected pt, plus one per outgoing spatial edge.
pub fn penalty(a: &UpdateAction, g: &SpatialGraph) -> f64 {
    a.bits().iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| (3 + g.out_degree(i)) as f64).sum()
}

/// `(1 / (N + F)) * sum |x_next - x_t|`.
pub fn change_term<T: Scalar>(x_t: &GraphSignal<T>, x_next: &GraphSignal<T>) -> Result<T, AgentError> {
    let (n, f) = x_t.shape();
    if x_next.shape() != (n, f) {
        return Err(AgentError::ShapeMismatch { expected: n * f, got: x_next.as_slice().len() });
    }
    let total: T = x_t.as_slice().iter().zip(x_next.as_slice()).map(|(&a, &b)| (b - a).abs()).sum();
    Ok(total / T::of_usize(n + f))
}

pub fn reward<T: Scalar>(
    x_t: &GraphSignal<T>,
    x_next: &GraphSignal<T>,
    a: &UpdateAction,
    g: &SpatialGraph,
    cfg: &AgentConfig,
) -> Result<T, AgentError> {
    if a.len() != g.n_nodes() {
        return Err(AgentError::ShapeMismatch { expected: g.n_nodes(), got: a.len() });
    }
    let change = change_term(x_t, x_next)?;
    Ok(T::of(cfg.reward_sign) * change - T::of(cfg.penalty_weight * penalty(a, g)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fan() -> SpatialGraph {
        SpatialGraph::new(3, [(0, 1, 1.0), (0, 2, 1.0)]).unwrap()
    }

    #[test]
    fn penalty_hand_counts() {
        assert_eq!(penalty(&UpdateAction::zeros(3), &fan()), 0.0);
        assert_eq!(penalty(&UpdateAction::new(vec![true, false, false]), &fan()), 5.0);
        let ring = SpatialGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        assert_eq!(penalty(&UpdateAction::ones(3), &ring), 12.0);
    }

    #[test]
    fn literal_change_term() {
        let g = SpatialGraph::new(2, [(0, 1, 1.0)]).unwrap();
        let x0 = GraphSignal::from_rows(0, &[vec![0.0], vec![0.0]]).unwrap();
        let x1 = GraphSignal::from_rows(1, &[vec![3.0], vec![4.0]]).unwrap();
        let cfg = AgentConfig::default();
        assert_eq!(reward(&x0, &x0, &UpdateAction::zeros(2), &g, &cfg).unwrap(), 0.0);
        let r: f64 = reward(&x0, &x1, &UpdateAction::zeros(2), &g, &cfg).unwrap();
        assert!((r - 7.0 / 3.0).abs() < 1e-12);
        let r: f64 = reward(&x0, &x1, &UpdateAction::new(vec![true, false]), &g, &cfg).unwrap();
        assert!((r + 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch() {
        let x0 = GraphSignal::<f64>::zeros(0, 2, 1);
        let x1 = GraphSignal::<f64>::zeros(0, 3, 1);
        assert!(change_term(&x0, &x1).is_err());
    }
}
