use crate::Scalar;

use super::{AgentConfig, AgentError, Experience, Gradients, QNetwork};

/// `Q(s, a) = sum_i a_i q_i(s)`.
pub fn composite_q<T: Scalar>(q: &[T], a: impl IntoIterator<Item = T>) -> T {
    q.iter().zip(a).map(|(&qi, ai)| qi * ai).sum()
}

/// Bellman target `r + gamma * sum_i max(q'_i(s'), 0)`, or `r` when terminal.
fn target_value<T: Scalar>(e: &Experience<T>, target: &QNetwork<T>, cfg: &AgentConfig) -> Result<T, AgentError> {
    if e.terminal {
        return Ok(e.r);
    }
    let q_next = target.forward(&e.s_next.encode(T::of(cfg.input_scale)))?;
    let best: T = q_next.iter().map(|&v| v.max(T::zero())).sum();
    Ok(e.r + T::of(cfg.gamma) * best)
}

/// Mean squared TD error over `batch` and its gradient w.r.t. `net`.
pub fn td_loss_and_gradients<T: Scalar>(
    batch: &[&Experience<T>],
    net: &QNetwork<T>,
    target: &QNetwork<T>,
    cfg: &AgentConfig,
) -> Result<(T, Gradients<T>), AgentError> {
    if batch.is_empty() {
        return Err(AgentError::EmptyBatch);
    }
    let m = T::of_usize(batch.len());
    let scale = T::of(cfg.input_scale);
    let mut grads = net.zero_gradients();
    let mut loss = T::zero();
    for e in batch {
        if e.a.len() != net.output_size() {
            return Err(AgentError::ShapeMismatch { expected: net.output_size(), got: e.a.len() });
        }
        let y = target_value(e, target, cfg)?;
        let trace = net.forward_trace(&e.s.encode(scale))?;
        let err = composite_q(trace.output(), e.a.as_indicator()) - y;
        loss = loss + err * err;
        let two_err = (err + err) / m;
        let d_out: Vec<T> = e.a.as_indicator::<T>().map(|ai| two_err * ai).collect();
        net.backward(&trace, &d_out, &mut grads);
    }
    Ok((loss / m, grads))
}

/// One gradient step on `net` (target frozen); returns the pre-step loss.
pub fn optimize<T: Scalar>(
    batch: &[&Experience<T>],
    net: &mut QNetwork<T>,
    target: &QNetwork<T>,
    cfg: &AgentConfig,
) -> Result<T, AgentError> {
    let (loss, mut grads) = td_loss_and_gradients(batch, net, target, cfg)?;
    if cfg.grad_clip > 0.0 {
        let norm = grads.norm();
        let clip = T::of(cfg.grad_clip);
        if norm > clip {
            grads.scale(clip / norm);
        }
    }
    net.apply_gradients(&grads, T::of(cfg.lr));
    Ok(loss)
}

/// Copies `net` into `target`.
pub fn sync_target<T: Scalar>(net: &QNetwork<T>, target: &mut QNetwork<T>) -> Result<(), AgentError> {
    target.copy_from(net)
}
