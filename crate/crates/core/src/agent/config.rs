use super::AgentError;

#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig {
    /// State window length in ticks.
    pub delta: usize,
    pub lr: f64,
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Multiplicative decay applied once per episode.
    pub epsilon_decay: f64,
    pub replay_capacity: usize,
    pub batch_size: usize,
    /// Target network is synced when `tick % update_interval == 0`.
    pub update_interval: u64,
    pub hidden_sizes: Vec<usize>,
    /// +1 rewards one-step change as printed; -1 negates the change term.
    pub reward_sign: f64,
    pub penalty_weight: f64,
    /// State features are multiplied by this before entering the network.
    pub input_scale: f64,
    /// Global gradient-norm clip per step (0 disables).
    pub grad_clip: f64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            delta: 4,
            lr: 0.06,
            gamma: 0.1,
            epsilon_start: 1.0,
            epsilon_end: 0.01,
            epsilon_decay: 0.97,
            replay_capacity: 10_000,
            batch_size: 32,
            update_interval: 100,
            hidden_sizes: vec![64, 64],
            reward_sign: 1.0,
            penalty_weight: 1.0,
            input_scale: 1e-4,
            grad_clip: 1000.0,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let bad = |m: String| Err(AgentError::BadConfig(m));
        if self.delta < 1 {
            return bad("delta must be >= 1".into());
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad(format!("gamma {} not in [0, 1)", self.gamma));
        }
        for (name, e) in [
            ("epsilon_start", self.epsilon_start),
            ("epsilon_end", self.epsilon_end),
            ("epsilon_decay", self.epsilon_decay),
        ] {
            if !(0.0..=1.0).contains(&e) {
                return bad(format!("{name} {e} not in [0, 1]"));
            }
        }
        if self.update_interval < 1 || self.batch_size < 1 || self.replay_capacity < self.batch_size {
            return bad("need update_interval >= 1 and replay_capacity >= batch_size >= 1".into());
        }
        if self.reward_sign != 1.0 && self.reward_sign != -1.0 {
            return bad(format!("reward_sign must be +1 or -1, got {}", self.reward_sign));
        }
        if !(self.lr > 0.0) || self.penalty_weight < 0.0 || self.grad_clip < 0.0 || !(self.input_scale > 0.0) {
            return bad("lr and input_scale must be > 0; penalty_weight and grad_clip >= 0".into());
        }
        if self.hidden_sizes.contains(&0) {
            return bad("hidden layer widths must be >= 1".into());
        }
        Ok(())
    }

    /// Exploration rate for a zero-based episode index.
    pub fn epsilon(&self, episode: usize) -> f64 {
        (self.epsilon_start * self.epsilon_decay.powi(episode as i32)).max(self.epsilon_end)
    }
}
