use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::TwinStore;
use crate::ingest::UpdateAction;
use crate::metrics::{energy_proxy, mean_std, EnergyModel};
use crate::world::{World, WorldError};
use crate::Scalar;

use super::{
    optimize, reward, select_action, sync_target, AgentConfig, AgentError, Experience, QNetwork, ReplayMemory, State,
};

/// Online network, frozen target, replay memory and the exploration stream.
#[derive(Debug, Clone)]
pub struct Agent<T> {
    cfg: AgentConfig,
    net: QNetwork<T>,
    target: QNetwork<T>,
    memory: ReplayMemory<T>,
    rng: ChaCha8Rng,
    steps: u64,
}

impl<T: Scalar> Agent<T> {
    pub fn new(n: usize, f: usize, cfg: AgentConfig, seed: u64) -> Result<Self, AgentError> {
        cfg.validate()?;
        let net = QNetwork::new(n * f * cfg.delta, &cfg.hidden_sizes, n, seed);
        Ok(Self {
            target: net.clone(),
            net,
            memory: ReplayMemory::new(cfg.replay_capacity),
            rng: ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_a9e7),
            steps: 0,
            cfg,
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.cfg
    }

    pub fn net(&self) -> &QNetwork<T> {
        &self.net
    }

    pub fn target(&self) -> &QNetwork<T> {
        &self.target
    }

    pub fn memory(&self) -> &ReplayMemory<T> {
        &self.memory
    }

    /// Ticks observed so far, across episodes.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn q_values(&self, s: &State<T>) -> Result<Vec<T>, AgentError> {
        self.net.forward(&s.encode(T::of(self.cfg.input_scale)))
    }

    pub fn act(&mut self, s: &State<T>, epsilon: f64) -> Result<UpdateAction, AgentError> {
        let q = self.q_values(s)?;
        Ok(select_action(&q, epsilon, &mut self.rng))
    }

    /// Stores `e`, runs one optimizer step when enough experience exists, and
    /// syncs the target on every `update_interval`-th tick. Returns the loss.
    pub fn observe(&mut self, e: Experience<T>) -> Result<Option<T>, AgentError> {
        self.memory.remember(e);
        let loss = if self.memory.len() >= self.cfg.batch_size {
            let batch = self.memory.sample_batch(self.cfg.batch_size, &mut self.rng)?;
            Some(optimize(&batch, &mut self.net, &self.target, &self.cfg)?)
        } else {
            None
        };
        self.steps += 1;
        if self.steps.is_multiple_of(self.cfg.update_interval) {
            sync_target(&self.net, &mut self.target)?;
        }
        Ok(loss)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRow {
    pub episode: usize,
    pub lr: f64,
    pub cumulative_reward: f64,
    /// Mean optimizer loss over the episode (0 before the first batch).
    pub mean_loss: f64,
    /// Update bits set, summed over the episode.
    pub actions_taken: u64,
    pub mem_ops: u64,
    pub energy_mj: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingLog {
    pub rows: Vec<EpisodeRow>,
}

impl TrainingLog {
    pub const HEADER: [&'static str; 7] =
        ["episode", "lr", "cumulative_reward", "mean_loss", "actions_taken", "mem_ops", "energy_mj"];

    pub fn rewards(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.cumulative_reward).collect()
    }

    /// Standard deviation of cumulative reward over the last `window`
    /// episodes, and the reward range over the whole run.
    pub fn convergence(&self, window: usize) -> (f64, f64) {
        let r = self.rewards();
        let tail = &r[r.len().saturating_sub(window)..];
        let (_, sd) = mean_std(tail);
        let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (sd, hi - lo)
    }

    pub fn write_rows<W: Write>(&self, w: &mut csv::Writer<W>) -> csv::Result<()> {
        for r in &self.rows {
            w.write_record([
                r.episode.to_string(),
                r.lr.to_string(),
                r.cumulative_reward.to_string(),
                r.mean_loss.to_string(),
                r.actions_taken.to_string(),
                r.mem_ops.to_string(),
                r.energy_mj.to_string(),
            ])?;
        }
        Ok(())
    }
}

/// Runs the adaptive-twinning loop for `episodes` episodes of `horizon`
/// ticks. Each episode starts from a fresh world built by `make_world`;
/// exploration decays per episode.
pub fn train<T: Scalar>(
    agent: &mut Agent<T>,
    episodes: usize,
    horizon: usize,
    mut make_world: impl FnMut() -> Result<World<T>, WorldError>,
    energy: &EnergyModel,
) -> Result<TrainingLog, AgentError> {
    let delta = agent.cfg.delta;
    let mut log = TrainingLog::default();
    for episode in 0..episodes {
        let epsilon = agent.cfg.epsilon(episode);
        let mut world = make_world()?;
        let ops_start = world.store().stats().memory_ops;
        let bytes_start = world.ingest().bytes_processed();
        let (mut total, mut loss_sum, mut losses, mut actions) = (0.0, 0.0, 0usize, 0u64);

        world.advance()?;
        let mut s = world.state(delta)?;
        for step in 0..horizon {
            let t = world.tick();
            let a = agent.act(&s, epsilon)?;
            let x_t = world.live_view()?;
            let applied = world.apply(&a)?;
            let r = reward(&x_t, &applied.new_signal, &a, world.topology(), &agent.cfg)?;
            let terminal = step + 1 == horizon;
            if !terminal {
                world.advance()?;
            }
            // the store only changes on apply, so this is also the next decision's state
            let s_next = State::from_store(world.store(), t + 1, delta)?;
            actions += a.count_ones() as u64;
            total += r.as_f64();
            if let Some(l) = agent.observe(Experience { s, a, r, s_next: s_next.clone(), terminal })? {
                loss_sum += l.as_f64();
                losses += 1;
            }
            s = s_next;
        }

        let mem_ops = world.store().stats().memory_ops - ops_start;
        let bytes = world.ingest().bytes_processed() - bytes_start;
        log.rows.push(EpisodeRow {
            episode,
            lr: agent.cfg.lr,
            cumulative_reward: total,
            mean_loss: if losses > 0 { loss_sum / losses as f64 } else { 0.0 },
            actions_taken: actions,
            mem_ops,
            energy_mj: energy_proxy(mem_ops, bytes, energy),
        });
    }
    Ok(log)
}
