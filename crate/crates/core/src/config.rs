//! Flat `section.key` run configuration: defaults, TOML files, command-line
//! overrides and the resolved dump written next to every run's output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub use toml::Value;

use crate::agent::AgentConfig;
use crate::ingest::EtlMode;
use crate::metrics::EnergyModel;
use crate::world::WorldConfig;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("{key}: expected {expected}, got {got}")]
    Type { key: String, expected: &'static str, got: String },
    #[error("{key}: {reason}")]
    Invalid { key: String, reason: String },
    #[error("config file {0} not found")]
    MissingFile(PathBuf),
    #[error("cannot parse config: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub world: WorldConfig,
    pub horizon: usize,
    pub agent: AgentConfig,
    /// Learning rates swept by `train`; the first one is used elsewhere.
    pub lrs: Vec<f64>,
    pub energy: EnergyModel,
    pub hit_threshold: u64,
    pub warmup: u64,
    pub sync_samples: usize,
    pub accuracy_ns: Vec<usize>,
    pub accuracy_seeds: usize,
    pub query_records: usize,
    pub query_sizes: Vec<usize>,
    pub query_repeats: usize,
    pub train_episodes: usize,
    pub train_horizon: usize,
    pub resources_payloads: Vec<usize>,
    pub resources_horizon: usize,
    pub resources_train_episodes: usize,
    pub sync_budget_frac: f64,
    pub sync_train_episodes: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let agent = AgentConfig::default();
        Self {
            seed: 1,
            out_dir: PathBuf::from("out"),
            world: WorldConfig::default(),
            horizon: 1000,
            lrs: vec![agent.lr],
            agent,
            energy: EnergyModel::default(),
            hit_threshold: 6,
            warmup: 50,
            sync_samples: 3,
            accuracy_ns: vec![20, 40, 80, 100],
            accuracy_seeds: 3,
            query_records: 10_000,
            query_sizes: vec![100, 1000, 5000, 10_000],
            query_repeats: 10,
            train_episodes: 200,
            train_horizon: 100,
            resources_payloads: vec![200, 600, 1000, 1400, 1800],
            resources_horizon: 300,
            resources_train_episodes: 100,
            sync_budget_frac: 0.9,
            sync_train_episodes: 100,
        }
    }
}

fn type_err(key: &str, expected: &'static str, v: &Value) -> ConfigError {
    ConfigError::Type { key: key.to_string(), expected, got: v.to_string() }
}

fn to_f64(key: &str, v: &Value) -> Result<f64, ConfigError> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(type_err(key, "a number", v)),
    }
}

fn to_u64(key: &str, v: &Value) -> Result<u64, ConfigError> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        _ => Err(type_err(key, "a nonnegative integer", v)),
    }
}

fn to_usize(key: &str, v: &Value) -> Result<usize, ConfigError> {
    to_u64(key, v).map(|x| x as usize)
}

fn to_bool(key: &str, v: &Value) -> Result<bool, ConfigError> {
    v.as_bool().ok_or_else(|| type_err(key, "true or false", v))
}

fn to_string(key: &str, v: &Value) -> Result<String, ConfigError> {
    v.as_str().map(str::to_string).ok_or_else(|| type_err(key, "a string", v))
}

/// Accepts a single item, an array, or a comma-separated string.
fn to_list<X>(key: &str, v: &Value, item: fn(&str, &Value) -> Result<X, ConfigError>) -> Result<Vec<X>, ConfigError> {
    match v {
        Value::Array(xs) => xs.iter().map(|x| item(key, x)).collect(),
        Value::String(s) => s.split(',').map(|p| item(key, &parse_value(p.trim()))).collect(),
        other => Ok(vec![item(key, other)?]),
    }
}

fn to_f64_list(key: &str, v: &Value) -> Result<Vec<f64>, ConfigError> {
    to_list(key, v, to_f64)
}

fn to_usize_list(key: &str, v: &Value) -> Result<Vec<usize>, ConfigError> {
    to_list(key, v, to_usize)
}

fn from_f64(x: &f64) -> Value {
    Value::Float(*x)
}

fn from_u64(x: &u64) -> Value {
    Value::Integer(*x as i64)
}

fn from_usize(x: &usize) -> Value {
    Value::Integer(*x as i64)
}

fn from_usize_list(xs: &[usize]) -> Value {
    Value::Array(xs.iter().map(from_usize).collect())
}

/// Parses a command-line value as a TOML value, falling back to a bare string.
pub fn parse_value(raw: &str) -> Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, Value)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            other => out.push((key, other.clone())),
        }
    }
}

macro_rules! plain_keys {
    ($($key:literal => $($field:ident).+ : $to:ident / $from:ident),* $(,)?) => {
        const PLAIN_KEYS: &'static [&'static str] = &[$($key),*];

        fn set_plain(&mut self, key: &str, v: &Value) -> Result<bool, ConfigError> {
            match key {
                $($key => self.$($field).+ = $to(key, v)?,)*
                _ => return Ok(false),
            }
            Ok(true)
        }

        fn get_plain(&self, key: &str) -> Option<Value> {
            match key {
                $($key => Some($from(&self.$($field).+)),)*
                _ => None,
            }
        }
    };
}

impl RunConfig {
    plain_keys! {
        "sim.n_junctions" => world.n: to_usize / from_usize,
        "sim.insertion_rate" => world.traffic.insertion_rate: to_f64 / from_f64,
        "sim.horizon_ticks" => horizon: to_usize / from_usize,
        "sim.service_frac" => world.traffic.service_frac: to_f64 / from_f64,
        "sim.service_cap" => world.traffic.service_cap: to_f64 / from_f64,
        "sim.exit_frac" => world.traffic.exit_frac: to_f64 / from_f64,
        "sim.demand_skew" => world.traffic.demand_skew: to_f64 / from_f64,
        "sim.demand_amplitude" => world.traffic.demand_amplitude: to_f64 / from_f64,
        "sim.demand_period" => world.traffic.demand_period: to_f64 / from_f64,
        "sim.cycle_amplitude" => world.traffic.cycle_amplitude: to_f64 / from_f64,
        "sim.cycle_period" => world.traffic.cycle_period: to_u64 / from_u64,
        "sim.sample_interval" => world.traffic.sample_interval: to_u64 / from_u64,
        "sim.burn_in" => world.traffic.burn_in: to_u64 / from_u64,
        "sim.retention" => world.traffic.retention: to_usize / from_usize,
        "channel.latency_mean" => world.latency_mean: to_f64 / from_f64,
        "channel.latency_log_coef" => world.latency_log_coef: to_f64 / from_f64,
        "channel.latency_jitter" => world.latency_jitter: to_f64 / from_f64,
        "channel.loss_prob" => world.loss_prob: to_f64 / from_f64,
        "payload.bytes" => world.traffic.payload_bytes: to_u64 / from_u64,
        "ingest.queue_capacity" => world.queue_capacity: to_usize / from_usize,
        "agent.delta" => agent.delta: to_usize / from_usize,
        "agent.gamma" => agent.gamma: to_f64 / from_f64,
        "agent.epsilon_start" => agent.epsilon_start: to_f64 / from_f64,
        "agent.epsilon_end" => agent.epsilon_end: to_f64 / from_f64,
        "agent.epsilon_decay" => agent.epsilon_decay: to_f64 / from_f64,
        "agent.replay_capacity" => agent.replay_capacity: to_usize / from_usize,
        "agent.batch_size" => agent.batch_size: to_usize / from_usize,
        "agent.update_interval" => agent.update_interval: to_u64 / from_u64,
        "agent.hidden_sizes" => agent.hidden_sizes: to_usize_list / from_usize_list,
        "agent.reward_sign" => agent.reward_sign: to_f64 / from_f64,
        "agent.penalty_weight" => agent.penalty_weight: to_f64 / from_f64,
        "agent.input_scale" => agent.input_scale: to_f64 / from_f64,
        "agent.grad_clip" => agent.grad_clip: to_f64 / from_f64,
        "energy.c_op" => energy.c_op: to_f64 / from_f64,
        "energy.c_byte" => energy.c_byte: to_f64 / from_f64,
        "eval.hit_threshold" => hit_threshold: to_u64 / from_u64,
        "eval.warmup_ticks" => warmup: to_u64 / from_u64,
        "eval.sync_samples" => sync_samples: to_usize / from_usize,
        "accuracy.ns" => accuracy_ns: to_usize_list / from_usize_list,
        "accuracy.seeds" => accuracy_seeds: to_usize / from_usize,
        "query.records" => query_records: to_usize / from_usize,
        "query.sizes" => query_sizes: to_usize_list / from_usize_list,
        "query.repeats" => query_repeats: to_usize / from_usize,
        "train.episodes" => train_episodes: to_usize / from_usize,
        "train.horizon" => train_horizon: to_usize / from_usize,
        "resources.payloads" => resources_payloads: to_usize_list / from_usize_list,
        "resources.horizon" => resources_horizon: to_usize / from_usize,
        "resources.train_episodes" => resources_train_episodes: to_usize / from_usize,
        "sync.traditional_budget_frac" => sync_budget_frac: to_f64 / from_f64,
        "sync.train_episodes" => sync_train_episodes: to_usize / from_usize,
        "seed" => seed: to_u64 / from_u64,
    }

    const SPECIAL_KEYS: &'static [&'static str] = &["sim.topology", "agent.lr", "etl.literal_alg1", "out_dir"];

    /// Every accepted key, sorted.
    pub fn keys() -> Vec<&'static str> {
        let mut k: Vec<&str> = Self::PLAIN_KEYS.iter().chain(Self::SPECIAL_KEYS).copied().collect();
        k.sort_unstable();
        k
    }

    fn is_list_key(key: &str) -> bool {
        matches!(key, "agent.lr" | "agent.hidden_sizes" | "accuracy.ns" | "query.sizes" | "resources.payloads")
    }

    pub fn set(&mut self, key: &str, v: &Value) -> Result<(), ConfigError> {
        if self.set_plain(key, v)? {
            return Ok(());
        }
        match key {
            "sim.topology" => {
                let name = to_string(key, v)?;
                self.world.topology = name.parse().map_err(|_| ConfigError::Invalid {
                    key: key.into(),
                    reason: format!("unknown topology {name:?} (expected grid, ring or random-geometric)"),
                })?;
            }
            "agent.lr" => {
                self.lrs = to_f64_list(key, v)?;
                if let Some(&lr) = self.lrs.first() {
                    self.agent.lr = lr;
                }
            }
            "etl.literal_alg1" => {
                self.world.etl_mode = if to_bool(key, v)? { EtlMode::Literal } else { EtlMode::Migrate };
            }
            "out_dir" => self.out_dir = PathBuf::from(to_string(key, v)?),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<Value> {
        if let Some(v) = self.get_plain(key) {
            return Some(v);
        }
        Some(match key {
            "sim.topology" => Value::String(self.world.topology.to_string()),
            "agent.lr" => Value::Array(self.lrs.iter().map(from_f64).collect()),
            "etl.literal_alg1" => Value::Boolean(self.world.etl_mode == EtlMode::Literal),
            "out_dir" => Value::String(self.out_dir.display().to_string()),
            _ => return None,
        })
    }

    /// Applies `key = value` pairs in order. Repeated list keys accumulate;
    /// repeated scalar keys keep the last value.
    pub fn apply_pairs(&mut self, pairs: &[(String, Value)]) -> Result<(), ConfigError> {
        let mut grouped: BTreeMap<&str, Vec<&Value>> = BTreeMap::new();
        let mut order = Vec::new();
        for (k, v) in pairs {
            if !Self::keys().contains(&k.as_str()) {
                return Err(ConfigError::UnknownKey(k.clone()));
            }
            if !grouped.contains_key(k.as_str()) {
                order.push(k.as_str());
            }
            grouped.entry(k).or_default().push(v);
        }
        for k in order {
            let vals = &grouped[k];
            if Self::is_list_key(k) && vals.len() > 1 {
                let mut items = Vec::new();
                for v in vals {
                    match v {
                        Value::Array(xs) => items.extend(xs.iter().cloned()),
                        Value::String(s) => items.extend(s.split(',').map(|p| parse_value(p.trim()))),
                        other => items.push((*other).clone()),
                    }
                }
                self.set(k, &Value::Array(items))?;
            } else {
                self.set(k, vals.last().expect("nonempty group"))?;
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.merge_toml_str(text)?;
        Ok(cfg)
    }

    pub fn merge_toml_str(&mut self, text: &str) -> Result<(), ConfigError> {
        let table: toml::Table = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let mut pairs = Vec::new();
        flatten("", &table, &mut pairs);
        self.apply_pairs(&pairs)
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|_| ConfigError::MissingFile(path.to_path_buf()))?;
        self.merge_toml_str(&text)
    }

    /// Range and consistency checks across all sections.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key: &str, reason: String| Err(ConfigError::Invalid { key: key.into(), reason });
        if let Err(e) = self.world.traffic.validate() {
            return invalid("sim", e.to_string());
        }
        if let Err(e) = self.world.channel() {
            return invalid("channel", e.to_string());
        }
        if self.world.n < 2 {
            return invalid("sim.n_junctions", "need at least 2 junctions".into());
        }
        if self.world.queue_capacity == 0 {
            return invalid("ingest.queue_capacity", "must be >= 1".into());
        }
        if self.lrs.is_empty() {
            return invalid("agent.lr", "need at least one learning rate".into());
        }
        for &lr in &self.lrs {
            let agent = AgentConfig { lr, ..self.agent.clone() };
            if let Err(e) = agent.validate() {
                return invalid("agent", e.to_string());
            }
        }
        if EnergyModel::new(self.energy.c_op, self.energy.c_byte).is_none() {
            return invalid("energy", "coefficients must be finite and >= 0".into());
        }
        if !(0.0..=1.0).contains(&self.sync_budget_frac) || self.sync_budget_frac == 0.0 {
            return invalid("sync.traditional_budget_frac", "must be in (0, 1]".into());
        }
        if self.horizon == 0 || self.train_horizon == 0 || self.resources_horizon == 0 {
            return invalid("horizon", "horizons must be >= 1".into());
        }
        if self.horizon + self.world.channel().map_or(0, |c| c.max_delay() as usize) >= self.world.traffic.retention {
            return invalid("sim.retention", "must exceed the horizon plus the channel delay".into());
        }
        if self.query_repeats == 0 || self.accuracy_seeds == 0 {
            return invalid("query.repeats", "repeat and seed counts must be >= 1".into());
        }
        Ok(())
    }

    /// `key = value` lines for every key, readable back as a config file.
    pub fn resolved(&self) -> String {
        let mut out = String::new();
        for key in Self::keys() {
            let v = self.get(key).expect("every listed key has a value");
            let _ = writeln!(out, "{key} = {v}");
        }
        out
    }
}
