use std::collections::BTreeMap;

use rand::Rng;

use crate::graph::Tick;

use super::{Measurement, SimError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub latency_mean: f64,
    pub latency_jitter: f64,
    pub loss_prob: f64,
}

impl ChannelConfig {
    pub fn new(latency_mean: f64, latency_jitter: f64, loss_prob: f64) -> Result<Self, SimError> {
        let ch = Self { latency_mean, latency_jitter, loss_prob };
        ch.validate()?;
        Ok(ch)
    }

    /// Lossless channel with zero delay.
    pub fn ideal() -> Self {
        Self { latency_mean: 0.0, latency_jitter: 0.0, loss_prob: 0.0 }
    }

    /// Channel whose mean latency grows with `ln(n)` on top of `base_mean`.
    pub fn scaled(base_mean: f64, log_coef: f64, n: usize, jitter: f64, loss: f64) -> Result<Self, SimError> {
        Self::new(base_mean + log_coef * (n.max(1) as f64).ln(), jitter, loss)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.latency_mean >= 0.0 && self.latency_mean.is_finite()) {
            return Err(SimError::BadChannel(format!("latency_mean {}", self.latency_mean)));
        }
        if !(self.latency_jitter >= 0.0 && self.latency_jitter.is_finite()) {
            return Err(SimError::BadChannel(format!("latency_jitter {}", self.latency_jitter)));
        }
        if !(0.0..=1.0).contains(&self.loss_prob) {
            return Err(SimError::BadChannel(format!("loss_prob {}", self.loss_prob)));
        }
        Ok(())
    }

    /// Largest possible delivery delay in ticks.
    pub fn max_delay(&self) -> Tick {
        (self.latency_mean + self.latency_jitter).round().max(0.0) as Tick
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Delivery {
    pub measurement: Measurement,
    pub arrival_tick: Tick,
}

/// Sends one measurement through the channel: lost with probability
/// `loss_prob`, otherwise delayed by `max(0, round(mean + U[-jitter, jitter]))`.
pub fn deliver<R: Rng + ?Sized>(m: Measurement, ch: &ChannelConfig, rng: &mut R) -> Option<Delivery> {
    if ch.loss_prob > 0.0 && rng.random::<f64>() < ch.loss_prob {
        return None;
    }
    let jitter = if ch.latency_jitter > 0.0 { rng.random_range(-ch.latency_jitter..=ch.latency_jitter) } else { 0.0 };
    let delay = (ch.latency_mean + jitter).round().max(0.0) as Tick;
    let arrival_tick = m.gen_tick + delay;
    Some(Delivery { measurement: m, arrival_tick })
}

/// Deliveries in flight, released in arrival-tick order (ties in send order).
#[derive(Debug, Clone, Default)]
pub struct InFlight {
    pending: BTreeMap<(Tick, u64), Delivery>,
    seq: u64,
    sent: u64,
    lost: u64,
}

impl InFlight {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sends `m`; returns false if the channel dropped it.
    pub fn send<R: Rng + ?Sized>(&mut self, m: Measurement, ch: &ChannelConfig, rng: &mut R) -> bool {
        self.sent += 1;
        match deliver(m, ch, rng) {
            Some(d) => {
                self.pending.insert((d.arrival_tick, self.seq), d);
                self.seq += 1;
                true
            }
            None => {
                self.lost += 1;
                false
            }
        }
    }

    /// Removes and returns every delivery with `arrival_tick <= t`.
    pub fn arrivals(&mut self, t: Tick) -> Vec<Delivery> {
        let later = self.pending.split_off(&(t + 1, 0));
        std::mem::replace(&mut self.pending, later).into_values().collect()
    }

    pub fn in_flight(&self) -> usize {
        self.pending.len()
    }

    pub fn lost(&self) -> u64 {
        self.lost
    }

    pub fn sent(&self) -> u64 {
        self.sent
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(t: Tick) -> Measurement {
        Measurement { pt: 0, gen_tick: t, features: [1.0, 2.0, 3.0], payload_bytes: 100 }
    }

    #[test]
    fn full_loss_drops_everything() {
        let ch = ChannelConfig::new(2.0, 1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..100).all(|t| deliver(m(t), &ch, &mut rng).is_none()));
    }

    #[test]
    fn fixed_latency() {
        let ch = ChannelConfig::new(2.0, 0.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for t in 0..50 {
            assert_eq!(deliver(m(t), &ch, &mut rng).unwrap().arrival_tick, t + 2);
        }
    }

    #[test]
    fn seeded_replay_and_monotone_arrival() {
        let ch = ChannelConfig::new(1.0, 3.0, 0.2).unwrap();
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            (0..200).map(|t| deliver(m(t), &ch, &mut rng).map(|d| d.arrival_tick)).collect::<Vec<_>>()
        };
        let a = run();
        assert_eq!(a, run());
        for (t, arr) in a.iter().enumerate() {
            if let Some(arr) = arr {
                assert!(*arr >= t as Tick);
            }
        }
        assert!(a.iter().any(Option::is_none));
    }

    #[test]
    fn rejects_bad_config() {
        assert!(ChannelConfig::new(-1.0, 0.0, 0.0).is_err());
        assert!(ChannelConfig::new(1.0, 0.0, 1.5).is_err());
    }

    #[test]
    fn in_flight_releases_in_arrival_order() {
        let ch = ChannelConfig::new(3.0, 2.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut inflight = InFlight::new();
        for t in 0..20 {
            inflight.send(m(t), &ch, &mut rng);
        }
        let mut seen = 0;
        for t in 0..40 {
            let got = inflight.arrivals(t);
            assert!(got.iter().all(|d| d.arrival_tick <= t));
            assert!(got.windows(2).all(|w| w[0].arrival_tick <= w[1].arrival_tick));
            seen += got.len();
        }
        assert_eq!(seen, 20);
        assert_eq!(inflight.in_flight(), 0);
    }
}
