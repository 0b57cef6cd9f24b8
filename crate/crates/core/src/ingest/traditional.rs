use std::collections::VecDeque;

use crate::graph::{GraphSignal, Tick};
use crate::sim::Delivery;
use crate::Scalar;

use super::etl::{ApplyEvent, ApplyOutcome};
use super::IngestError;

/// Update-on-arrival baseline: one mutable row per pt, overwritten by whatever
/// arrives last. No generation ticks are kept, so rows may describe
/// different physical instants.
///
/// At most `budget` arrivals are applied per tick; the rest wait in a FIFO
/// backlog that is drained first on the next tick.
#[derive(Debug, Clone)]
pub struct TraditionalTwin<T> {
    values: GraphSignal<T>,
    budget: Option<usize>,
    used: usize,
    backlog: VecDeque<Delivery>,
    applied: u64,
    events: Option<Vec<ApplyEvent>>,
}

impl<T: Scalar> TraditionalTwin<T> {
    /// `budget = None` applies every arrival immediately.
    pub fn new(initial: GraphSignal<T>, budget: Option<usize>) -> Self {
        Self { values: initial, budget, used: 0, backlog: VecDeque::new(), applied: 0, events: None }
    }

    pub fn with_event_log(mut self) -> Self {
        self.events = Some(Vec::new());
        self
    }

    pub fn events(&self) -> &[ApplyEvent] {
        self.events.as_deref().unwrap_or(&[])
    }

    pub fn backlog(&self) -> usize {
        self.backlog.len()
    }

    pub fn applied(&self) -> u64 {
        self.applied
    }

    fn has_budget(&self) -> bool {
        self.budget.is_none_or(|b| self.used < b)
    }

    fn write(&mut self, d: &Delivery) {
        let row: Vec<T> = d.measurement.features.iter().map(|&v| T::of(v)).collect();
        self.values.set_row(d.measurement.pt, &row);
        self.used += 1;
        self.applied += 1;
        let tick = self.values.tick();
        if let Some(ev) = &mut self.events {
            ev.push(ApplyEvent {
                pt: d.measurement.pt,
                gen_tick: d.measurement.gen_tick,
                tick,
                outcome: ApplyOutcome::Updated,
            });
        }
    }

    /// Opens tick `t`: resets the budget and drains the backlog into it.
    pub fn begin_tick(&mut self, t: Tick) {
        self.values = std::mem::replace(&mut self.values, GraphSignal::zeros(0, 0, 0)).with_tick(t);
        self.used = 0;
        while self.has_budget() {
            let Some(d) = self.backlog.pop_front() else { break };
            self.write(&d);
        }
    }

    /// Overwrites the pt's row now if budget remains, otherwise backlogs it.
    pub fn apply_traditional(&mut self, d: Delivery) -> Result<(), IngestError> {
        let pt = d.measurement.pt;
        if pt >= self.values.n_nodes() {
            return Err(IngestError::UnknownPt(pt));
        }
        if self.backlog.is_empty() && self.has_budget() {
            self.write(&d);
        } else {
            self.backlog.push_back(d);
        }
        Ok(())
    }

    /// The current value table, stamped with the current tick.
    pub fn snapshot(&self) -> &GraphSignal<T> {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Measurement;

    fn d(pt: usize, gen: u64, v: f64) -> Delivery {
        Delivery {
            measurement: Measurement { pt, gen_tick: gen, features: [v, v, v], payload_bytes: 10 },
            arrival_tick: 6,
        }
    }

    #[test]
    fn last_arrival_wins() {
        let mut tw = TraditionalTwin::new(GraphSignal::<f64>::zeros(0, 2, 3), None);
        tw.begin_tick(6);
        tw.apply_traditional(d(0, 5, 5.0)).unwrap();
        tw.apply_traditional(d(0, 4, 4.0)).unwrap();
        assert_eq!(tw.snapshot().row(0), &[4.0, 4.0, 4.0]);
        assert_eq!(tw.snapshot().tick(), 6);
    }

    #[test]
    fn budget_backlogs_the_rest() {
        let mut tw = TraditionalTwin::new(GraphSignal::<f64>::zeros(0, 20, 3), Some(10));
        tw.begin_tick(1);
        for i in 0..20 {
            tw.apply_traditional(d(i, 1, 1.0)).unwrap();
        }
        assert_eq!(tw.applied(), 10);
        assert_eq!(tw.backlog(), 10);
        tw.begin_tick(2);
        assert_eq!(tw.applied(), 20);
        assert_eq!(tw.backlog(), 0);
    }

    #[test]
    fn unknown_pt() {
        let mut tw = TraditionalTwin::new(GraphSignal::<f64>::zeros(0, 2, 3), None);
        assert_eq!(tw.apply_traditional(d(7, 1, 1.0)), Err(IngestError::UnknownPt(7)));
    }
}
