use std::collections::VecDeque;

use crate::graph::PtId;
use crate::sim::Delivery;

/// Bytes charged per queued message on top of its payload.
pub const QUEUED_OVERHEAD: u64 = 16;

/// FIFO of delivered measurements for one pt, in arrival order.
///
/// Bounded: when full, pushing evicts the oldest entry and bumps `drops`.
#[derive(Debug, Clone)]
pub struct PtQueue {
    pt: PtId,
    fifo: VecDeque<Delivery>,
    capacity: usize,
    queued_bytes: u64,
    drops: u64,
}

impl PtQueue {
    pub fn new(pt: PtId, capacity: usize) -> Self {
        Self { pt, fifo: VecDeque::new(), capacity: capacity.max(1), queued_bytes: 0, drops: 0 }
    }

    fn cost(d: &Delivery) -> u64 {
        QUEUED_OVERHEAD + d.measurement.payload_bytes
    }

    pub fn push(&mut self, d: Delivery) {
        if self.fifo.len() == self.capacity {
            if let Some(old) = self.fifo.pop_front() {
                self.queued_bytes -= Self::cost(&old);
                self.drops += 1;
            }
        }
        self.queued_bytes += Self::cost(&d);
        self.fifo.push_back(d);
    }

    pub fn pop(&mut self) -> Option<Delivery> {
        let d = self.fifo.pop_front()?;
        self.queued_bytes -= Self::cost(&d);
        Some(d)
    }

    pub fn pt(&self) -> PtId {
        self.pt
    }

    pub fn len(&self) -> usize {
        self.fifo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fifo.is_empty()
    }

    pub fn queued_bytes(&self) -> u64 {
        self.queued_bytes
    }

    /// Entries evicted by overflow.
    pub fn drops(&self) -> u64 {
        self.drops
    }

    pub fn iter(&self) -> impl Iterator<Item = &Delivery> {
        self.fifo.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Measurement;

    fn d(gen: u64, arrival: u64) -> Delivery {
        Delivery {
            measurement: Measurement { pt: 0, gen_tick: gen, features: [0.0; 3], payload_bytes: 100 },
            arrival_tick: arrival,
        }
    }

    #[test]
    fn overflow_evicts_oldest() {
        let mut q = PtQueue::new(0, 2);
        q.push(d(1, 1));
        q.push(d(2, 2));
        q.push(d(3, 3));
        assert_eq!(q.len(), 2);
        assert_eq!(q.drops(), 1);
        assert_eq!(q.queued_bytes(), 2 * 116);
        assert_eq!(q.pop().unwrap().measurement.gen_tick, 2);
        assert_eq!(q.queued_bytes(), 116);
    }

    #[test]
    fn keeps_arrival_order() {
        let mut q = PtQueue::new(0, 8);
        q.push(d(9, 5));
        q.push(d(8, 4));
        let order: Vec<u64> = q.iter().map(|d| d.arrival_tick).collect();
        assert_eq!(order, vec![5, 4]);
    }
}
