use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twinforge::agent::penalty;
use twinforge::graph::{GraphNativeStore, GraphSignal, JoinTableStore, SpatialGraph, TwinStore};
use twinforge::ingest::{ApplyOutcome, EtlMode, IngestEngine, TraditionalTwin, UpdateAction};
use twinforge::sim::{generate_network, Delivery, Measurement, Topology};

fn delivery(pt: usize, gen_tick: u64, v: f64) -> Delivery {
    Delivery {
        measurement: Measurement { pt, gen_tick, features: [v, 1.0, 2.0], payload_bytes: 100 },
        arrival_tick: gen_tick + 1,
    }
}

fn ring3() -> SpatialGraph {
    SpatialGraph::new(3, [(0, 1, 50.0), (1, 2, 50.0), (2, 0, 50.0)]).unwrap()
}

fn engine(g: SpatialGraph, mode: EtlMode) -> IngestEngine<f64, GraphNativeStore<f64>> {
    let n = g.n_nodes();
    let mut e = IngestEngine::new(GraphNativeStore::new(g, 3), 16, mode).with_event_log();
    e.bootstrap(&GraphSignal::zeros(0, n, 3)).unwrap();
    e
}

#[test]
fn ring_of_three_all_updated_costs_nine_ops() {
    let mut e = engine(ring3(), EtlMode::Migrate);
    let before = e.store().stats();
    for pt in 0..3 {
        e.enqueue(delivery(pt, 1, 5.0)).unwrap();
    }
    let r = e.apply_action(&UpdateAction::ones(3), 1).unwrap();
    let after = e.store().stats();
    assert_eq!(r.memory_ops_delta, 9);
    assert_eq!(after.record_count - before.record_count, 3);
    assert_eq!(after.temporal_edge_count - before.temporal_edge_count, 3);
    assert_eq!(after.spatial_edge_count - before.spatial_edge_count, 3);
    assert_eq!(r.bytes_processed, 300);
}

#[test]
fn zero_bits_drop_heads_without_touching_the_store() {
    let mut e = engine(ring3(), EtlMode::Migrate);
    for pt in 0..3 {
        e.enqueue(delivery(pt, 1, 5.0)).unwrap();
    }
    let r = e.apply_action(&UpdateAction::zeros(3), 1).unwrap();
    assert_eq!(r.memory_ops_delta, 0);
    assert_eq!(r.dropped_pts, vec![0, 1, 2]);
    assert_eq!(e.pending(), 0);
    assert!(e.events().iter().all(|ev| ev.outcome == ApplyOutcome::Dropped));
}

#[test]
fn penalty_minus_retrievals_equals_memory_ops() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..50 {
        let n = rng.random_range(4..25);
        let g = generate_network(n, Topology::RandomGeometric, case).unwrap().spatial;
        let mut e = engine(g.clone(), EtlMode::Migrate);
        for pt in 0..n {
            e.enqueue(delivery(pt, 1, rng.random_range(0.0..9.0))).unwrap();
        }
        let a = UpdateAction::new((0..n).map(|_| rng.random_bool(0.5)).collect());
        let r = e.apply_action(&a, 1).unwrap();
        let expected = penalty(&a, &g) - a.count_ones() as f64;
        assert_eq!(r.memory_ops_delta as f64, expected, "case {case}");
    }
}

#[test]
fn literal_mode_pays_a_create_delete_pair_per_coupdated_neighbor() {
    let mut e = engine(ring3(), EtlMode::Literal);
    let before = e.store().stats();
    for pt in 0..3 {
        e.enqueue(delivery(pt, 1, 5.0)).unwrap();
    }
    let r = e.apply_action(&UpdateAction::ones(3), 1).unwrap();
    // 3 creates + 3 temporal + 3 (link, unlink) pairs
    assert_eq!(r.memory_ops_delta, 12);
    assert_eq!(e.store().stats().spatial_edge_count, before.spatial_edge_count);
}

#[test]
fn late_measurement_is_spliced_into_the_chain() {
    let mut e = engine(ring3(), EtlMode::Migrate);
    e.enqueue(delivery(0, 5, 5.0)).unwrap();
    e.apply_action(&UpdateAction::ones(3), 5).unwrap();
    e.enqueue(delivery(0, 3, 3.0)).unwrap();
    let r = e.apply_action(&UpdateAction::ones(3), 6).unwrap();
    assert_eq!(r.backfilled_pts, vec![0]);
    let s = e.store();
    assert_eq!(s.snapshot(4).unwrap().get(0, 0), 3.0);
    assert_eq!(s.snapshot(6).unwrap().get(0, 0), 5.0);
    assert_eq!(r.new_signal.get(0, 0), 5.0);
}

#[test]
fn engine_behaves_the_same_on_both_backends() {
    let g = generate_network(9, Topology::Grid, 1).unwrap().spatial;
    let mut a = IngestEngine::new(GraphNativeStore::<f64>::new(g.clone(), 3), 4, EtlMode::Migrate);
    let mut b = IngestEngine::new(JoinTableStore::<f64>::new(g, 3), 4, EtlMode::Migrate);
    a.bootstrap(&GraphSignal::zeros(0, 9, 3)).unwrap();
    b.bootstrap(&GraphSignal::zeros(0, 9, 3)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for t in 1..40u64 {
        for pt in 0..9 {
            if rng.random_bool(0.8) {
                let gen = t.saturating_sub(rng.random_range(0..3)).max(1);
                let d = delivery(pt, gen, rng.random_range(0.0..9.0));
                a.enqueue(d.clone()).unwrap();
                b.enqueue(d).unwrap();
            }
        }
        let act = UpdateAction::new((0..9).map(|_| rng.random_bool(0.6)).collect());
        assert_eq!(a.apply_action(&act, t).unwrap(), b.apply_action(&act, t).unwrap());
    }
    assert_eq!(a.stats(), b.stats());
    assert_eq!(a.store().records(), b.store().records());
}

#[test]
fn traditional_budget_backlogs_the_excess_in_arrival_order() {
    let mut tr = TraditionalTwin::new(GraphSignal::<f64>::zeros(0, 3, 3), Some(1)).with_event_log();
    tr.begin_tick(1);
    tr.apply_traditional(delivery(0, 1, 1.0)).unwrap();
    tr.apply_traditional(delivery(1, 1, 2.0)).unwrap();
    tr.apply_traditional(delivery(2, 1, 3.0)).unwrap();
    assert_eq!(tr.backlog(), 2);
    assert_eq!(tr.snapshot().get(1, 0), 0.0);
    tr.begin_tick(2);
    assert_eq!(tr.snapshot().get(1, 0), 2.0);
    assert_eq!(tr.snapshot().get(2, 0), 0.0);
    tr.begin_tick(3);
    assert_eq!(tr.snapshot().get(2, 0), 3.0);
    let ticks: Vec<u64> = tr.events().iter().map(|e| e.tick).collect();
    assert_eq!(ticks, vec![1, 2, 3]);
}
