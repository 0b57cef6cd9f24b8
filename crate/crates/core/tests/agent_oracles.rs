use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twinforge::agent::{
    composite_q, penalty, reward, select_action, sync_target, td_loss_and_gradients, Agent, AgentConfig, Experience,
    QNetwork, ReplayMemory, State,
};
use twinforge::graph::GraphSignal;
use twinforge::ingest::UpdateAction;
use twinforge::sim::{generate_network, Topology};

fn random_signal(rng: &mut ChaCha8Rng, tick: u64, n: usize, f: usize) -> GraphSignal<f64> {
    GraphSignal::new(tick, n, f, (0..n * f).map(|_| rng.random_range(0.0..50.0)).collect()).unwrap()
}

fn random_action(rng: &mut ChaCha8Rng, n: usize) -> UpdateAction {
    UpdateAction::new((0..n).map(|_| rng.random_bool(0.5)).collect())
}

#[test]
fn binary_step_is_the_brute_force_argmax() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let n = rng.random_range(1..=12);
        let q: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = select_action(&q, 0.0, &mut rng);
        let value = composite_q(&q, a.as_indicator::<f64>());

        let mut best = f64::NEG_INFINITY;
        let mut best_mask = 0u32;
        for mask in 0u32..(1 << n) {
            let v: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| q[i]).sum();
            if v > best {
                best = v;
                best_mask = mask;
            }
        }
        assert!((value - best).abs() < 1e-12, "q {q:?}");
        let bits: Vec<bool> = (0..n).map(|i| best_mask >> i & 1 == 1).collect();
        assert_eq!(a.bits(), &bits[..]);
    }
}

#[test]
fn zero_q_values_choose_no_update() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let a = select_action(&[0.0, 1.0, -0.0, -1.0], 0.0, &mut rng);
    assert_eq!(a.bits(), &[false, true, false, false]);
}

#[test]
fn penalty_matches_a_hand_count_over_edges() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..50 {
        let n = rng.random_range(2..30);
        let topo = [Topology::Ring, Topology::RandomGeometric][case % 2];
        let g = generate_network(n, topo, case as u64).unwrap().spatial;
        let a = random_action(&mut rng, n);
        let mut expected = 0.0;
        for i in 0..n {
            if a.get(i) {
                expected += 3.0;
                expected += g.edges().iter().filter(|e| e.src == i).count() as f64;
            }
        }
        assert_eq!(penalty(&a, &g), expected, "case {case}");
    }
}

#[test]
fn reward_matches_a_scalar_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.random_range(2..15);
        let g = generate_network(n, Topology::Ring, 0).unwrap().spatial;
        let (x, y) = (random_signal(&mut rng, 0, n, 3), random_signal(&mut rng, 1, n, 3));
        let a = random_action(&mut rng, n);
        let cfg = AgentConfig {
            reward_sign: if rng.random_bool(0.5) { 1.0 } else { -1.0 },
            penalty_weight: rng.random_range(0.0..2.0),
            ..AgentConfig::default()
        };

        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..3 {
                let d = y.get(i, j) - x.get(i, j);
                sum += (d * d).sqrt();
            }
        }
        let mut ops = 0.0;
        for i in 0..n {
            if a.get(i) {
                ops += 3.0 + 1.0;
            }
        }
        let expected = cfg.reward_sign * sum / (n + 3) as f64 - cfg.penalty_weight * ops;
        let got: f64 = reward(&x, &y, &a, &g, &cfg).unwrap();
        assert!((got - expected).abs() <= 1e-9 * expected.abs().max(1.0), "{got} vs {expected}");
    }
}

fn batch(rng: &mut ChaCha8Rng, n: usize, delta: usize, m: usize) -> Vec<Experience<f64>> {
    (0..m)
        .map(|k| {
            let snaps: Vec<_> = (0..delta + 1).map(|t| random_signal(rng, t as u64, n, 3)).collect();
            Experience {
                s: State::from_snapshots(&snaps[..delta], delta).unwrap(),
                a: random_action(rng, n),
                r: rng.random_range(-20.0..20.0),
                s_next: State::from_snapshots(&snaps[1..], delta).unwrap(),
                terminal: k % 3 == 2,
            }
        })
        .collect()
}

#[test]
fn analytic_gradients_match_central_differences() {
    let (n, delta) = (4, 2);
    let cfg = AgentConfig { delta, input_scale: 0.02, gamma: 0.5, ..AgentConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let exps = batch(&mut rng, n, delta, 5);
    let refs: Vec<&Experience<f64>> = exps.iter().collect();
    let mut net = QNetwork::<f64>::new(n * 3 * delta, &[7, 5], n, 9);
    let target = QNetwork::<f64>::new(n * 3 * delta, &[7, 5], n, 10);

    let (_, grads) = td_loss_and_gradients(&refs, &net, &target, &cfg).unwrap();
    let analytic = grads.flatten();
    let params = net.params();
    assert_eq!(analytic.len(), params.len());

    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for k in 0..params.len() {
        let mut p = params.clone();
        p[k] += h;
        net.set_params(&p).unwrap();
        let up = td_loss_and_gradients(&refs, &net, &target, &cfg).unwrap().0;
        p[k] -= 2.0 * h;
        net.set_params(&p).unwrap();
        let down = td_loss_and_gradients(&refs, &net, &target, &cfg).unwrap().0;
        let numeric = (up - down) / (2.0 * h);
        let scale = analytic[k].abs().max(numeric.abs()).max(1e-3);
        worst = worst.max((analytic[k] - numeric).abs() / scale);
    }
    assert!(worst < 1e-4, "max relative error {worst}");
}

#[test]
fn target_sync_is_a_deep_copy() {
    let mut net = QNetwork::<f64>::new(6, &[4], 2, 1);
    let mut target = QNetwork::<f64>::new(6, &[4], 2, 2);
    let x = [0.3, -0.2, 0.5, 1.0, 0.0, 0.7];
    assert_ne!(net.forward(&x).unwrap(), target.forward(&x).unwrap());
    sync_target(&net, &mut target).unwrap();
    assert_eq!(net.forward(&x).unwrap(), target.forward(&x).unwrap());
    let frozen = target.forward(&x).unwrap();
    let p: Vec<f64> = net.params().iter().map(|v| v + 0.1).collect();
    net.set_params(&p).unwrap();
    assert_eq!(target.forward(&x).unwrap(), frozen);
}

#[test]
fn replay_evicts_oldest_and_samples_reproducibly() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let exps = batch(&mut rng, 2, 1, 4);
    let mut mem = ReplayMemory::new(3);
    for e in &exps {
        mem.remember(e.clone());
    }
    assert_eq!(mem.len(), 3);
    assert_eq!(mem.get(0), Some(&exps[1]));
    assert_eq!(mem.get(2), Some(&exps[3]));
    assert!(mem.sample_indices(4, &mut rng).is_err());
    assert!(mem.sample_indices(0, &mut rng).is_err());

    let draw = |seed| mem.sample_indices(2, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    assert_eq!(draw(7), draw(7));
    let mut idx = draw(8);
    idx.sort_unstable();
    idx.dedup();
    assert_eq!(idx.len(), 2);
    assert!(idx.iter().all(|&i| i < 3));
}

#[test]
fn observe_syncs_target_on_the_update_interval() {
    let cfg =
        AgentConfig { batch_size: 2, update_interval: 3, hidden_sizes: vec![5], delta: 1, ..AgentConfig::default() };
    let mut agent = Agent::<f64>::new(2, 3, cfg, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let exps = batch(&mut rng, 2, 1, 6);
    let x = exps[0].s.encode(1.0);
    for (k, e) in exps.into_iter().enumerate() {
        agent.observe(e).unwrap();
        let synced = agent.net().forward(&x).unwrap() == agent.target().forward(&x).unwrap();
        let step = k as u64 + 1;
        // the first optimization happens at step 2, so the nets differ from then on until a sync
        if step.is_multiple_of(3) {
            assert!(synced, "step {step}");
        } else if step >= 2 {
            assert!(!synced, "step {step}");
        }
    }
}
