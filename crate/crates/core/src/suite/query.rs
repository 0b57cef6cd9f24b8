use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::graph::{
    timed_query, write_edges_csv, write_records_csv, GraphNativeStore, JoinTableStore, RecordId, TwinStore,
};
use crate::metrics::median;
use crate::sim::{generate_network, TrafficSim, FEATURES};

use super::{csv_writer, io_err, sub_seed, SuiteError};

#[derive(Debug, Clone, PartialEq)]
pub struct QueryBenchRow {
    pub backend: &'static str,
    pub query_size: usize,
    /// Median over the configured repeats.
    pub elapsed_us: f64,
}

pub const GRAPH_NATIVE: &str = "graph-native";
pub const JOIN_TABLE: &str = "join-table";

fn populate<S: TwinStore<f64>>(
    store: &mut S,
    sim: &TrafficSim,
    tick: u64,
    prev: &mut [Option<RecordId>],
    budget: &mut usize,
) -> Result<(), SuiteError> {
    let n = prev.len();
    let gt = sim.ground_truth(tick).map_err(crate::world::WorldError::from)?;
    let mut fresh = vec![None; n];
    for (i, slot) in fresh.iter_mut().enumerate() {
        if *budget == 0 {
            break;
        }
        let id = store.create_record(i, tick, gt.row(i))?;
        if let Some(p) = prev[i] {
            store.link_temporal(id, p)?;
        }
        *slot = Some(id);
        *budget -= 1;
    }
    for i in 0..n {
        let Some(from) = fresh[i] else { continue };
        let nbrs: Vec<usize> = store.topology().neighbors(i).iter().map(|&(j, _)| j).collect();
        for j in nbrs {
            if let Some(to) = fresh[j].or(prev[j]) {
                store.link_spatial(from, to)?;
            }
        }
    }
    for (p, f) in prev.iter_mut().zip(fresh) {
        if f.is_some() {
            *p = f;
        }
    }
    Ok(())
}

/// Both backends filled with the same `query.records` records: every
/// junction reports each tick, linked temporally and to its neighbors.
pub fn build_bench_stores(cfg: &RunConfig) -> Result<(GraphNativeStore<f64>, JoinTableStore<f64>), SuiteError> {
    let network = generate_network(cfg.world.n, cfg.world.topology, sub_seed(cfg.seed, 100))
        .map_err(crate::world::WorldError::from)?;
    let spatial = network.spatial.clone();
    let traffic = crate::sim::TrafficConfig { retention: 1, ..cfg.world.traffic.clone() };
    let mut sim = TrafficSim::new(network, traffic, sub_seed(cfg.seed, 101)).map_err(crate::world::WorldError::from)?;
    let mut native = GraphNativeStore::new(spatial.clone(), FEATURES.len());
    let mut table = JoinTableStore::new(spatial, FEATURES.len());
    let n = cfg.world.n;
    let (mut prev_a, mut prev_b) = (vec![None; n], vec![None; n]);
    let (mut left_a, mut left_b) = (cfg.query_records, cfg.query_records);
    while left_a > 0 {
        let t = sim.tick();
        populate(&mut native, &sim, t, &mut prev_a, &mut left_a)?;
        populate(&mut table, &sim, t, &mut prev_b, &mut left_b)?;
        sim.step();
    }
    Ok((native, table))
}

fn time_median<S: TwinStore<f64>>(
    store: &S,
    q: usize,
    repeats: usize,
) -> Result<(f64, crate::graph::QueryResult<f64>), SuiteError> {
    // one untimed pass so both backends start warm
    let first = timed_query(store, q)?;
    let mut samples = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        samples.push(timed_query(store, q)?.elapsed.as_secs_f64() * 1e6);
    }
    Ok((median(&samples), first.result))
}

/// Median latency of the neighborhood query per backend and size. Fails if
/// the two backends return different result sets.
pub fn run_query_bench(cfg: &RunConfig) -> Result<Vec<QueryBenchRow>, SuiteError> {
    let (native, table) = build_bench_stores(cfg)?;
    bench(&native, &table, cfg)
}

fn bench(
    native: &GraphNativeStore<f64>,
    table: &JoinTableStore<f64>,
    cfg: &RunConfig,
) -> Result<Vec<QueryBenchRow>, SuiteError> {
    let mut rows = Vec::new();
    for &q in &cfg.query_sizes {
        let (a, ra) = time_median(native, q, cfg.query_repeats)?;
        let (b, rb) = time_median(table, q, cfg.query_repeats)?;
        if ra != rb {
            return Err(SuiteError::BackendMismatch(q));
        }
        rows.push(QueryBenchRow { backend: GRAPH_NATIVE, query_size: q, elapsed_us: a });
        rows.push(QueryBenchRow { backend: JOIN_TABLE, query_size: q, elapsed_us: b });
    }
    Ok(rows)
}

pub(super) fn write(cfg: &RunConfig, dir: &Path, files: &mut Vec<PathBuf>) -> Result<String, SuiteError> {
    let (native, table) = build_bench_stores(cfg)?;
    let rows = bench(&native, &table, cfg)?;
    let path = dir.join("query_bench.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["backend", "query_size", "elapsed_us"])?;
    for r in &rows {
        w.write_record([r.backend.to_string(), r.query_size.to_string(), format!("{:.3}", r.elapsed_us)])?;
    }
    w.flush().map_err(io_err(&path))?;
    files.push(path);

    for (name, f) in [("records.csv", true), ("edges.csv", false)] {
        let path = dir.join(name);
        let file = std::fs::File::create(&path).map_err(io_err(&path))?;
        if f {
            write_records_csv(&native, file)?;
        } else {
            write_edges_csv(&native, file)?;
        }
        files.push(path);
    }

    let mut s = format!("median neighborhood-query latency over {} repeats (us)\n", cfg.query_repeats);
    let _ = writeln!(s, "{:>8} {:>14} {:>14} {:>8}", "size", GRAPH_NATIVE, JOIN_TABLE, "ratio");
    for pair in rows.chunks(2) {
        let _ = writeln!(
            s,
            "{:>8} {:>14.1} {:>14.1} {:>8.3}",
            pair[0].query_size,
            pair[0].elapsed_us,
            pair[1].elapsed_us,
            pair[0].elapsed_us / pair[1].elapsed_us
        );
    }
    Ok(s)
}
