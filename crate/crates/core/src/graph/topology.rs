use super::{GraphError, PtId};

/// One directed road segment between junctions, weighted by length in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologyEdge {
    pub src: PtId,
    pub dst: PtId,
    pub weight: f64,
}

/// Static weighted directed junction graph.
///
/// Node ids are dense in `0..n`, weights are strictly positive and there are
/// no self-loops. Parallel edges are merged at construction (first weight wins).
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGraph {
    n: usize,
    edges: Vec<TopologyEdge>,
    out_adj: Vec<Vec<(PtId, f64)>>,
}

impl SpatialGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (PtId, PtId, f64)>) -> Result<Self, GraphError> {
        let mut out_adj: Vec<Vec<(PtId, f64)>> = vec![Vec::new(); n];
        let mut kept = Vec::new();
        for (src, dst, weight) in edges {
            if src >= n || dst >= n {
                return Err(GraphError::BadTopology(format!("edge {src}->{dst} outside 0..{n}")));
            }
            if src == dst {
                return Err(GraphError::BadTopology(format!("self-edge at {src}")));
            }
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(GraphError::BadTopology(format!("edge {src}->{dst} has weight {weight}")));
            }
            if out_adj[src].iter().any(|&(d, _)| d == dst) {
                continue;
            }
            out_adj[src].push((dst, weight));
            kept.push(TopologyEdge { src, dst, weight });
        }
        for adj in &mut out_adj {
            adj.sort_by_key(|&(d, _)| d);
        }
        kept.sort_by_key(|e| (e.src, e.dst));
        Ok(Self { n, edges: kept, out_adj })
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[TopologyEdge] {
        &self.edges
    }

    /// Out-neighbors of `i` with their weights, sorted by neighbor id.
    pub fn neighbors(&self, i: PtId) -> &[(PtId, f64)] {
        &self.out_adj[i]
    }

    pub fn out_degree(&self, i: PtId) -> usize {
        self.out_adj[i].len()
    }

    /// `w(i, j)` if the directed edge exists.
    pub fn weight(&self, i: PtId, j: PtId) -> Option<f64> {
        self.out_adj.get(i)?.binary_search_by_key(&j, |&(d, _)| d).ok().map(|k| self.out_adj[i][k].1)
    }

    pub fn has_edge(&self, i: PtId, j: PtId) -> bool {
        self.weight(i, j).is_some()
    }

    /// True if every node reaches every other node.
    pub fn is_strongly_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let reach = |adj: &Vec<Vec<PtId>>| {
            let mut seen = vec![false; self.n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        let fwd: Vec<Vec<PtId>> = self.out_adj.iter().map(|a| a.iter().map(|&(d, _)| d).collect()).collect();
        let mut rev = vec![Vec::new(); self.n];
        for e in &self.edges {
            rev[e.dst].push(e.src);
        }
        reach(&fwd) && reach(&rev)
    }
}
