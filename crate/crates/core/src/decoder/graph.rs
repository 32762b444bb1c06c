use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use serde::Serialize;

use crate::error::{Result, StarError};

/// Edge of a matching graph. `b == None` connects `a` to the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GraphEdge {
    pub a: usize,
    pub b: Option<usize>,
    /// Probability that an odd number of the faults on this edge occur.
    pub probability: f64,
    pub weight: f64,
    /// Whether the edge flips the logical observable of this graph.
    pub logical: bool,
}

/// Shortest-path data between one node and every other node and the boundary.
#[derive(Clone, Debug)]
struct PathRow {
    dist: Vec<f64>,
    parity: Vec<bool>,
    boundary_dist: f64,
    boundary_parity: bool,
}

/// One decoding graph: detectors of one basis plus a single boundary node.
#[derive(Clone, Debug)]
pub struct MatchingGraph {
    num_nodes: usize,
    edges: Vec<GraphEdge>,
    rows: Vec<PathRow>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct HeapItem {
    dist: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Per-edge accumulator used while merging fault mechanisms.
#[derive(Clone, Copy, Debug)]
pub(crate) struct EdgeAcc {
    pub probability: f64,
    pub logical: bool,
}

impl MatchingGraph {
    /// Builds the graph from merged edges. Keys are `(a, b)` with `b == num_nodes` for the
    /// boundary and `a < b`.
    pub(crate) fn from_merged(
        num_nodes: usize,
        merged: BTreeMap<(usize, usize), EdgeAcc>,
    ) -> Result<Self> {
        let mut edges = Vec::with_capacity(merged.len());
        for ((a, b), acc) in merged {
            let q = acc.probability;
            if q.is_nan() || q <= 0.0 {
                return Err(StarError::ScheduleInvalid(format!(
                    "edge ({a}, {b}) has non-positive probability {q}"
                )));
            }
            edges.push(GraphEdge {
                a,
                b: (b < num_nodes).then_some(b),
                probability: q,
                // Edges at or above one half carry no information; clamp to zero weight.
                weight: ((1.0 - q) / q).ln().max(0.0),
                logical: acc.logical,
            });
        }
        let mut g = Self {
            num_nodes,
            edges,
            rows: Vec::new(),
        };
        let adj = g.adjacency();
        g.rows = (0..num_nodes).map(|s| g.dijkstra(&adj, s)).collect();
        Ok(g)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    fn adjacency(&self) -> Vec<Vec<(usize, f64, bool)>> {
        let bnd = self.num_nodes;
        let mut adj = vec![Vec::new(); self.num_nodes + 1];
        for e in &self.edges {
            let b = e.b.unwrap_or(bnd);
            adj[e.a].push((b, e.weight, e.logical));
            adj[b].push((e.a, e.weight, e.logical));
        }
        adj
    }

    /// Single-source shortest paths. The boundary is reached but never expanded, so paths
    /// between detectors do not pass through it; ties resolve by node index.
    fn dijkstra(&self, adj: &[Vec<(usize, f64, bool)>], source: usize) -> PathRow {
        let bnd = self.num_nodes;
        let mut dist = vec![f64::INFINITY; bnd + 1];
        let mut parity = vec![false; bnd + 1];
        let mut done = vec![false; bnd + 1];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(HeapItem {
            dist: 0.0,
            node: source,
        });
        while let Some(HeapItem { dist: d, node }) = heap.pop() {
            if done[node] {
                continue;
            }
            done[node] = true;
            if node == bnd {
                continue;
            }
            for &(nb, w, logical) in &adj[node] {
                let nd = d + w;
                if !done[nb] && nd < dist[nb] {
                    dist[nb] = nd;
                    parity[nb] = parity[node] ^ logical;
                    heap.push(HeapItem { dist: nd, node: nb });
                }
            }
        }
        PathRow {
            boundary_dist: dist[bnd],
            boundary_parity: parity[bnd],
            dist: dist[..bnd].to_vec(),
            parity: parity[..bnd].to_vec(),
        }
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.rows[a].dist[b]
    }

    pub fn path_parity(&self, a: usize, b: usize) -> bool {
        self.rows[a].parity[b]
    }

    pub fn boundary_distance(&self, a: usize) -> f64 {
        self.rows[a].boundary_dist
    }

    pub fn boundary_parity(&self, a: usize) -> bool {
        self.rows[a].boundary_parity
    }
}
