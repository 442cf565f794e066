//! Classical polynomial-time baselines: minimum spanning tree, shortest
//! path, and maximum flow — the unrestricted problems whose gadget-restricted
//! variants the rest of the crate compiles into.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use thiserror::Error;

use crate::graph::{CapNetwork, EdgeId, FlowCertificate, UGraph, VertexId};

/// Minimum spanning tree and its weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mst {
    pub edges: BTreeSet<EdgeId>,
    pub total_weight: u64,
}

/// The graph has no spanning tree at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("graph is disconnected")]
pub struct GraphDisconnected;

/// Prim's algorithm with a binary heap; ties broken by edge id, so the
/// result is deterministic.
pub fn prim_mst(g: &UGraph) -> Result<Mst, GraphDisconnected> {
    let n = g.num_vertices() as usize;
    let adj = g.adjacency();
    let mut in_tree = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(u64, EdgeId, VertexId)>> = BinaryHeap::new();
    let mut edges = BTreeSet::new();
    let mut total: u64 = 0;

    in_tree[0] = true;
    for &(next, id) in &adj[0] {
        heap.push(Reverse((g.edge(id).unwrap().w, id, next)));
    }
    while let Some(Reverse((w, id, v))) = heap.pop() {
        if in_tree[v.0 as usize] {
            continue;
        }
        in_tree[v.0 as usize] = true;
        edges.insert(id);
        total = total.checked_add(w).expect("tree weight overflows u64");
        for &(next, next_id) in &adj[v.0 as usize] {
            if !in_tree[next.0 as usize] {
                heap.push(Reverse((g.edge(next_id).unwrap().w, next_id, next)));
            }
        }
    }
    if edges.len() == n - 1 {
        Ok(Mst {
            edges,
            total_weight: total,
        })
    } else {
        Err(GraphDisconnected)
    }
}

/// Outcome of a shortest-path query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathOutcome {
    Reached { cost: u64, path: Vec<VertexId> },
    Unreachable,
}

/// Dijkstra's algorithm over non-negative scalar weights. Parents update
/// only on strict improvement over sorted adjacency, so the returned path
/// is deterministic.
pub fn dijkstra(g: &UGraph, from: VertexId, to: VertexId) -> PathOutcome {
    let n = g.num_vertices() as usize;
    assert!(
        from.0 < g.num_vertices() && to.0 < g.num_vertices(),
        "endpoint out of range"
    );
    let adj = g.adjacency();
    let mut dist: Vec<Option<u128>> = vec![None; n];
    let mut parent: Vec<Option<VertexId>> = vec![None; n];
    let mut heap: BinaryHeap<Reverse<(u128, VertexId)>> = BinaryHeap::new();
    dist[from.0 as usize] = Some(0);
    heap.push(Reverse((0, from)));

    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v.0 as usize] != Some(d) {
            continue; // stale entry
        }
        if v == to {
            break;
        }
        for &(next, id) in &adj[v.0 as usize] {
            let nd = d + u128::from(g.edge(id).unwrap().w);
            if dist[next.0 as usize].is_none_or(|old| nd < old) {
                dist[next.0 as usize] = Some(nd);
                parent[next.0 as usize] = Some(v);
                heap.push(Reverse((nd, next)));
            }
        }
    }

    match dist[to.0 as usize] {
        None => PathOutcome::Unreachable,
        Some(d) => {
            let mut path = vec![to];
            let mut v = to;
            while let Some(p) = parent[v.0 as usize] {
                path.push(p);
                v = p;
            }
            path.reverse();
            debug_assert_eq!(path[0], from);
            PathOutcome::Reached {
                cost: u64::try_from(d).expect("path cost overflows u64"),
                path,
            }
        }
    }
}

/// Maximum flow value plus one flow attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxFlow {
    pub value: u64,
    pub flow: FlowCertificate,
}

/// Edmonds–Karp: shortest augmenting paths by breadth-first search.
pub fn edmonds_karp(net: &CapNetwork) -> MaxFlow {
    let mut residual = Residual::new(net.num_vertices() as usize);
    for arc in net.arcs() {
        residual.add(arc.from.0 as usize, arc.to.0 as usize, arc.cap);
    }
    let value = residual.max_flow(net.source().0 as usize, net.sink().0 as usize);
    let flow = FlowCertificate::new(
        net.arcs()
            .iter()
            .map(|arc| (arc.id, residual.sent(2 * arc.id.0 as usize, arc.cap))),
    );
    MaxFlow { value, flow }
}

/// Residual network shared by [`edmonds_karp`] and the restricted-flow
/// solver. Arc `2k` is the forward copy of the `k`-th added arc and `2k+1`
/// its reverse, so flow sent over arc `k` is its capacity minus the
/// remaining forward residual.
pub(crate) struct Residual {
    adj: Vec<Vec<u32>>,
    head: Vec<u32>,
    cap: Vec<u64>,
}

impl Residual {
    pub(crate) fn new(n: usize) -> Self {
        Residual {
            adj: vec![Vec::new(); n],
            head: Vec::new(),
            cap: Vec::new(),
        }
    }

    /// Adds a forward/reverse pair and returns the forward index.
    pub(crate) fn add(&mut self, from: usize, to: usize, cap: u64) -> usize {
        let idx = self.head.len();
        self.head.push(to as u32);
        self.cap.push(cap);
        self.adj[from].push(idx as u32);
        self.head.push(from as u32);
        self.cap.push(0);
        self.adj[to].push(idx as u32 + 1);
        idx
    }

    /// Units actually sent over the forward arc at `idx`, given its
    /// original capacity.
    pub(crate) fn sent(&self, idx: usize, original: u64) -> u64 {
        original - self.cap[idx]
    }

    /// Removes both directions of the pair at `idx` from further
    /// augmentation.
    pub(crate) fn close(&mut self, idx: usize) {
        self.cap[idx] = 0;
        self.cap[idx ^ 1] = 0;
    }

    /// Augments along breadth-first shortest paths until none remains.
    pub(crate) fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut total: u64 = 0;
        loop {
            // BFS recording the arc used to reach each vertex.
            let mut via: Vec<Option<u32>> = vec![None; self.adj.len()];
            let mut queue = VecDeque::from([s]);
            let mut reached_t = false;
            'bfs: while let Some(v) = queue.pop_front() {
                for &idx in &self.adj[v] {
                    let to = self.head[idx as usize] as usize;
                    if self.cap[idx as usize] > 0 && via[to].is_none() && to != s {
                        via[to] = Some(idx);
                        if to == t {
                            reached_t = true;
                            break 'bfs;
                        }
                        queue.push_back(to);
                    }
                }
            }
            if !reached_t {
                return total;
            }
            // Bottleneck along the recorded path, then push it through.
            let mut bottleneck = u64::MAX;
            let mut v = t;
            while v != s {
                let idx = via[v].unwrap() as usize;
                bottleneck = bottleneck.min(self.cap[idx]);
                v = self.head[idx ^ 1] as usize;
            }
            let mut v = t;
            while v != s {
                let idx = via[v].unwrap() as usize;
                self.cap[idx] -= bottleneck;
                self.cap[idx ^ 1] += bottleneck;
                v = self.head[idx ^ 1] as usize;
            }
            total = total
                .checked_add(bottleneck)
                .expect("flow value overflows u64");
        }
    }
}
