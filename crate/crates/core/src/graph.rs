//! Shared graph vocabulary: undirected weighted graphs, capacitated
//! networks, vector-weighted graphs, certificates, and the common solver
//! budget error.
//!
//! Vertex ids are dense `0..n`, edge/arc ids dense `0..m` in insertion
//! order. Self-loops are rejected everywhere; parallel edges are allowed
//! except in vector-weighted graphs, where a path's cost must name a unique
//! edge per vertex pair.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense 0-based vertex id.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct VertexId(pub u32);

/// Dense 0-based edge or arc id.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// What a vertex stands for in a built instance. Construction metadata:
/// kept alongside instances for labeling and extraction, never serialized
/// into the instance exchange format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexRole {
    /// Spanning-tree anchor (all variable-pair edges meet here).
    Top,
    /// Spanning-tree anchor opposite [`VertexRole::Top`].
    Bottom,
    /// Flow source.
    Source,
    /// Flow sink.
    Sink,
    /// Flow surplus collector between literal nodes and the sink.
    Collector,
    /// Flow per-variable splitter.
    VarHub(u32),
    /// Flow node for one literal of a variable.
    LiteralNode { var: u32, negated: bool },
    /// Path-gadget entry vertex of a variable.
    VarIn(u32),
    /// Path-gadget exit vertex of a variable.
    VarOut(u32),
    /// Path-gadget branch loading the positive (negated=false) or negated
    /// coordinate of a variable.
    GadgetBranch { var: u32, negated: bool },
    /// Clause-gadget entry vertex.
    ClauseIn(u32),
    /// Slot for literal `pos` (0-based) of clause `clause` (0-based).
    ClausePos { clause: u32, pos: u8 },
    /// Clause-gadget exit vertex.
    ClauseOut(u32),
}

impl VertexRole {
    /// Short human-readable tag (clauses and positions shown 1-based).
    pub fn label(&self) -> String {
        match *self {
            VertexRole::Top => "T".to_string(),
            VertexRole::Bottom => "B".to_string(),
            VertexRole::Source => "s".to_string(),
            VertexRole::Sink => "t".to_string(),
            VertexRole::Collector => "l".to_string(),
            VertexRole::VarHub(i) => format!("w{i}"),
            VertexRole::LiteralNode { var, negated } => {
                format!("{}x{var}", if negated { "~" } else { "" })
            }
            VertexRole::VarIn(i) => format!("in{i}"),
            VertexRole::VarOut(i) => format!("out{i}"),
            VertexRole::GadgetBranch { var, negated } => {
                format!("{}u{var}", if negated { "~" } else { "" })
            }
            VertexRole::ClauseIn(c) => format!("a{}", c + 1),
            VertexRole::ClausePos { clause, pos } => format!("c{}p{}", clause + 1, pos + 1),
            VertexRole::ClauseOut(c) => format!("o{}", c + 1),
        }
    }
}

/// Undirected weighted edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UEdge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub w: u64,
}

/// Undirected graph with non-negative integer edge weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UGraph {
    num_vertices: u32,
    edges: Vec<UEdge>,
}

impl UGraph {
    /// An edgeless graph on `n ≥ 1` vertices.
    pub fn new(n: u32) -> Self {
        assert!(n >= 1, "graph needs at least one vertex");
        UGraph {
            num_vertices: n,
            edges: Vec::new(),
        }
    }

    /// Appends an edge and returns its id. Panics on self-loops or
    /// out-of-range endpoints; external data must be validated before it
    /// reaches this builder.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, w: u64) -> EdgeId {
        assert!(u != v, "self-loop at {u}");
        assert!(
            u.0 < self.num_vertices && v.0 < self.num_vertices,
            "endpoint out of range"
        );
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(UEdge { id, u, v, w });
        id
    }

    pub fn num_vertices(&self) -> u32 {
        self.num_vertices
    }

    pub fn num_edges(&self) -> u32 {
        self.edges.len() as u32
    }

    pub fn edges(&self) -> &[UEdge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Option<&UEdge> {
        self.edges.get(id.0 as usize)
    }

    /// Neighbor list as `(neighbor, edge id)` pairs, sorted, one entry per
    /// incident edge.
    pub fn adjacency(&self) -> Vec<Vec<(VertexId, EdgeId)>> {
        let mut adj = vec![Vec::new(); self.num_vertices as usize];
        for e in &self.edges {
            adj[e.u.0 as usize].push((e.v, e.id));
            adj[e.v.0 as usize].push((e.u, e.id));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Sum of weights over an edge set. Errors on an unknown id.
    pub fn total_weight(&self, ids: &BTreeSet<EdgeId>) -> Result<u64, UnknownEdge> {
        let mut total: u64 = 0;
        for &id in ids {
            let e = self.edge(id).ok_or(UnknownEdge { id })?;
            total = total.checked_add(e.w).expect("edge weights overflow u64");
        }
        Ok(total)
    }

    /// True iff `ids` has exactly `n − 1` edges and connects all vertices
    /// (acyclicity then follows). Errors on an unknown id.
    pub fn is_spanning_tree(&self, ids: &BTreeSet<EdgeId>) -> Result<bool, UnknownEdge> {
        for &id in ids {
            if self.edge(id).is_none() {
                return Err(UnknownEdge { id });
            }
        }
        if ids.len() != self.num_vertices as usize - 1 {
            return Ok(false);
        }
        let mut adj = vec![Vec::new(); self.num_vertices as usize];
        for &id in ids {
            let e = &self.edges[id.0 as usize];
            adj[e.u.0 as usize].push(e.v);
            adj[e.v.0 as usize].push(e.u);
        }
        let mut seen = vec![false; self.num_vertices as usize];
        let mut queue = VecDeque::from([VertexId(0)]);
        seen[0] = true;
        let mut reached = 1u32;
        while let Some(v) = queue.pop_front() {
            for &next in &adj[v.0 as usize] {
                if !seen[next.0 as usize] {
                    seen[next.0 as usize] = true;
                    reached += 1;
                    queue.push_back(next);
                }
            }
        }
        Ok(reached == self.num_vertices)
    }
}

/// Directed arc with a capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub id: EdgeId,
    pub from: VertexId,
    pub to: VertexId,
    pub cap: u64,
}

/// Directed capacitated network with designated source and sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapNetwork {
    num_vertices: u32,
    arcs: Vec<Arc>,
    source: VertexId,
    sink: VertexId,
}

impl CapNetwork {
    pub fn new(n: u32, source: VertexId, sink: VertexId) -> Self {
        assert!(source.0 < n && sink.0 < n, "endpoint out of range");
        assert!(source != sink, "source and sink must differ");
        CapNetwork {
            num_vertices: n,
            arcs: Vec::new(),
            source,
            sink,
        }
    }

    /// Appends an arc and returns its id. Panics on self-loops or
    /// out-of-range endpoints.
    pub fn add_arc(&mut self, from: VertexId, to: VertexId, cap: u64) -> EdgeId {
        assert!(from != to, "self-loop at {from}");
        assert!(
            from.0 < self.num_vertices && to.0 < self.num_vertices,
            "endpoint out of range"
        );
        let id = EdgeId(self.arcs.len() as u32);
        self.arcs.push(Arc { id, from, to, cap });
        id
    }

    pub fn num_vertices(&self) -> u32 {
        self.num_vertices
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: EdgeId) -> Option<&Arc> {
        self.arcs.get(id.0 as usize)
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn sink(&self) -> VertexId {
        self.sink
    }
}

/// Sparse non-negative integer vector. Only nonzero entries are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseVec {
    dim: u32,
    entries: BTreeMap<u32, u64>,
}

impl SparseVec {
    pub fn zero(dim: u32) -> Self {
        SparseVec {
            dim,
            entries: BTreeMap::new(),
        }
    }

    /// `scale · e_coord`. Panics if `coord ≥ dim`.
    pub fn unit(dim: u32, coord: u32, scale: u64) -> Self {
        assert!(
            coord < dim,
            "coordinate {coord} out of range for dimension {dim}"
        );
        let mut entries = BTreeMap::new();
        if scale > 0 {
            entries.insert(coord, scale);
        }
        SparseVec { dim, entries }
    }

    /// Builds from `(coordinate, value)` pairs, dropping zeros and summing
    /// repeats. Errors if a coordinate is out of range.
    pub fn from_entries<I>(dim: u32, pairs: I) -> Result<Self, BadCoordinate>
    where
        I: IntoIterator<Item = (u32, u64)>,
    {
        let mut entries = BTreeMap::new();
        for (coord, value) in pairs {
            if coord >= dim {
                return Err(BadCoordinate { coord, dim });
            }
            if value > 0 {
                *entries.entry(coord).or_insert(0) += value;
            }
        }
        Ok(SparseVec { dim, entries })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn get(&self, coord: u32) -> u64 {
        self.entries.get(&coord).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Nonzero entries in coordinate order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.entries.iter().map(|(&c, &v)| (c, v))
    }

    /// Componentwise sum. Panics on dimension mismatch.
    pub fn add_assign(&mut self, other: &SparseVec) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (coord, value) in other.entries() {
            *self.entries.entry(coord).or_insert(0) += value;
        }
    }

    /// Squared Euclidean norm, exact in 128 bits.
    pub fn norm2(&self) -> u128 {
        self.entries
            .values()
            .map(|&v| u128::from(v) * u128::from(v))
            .fold(0u128, |acc, sq| {
                acc.checked_add(sq).expect("squared norm overflows u128")
            })
    }

    /// Sum of all components (the scalarized weight).
    pub fn component_sum(&self) -> u64 {
        self.entries.values().fold(0u64, |acc, &v| {
            acc.checked_add(v).expect("component sum overflows u64")
        })
    }
}

/// Coordinate outside a vector's dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("coordinate {coord} out of range for dimension {dim}")]
pub struct BadCoordinate {
    pub coord: u32,
    pub dim: u32,
}

/// Undirected edge carrying a vector weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VEdge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub w: SparseVec,
}

/// Undirected graph with vector-valued edge weights, all of one dimension.
/// Parallel edges are rejected so each vertex pair names a unique weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VGraph {
    num_vertices: u32,
    dim: u32,
    edges: Vec<VEdge>,
    by_pair: BTreeMap<(VertexId, VertexId), EdgeId>,
}

impl VGraph {
    pub fn new(n: u32, dim: u32) -> Self {
        assert!(n >= 1, "graph needs at least one vertex");
        VGraph {
            num_vertices: n,
            dim,
            edges: Vec::new(),
            by_pair: BTreeMap::new(),
        }
    }

    /// Appends an edge and returns its id. Panics on self-loops,
    /// out-of-range endpoints, dimension mismatch, or a parallel edge.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, w: SparseVec) -> EdgeId {
        assert!(u != v, "self-loop at {u}");
        assert!(
            u.0 < self.num_vertices && v.0 < self.num_vertices,
            "endpoint out of range"
        );
        assert_eq!(w.dim(), self.dim, "weight dimension mismatch");
        let key = (u.min(v), u.max(v));
        let id = EdgeId(self.edges.len() as u32);
        let previous = self.by_pair.insert(key, id);
        assert!(previous.is_none(), "parallel edge between {u} and {v}");
        self.edges.push(VEdge { id, u, v, w });
        id
    }

    pub fn num_vertices(&self) -> u32 {
        self.num_vertices
    }

    pub fn num_edges(&self) -> u32 {
        self.edges.len() as u32
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn edges(&self) -> &[VEdge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Option<&VEdge> {
        self.edges.get(id.0 as usize)
    }

    /// The unique edge between `u` and `v`, if any.
    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<&VEdge> {
        let key = (u.min(v), u.max(v));
        self.by_pair.get(&key).map(|id| &self.edges[id.0 as usize])
    }

    /// Neighbor list as `(neighbor, edge id)` pairs, sorted.
    pub fn adjacency(&self) -> Vec<Vec<(VertexId, EdgeId)>> {
        let mut adj = vec![Vec::new(); self.num_vertices as usize];
        for e in &self.edges {
            adj[e.u.0 as usize].push((e.v, e.id));
            adj[e.v.0 as usize].push((e.u, e.id));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// True iff `vertices` is non-empty, in range, pairwise distinct, and
    /// consecutive vertices are adjacent.
    pub fn is_simple_path(&self, vertices: &[VertexId]) -> bool {
        if vertices.is_empty() {
            return false;
        }
        let mut seen = BTreeSet::new();
        for v in vertices {
            if v.0 >= self.num_vertices || !seen.insert(*v) {
                return false;
            }
        }
        vertices
            .windows(2)
            .all(|pair| self.edge_between(pair[0], pair[1]).is_some())
    }

    /// Collapses each vector weight to its component sum, preserving ids.
    pub fn scalarized(&self) -> UGraph {
        let mut g = UGraph::new(self.num_vertices);
        for e in &self.edges {
            g.add_edge(e.u, e.v, e.w.component_sum());
        }
        g
    }
}

/// A certificate referenced an edge or arc id the instance does not have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("unknown edge id {id} (not in the instance)")]
pub struct UnknownEdge {
    pub id: EdgeId,
}

/// Default limit on search nodes (branches, patterns, or path extensions)
/// before a solver gives up.
pub const DEFAULT_NODE_LIMIT: u64 = 10_000_000;

/// A solver gave up after exploring `explored ≥ limit` search nodes.
/// Distinct from a proven "no certificate exists".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("search budget exceeded after exploring {explored} nodes (limit {limit})")]
pub struct SearchBudgetExceeded {
    pub explored: u64,
    pub limit: u64,
}

/// Claimed spanning tree: a set of edge ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeCertificate {
    pub edges: BTreeSet<EdgeId>,
}

impl TreeCertificate {
    pub fn new<I: IntoIterator<Item = EdgeId>>(ids: I) -> Self {
        TreeCertificate {
            edges: ids.into_iter().collect(),
        }
    }
}

/// Claimed flow: arc id → units carried. Arcs absent from the map carry 0;
/// explicit zeros are dropped on construction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FlowCertificate {
    flow: BTreeMap<EdgeId, u64>,
}

impl FlowCertificate {
    pub fn new<I: IntoIterator<Item = (EdgeId, u64)>>(pairs: I) -> Self {
        FlowCertificate {
            flow: pairs.into_iter().filter(|&(_, f)| f > 0).collect(),
        }
    }

    /// Flow on `id` (0 if absent).
    pub fn on(&self, id: EdgeId) -> u64 {
        self.flow.get(&id).copied().unwrap_or(0)
    }

    /// Nonzero entries in arc-id order.
    pub fn entries(&self) -> impl Iterator<Item = (EdgeId, u64)> + '_ {
        self.flow.iter().map(|(&id, &f)| (id, f))
    }
}

/// Claimed path: the visited vertices in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCertificate {
    pub vertices: Vec<VertexId>,
}

impl PathCertificate {
    pub fn new<I: IntoIterator<Item = VertexId>>(vertices: I) -> Self {
        PathCertificate {
            vertices: vertices.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_graph() -> UGraph {
        // 0-1-2-3-0 cycle plus diagonal 0-2.
        let mut g = UGraph::new(4);
        g.add_edge(VertexId(0), VertexId(1), 1); // e0
        g.add_edge(VertexId(1), VertexId(2), 2); // e1
        g.add_edge(VertexId(2), VertexId(3), 3); // e2
        g.add_edge(VertexId(3), VertexId(0), 4); // e3
        g.add_edge(VertexId(0), VertexId(2), 5); // e4
        g
    }

    fn ids(list: &[u32]) -> BTreeSet<EdgeId> {
        list.iter().map(|&i| EdgeId(i)).collect()
    }

    #[test]
    fn spanning_tree_detection() {
        let g = square_graph();
        assert!(g.is_spanning_tree(&ids(&[0, 1, 2])).unwrap());
        assert!(g.is_spanning_tree(&ids(&[0, 2, 4])).unwrap());
        // Wrong cardinality.
        assert!(!g.is_spanning_tree(&ids(&[0, 1])).unwrap());
        assert!(!g.is_spanning_tree(&ids(&[0, 1, 2, 3])).unwrap());
        // Right count but disconnected (cycle 0-1-2-0 misses vertex 3).
        assert!(!g.is_spanning_tree(&ids(&[0, 1, 4])).unwrap());
        // Unknown id is an error, not a false.
        assert_eq!(
            g.is_spanning_tree(&ids(&[0, 1, 9])).unwrap_err(),
            UnknownEdge { id: EdgeId(9) }
        );
    }

    #[test]
    fn tree_weight_sums() {
        let g = square_graph();
        assert_eq!(g.total_weight(&ids(&[0, 1, 2])).unwrap(), 6);
        assert_eq!(g.total_weight(&ids(&[])).unwrap(), 0);
    }

    #[test]
    #[should_panic(expected = "self-loop")]
    fn self_loops_rejected() {
        let mut g = UGraph::new(2);
        g.add_edge(VertexId(1), VertexId(1), 1);
    }

    #[test]
    fn sparse_vec_arithmetic() {
        let mut v = SparseVec::unit(4, 0, 3);
        v.add_assign(&SparseVec::unit(4, 2, 4));
        assert_eq!(v.get(0), 3);
        assert_eq!(v.get(1), 0);
        assert_eq!(v.get(2), 4);
        assert_eq!(v.norm2(), 25);
        assert_eq!(v.component_sum(), 7);
        v.add_assign(&SparseVec::unit(4, 0, 1));
        assert_eq!(v.norm2(), 32);
        assert!(SparseVec::zero(4).is_zero());
        assert!(
            SparseVec::unit(4, 1, 0).is_zero(),
            "zero scale stores nothing"
        );
        assert_eq!(
            SparseVec::from_entries(3, [(5, 1)]).unwrap_err(),
            BadCoordinate { coord: 5, dim: 3 }
        );
        let summed = SparseVec::from_entries(3, [(1, 2), (1, 3), (2, 0)]).unwrap();
        assert_eq!(summed.get(1), 5);
        assert_eq!(summed.entries().count(), 1);
    }

    #[test]
    fn vgraph_paths_and_scalarization() {
        let mut g = VGraph::new(4, 2);
        g.add_edge(VertexId(0), VertexId(1), SparseVec::unit(2, 0, 2));
        g.add_edge(VertexId(1), VertexId(2), SparseVec::unit(2, 1, 3));
        g.add_edge(VertexId(2), VertexId(3), SparseVec::zero(2));
        assert!(g.is_simple_path(&[VertexId(0), VertexId(1), VertexId(2)]));
        assert!(g.is_simple_path(&[VertexId(3)]), "single vertex is a path");
        assert!(!g.is_simple_path(&[]), "empty sequence is not a path");
        assert!(
            !g.is_simple_path(&[VertexId(0), VertexId(2)]),
            "not adjacent"
        );
        assert!(
            !g.is_simple_path(&[VertexId(0), VertexId(1), VertexId(0)]),
            "repeats a vertex"
        );
        assert!(
            !g.is_simple_path(&[VertexId(0), VertexId(7)]),
            "out of range"
        );

        let s = g.scalarized();
        assert_eq!(s.num_edges(), 3);
        assert_eq!(s.edge(EdgeId(0)).unwrap().w, 2);
        assert_eq!(s.edge(EdgeId(1)).unwrap().w, 3);
        assert_eq!(s.edge(EdgeId(2)).unwrap().w, 0);
    }

    #[test]
    #[should_panic(expected = "parallel edge")]
    fn vgraph_rejects_parallel_edges() {
        let mut g = VGraph::new(3, 1);
        g.add_edge(VertexId(0), VertexId(1), SparseVec::unit(1, 0, 1));
        g.add_edge(VertexId(1), VertexId(0), SparseVec::unit(1, 0, 2));
    }

    #[test]
    fn flow_certificate_drops_zeros() {
        let cert = FlowCertificate::new([(EdgeId(0), 5), (EdgeId(1), 0), (EdgeId(2), 1)]);
        assert_eq!(cert.on(EdgeId(0)), 5);
        assert_eq!(cert.on(EdgeId(1)), 0);
        assert_eq!(cert.on(EdgeId(9)), 0);
        assert_eq!(cert.entries().count(), 2);
    }

    #[test]
    fn role_labels() {
        assert_eq!(
            VertexRole::LiteralNode {
                var: 2,
                negated: true
            }
            .label(),
            "~x2"
        );
        assert_eq!(VertexRole::ClausePos { clause: 0, pos: 2 }.label(), "c1p3");
        assert_eq!(VertexRole::VarHub(3).label(), "w3");
    }
}
