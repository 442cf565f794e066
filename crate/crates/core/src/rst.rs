//! Spanning tree with forbidden edge pairs: given an edge-weighted graph, a
//! set of incompatible edge pairs, and a cost budget, decide whether some
//! spanning tree avoids every pair and stays within budget.
//!
//! [`rst_build`] compiles a 3-CNF formula into such an instance. The graph
//! is an anchor edge Top–Bottom plus, per clause, three *slot* vertices and
//! one *exit* vertex: Top connects to each slot (weight 1), each slot
//! connects to the clause exit by a weight-1 edge labeled with one literal,
//! and a heavy fallback edge joins the exit to Bottom. Two literal edges
//! with complementary labels form a forbidden pair, and the budget admits
//! exactly the trees that connect every clause exit through a literal edge.
//! Such trees exist iff the formula is satisfiable, and the labels on a
//! tree's literal edges read off a satisfying assignment.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::cnf::{Assignment, CnfInstance, Literal, WitnessError};
use crate::graph::{
    EdgeId, SearchBudgetExceeded, TreeCertificate, UGraph, UnknownEdge, VertexId, VertexRole,
    DEFAULT_NODE_LIMIT,
};

/// A spanning-tree-with-forbidden-pairs instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RstInstance {
    pub graph: UGraph,
    /// Incompatible edge pairs, stored with the smaller id first.
    pub forbidden: BTreeSet<(EdgeId, EdgeId)>,
    /// Maximum admissible tree cost.
    pub budget: u64,
    /// Weight of the heavy fallback edges (for rendering; equals `budget`
    /// on built instances).
    pub big_weight: u64,
}

/// Construction metadata tying a built instance back to its formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RstLabels {
    /// Literal carried by each clause-slot edge.
    pub edge_literals: BTreeMap<EdgeId, Literal>,
    pub vertex_roles: Vec<VertexRole>,
}

/// Bad heavy-edge weight passed to [`rst_build`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("heavy weight {m} too small: must exceed 4·C + 1 = {min_exclusive} for {c} clauses")]
pub struct RstBuildError {
    pub m: u64,
    pub c: u32,
    pub min_exclusive: u64,
}

fn vid_slot(clause: u32, pos: u32) -> VertexId {
    VertexId(2 + 4 * clause + pos)
}

fn vid_exit(clause: u32) -> VertexId {
    VertexId(2 + 4 * clause + 3)
}

fn literal_edge_id(clause: u32, pos: u32) -> EdgeId {
    EdgeId(4 + 7 * clause + pos)
}

/// Compiles a formula with `V` variables and `C` clauses into an instance
/// with `4C + 2` vertices, `7C + 1` edges, one forbidden pair per
/// (positive, negative) occurrence pair of a variable, and budget equal to
/// the heavy weight `m` (default `4C + 2`, the smallest weight that makes a
/// single heavy edge unaffordable).
pub fn rst_build(
    cnf: &CnfInstance,
    m: Option<u64>,
) -> Result<(RstInstance, RstLabels), RstBuildError> {
    let c = cnf.num_clauses();
    let min_exclusive = u64::from(4 * c) + 1;
    let m = m.unwrap_or(min_exclusive + 1);
    if m <= min_exclusive {
        return Err(RstBuildError {
            m,
            c,
            min_exclusive,
        });
    }

    let top = VertexId(0);
    let bottom = VertexId(1);
    let mut graph = UGraph::new(4 * c + 2);
    let mut roles = vec![VertexRole::Top, VertexRole::Bottom];
    let mut edge_literals = BTreeMap::new();

    graph.add_edge(top, bottom, 1);
    for (ci, clause) in cnf.clauses().iter().enumerate() {
        let ci = ci as u32;
        for pos in 0..3u32 {
            roles.push(VertexRole::ClausePos {
                clause: ci,
                pos: pos as u8,
            });
        }
        roles.push(VertexRole::ClauseOut(ci));
        for pos in 0..3u32 {
            let id = graph.add_edge(top, vid_slot(ci, pos), 1);
            debug_assert_eq!(id, EdgeId(1 + 7 * ci + pos));
        }
        for pos in 0..3u32 {
            let id = graph.add_edge(vid_slot(ci, pos), vid_exit(ci), 1);
            debug_assert_eq!(id, literal_edge_id(ci, pos));
            edge_literals.insert(id, clause.literals()[pos as usize]);
        }
        graph.add_edge(vid_exit(ci), bottom, m);
    }

    // Complementary labels across all clause slots are incompatible.
    let mut forbidden = BTreeSet::new();
    let labeled: Vec<(EdgeId, Literal)> = edge_literals.iter().map(|(&e, &l)| (e, l)).collect();
    for (i, &(e1, l1)) in labeled.iter().enumerate() {
        for &(e2, l2) in &labeled[i + 1..] {
            if l1 == l2.complement() {
                forbidden.insert((e1.min(e2), e1.max(e2)));
            }
        }
    }

    let instance = RstInstance {
        graph,
        forbidden,
        budget: m,
        big_weight: m,
    };
    Ok((
        instance,
        RstLabels {
            edge_literals,
            vertex_roles: roles,
        },
    ))
}

/// Why a certificate was rejected; the first violated condition in the
/// order spanning-tree, forbidden pair, budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RstReject {
    #[error("edge set is not a spanning tree")]
    NotSpanningTree,
    #[error("tree uses forbidden pair ({first}, {second})")]
    ForbiddenPair { first: EdgeId, second: EdgeId },
    #[error("tree cost {cost} exceeds budget {budget}")]
    CostExceeded { cost: u64, budget: u64 },
}

/// Verification outcome for a claimed tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RstVerdict {
    Accept { cost: u64 },
    Reject(RstReject),
}

impl RstVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, RstVerdict::Accept { .. })
    }
}

/// Checks a claimed tree in polynomial time. Unknown edge ids are a hard
/// error (malformed certificate), not a rejection.
pub fn rst_verify(inst: &RstInstance, cert: &TreeCertificate) -> Result<RstVerdict, UnknownEdge> {
    if !inst.graph.is_spanning_tree(&cert.edges)? {
        return Ok(RstVerdict::Reject(RstReject::NotSpanningTree));
    }
    for &(first, second) in &inst.forbidden {
        if cert.edges.contains(&first) && cert.edges.contains(&second) {
            return Ok(RstVerdict::Reject(RstReject::ForbiddenPair {
                first,
                second,
            }));
        }
    }
    let cost = inst.graph.total_weight(&cert.edges)?;
    if cost > inst.budget {
        return Ok(RstVerdict::Reject(RstReject::CostExceeded {
            cost,
            budget: inst.budget,
        }));
    }
    Ok(RstVerdict::Accept { cost })
}

/// Knobs for [`rst_solve_with`].
#[derive(Debug, Clone)]
pub struct RstSolveOptions {
    /// Abort with [`SearchBudgetExceeded`] after this many branch nodes.
    pub node_limit: u64,
    /// Contract safe edges before branching (sound; disable to cross-check).
    pub contract: bool,
}

impl Default for RstSolveOptions {
    fn default() -> Self {
        RstSolveOptions {
            node_limit: DEFAULT_NODE_LIMIT,
            contract: true,
        }
    }
}

/// Solver result: a certificate if one exists, `None` if provably none
/// does, plus the number of branch nodes explored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RstSolution {
    pub certificate: Option<TreeCertificate>,
    pub branches: u64,
}

/// [`rst_solve_with`] under default options.
pub fn rst_solve(inst: &RstInstance) -> Result<Option<TreeCertificate>, SearchBudgetExceeded> {
    rst_solve_with(inst, &RstSolveOptions::default()).map(|s| s.certificate)
}

/// Union-find with explicit rollback (union by size, no path compression)
/// so branch-and-bound can undo unions cheaply.
struct RollbackDsu {
    parent: Vec<u32>,
    size: Vec<u32>,
    merged: Vec<u32>, // roots that were attached, in order
    components: u32,
}

impl RollbackDsu {
    fn new(n: u32) -> Self {
        RollbackDsu {
            parent: (0..n).collect(),
            size: vec![1; n as usize],
            merged: Vec::new(),
            components: n,
        }
    }

    fn find(&self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            x = self.parent[x as usize];
        }
        x
    }

    /// Returns false if already joined. Smaller component goes under the
    /// larger; equal sizes attach the higher root under the lower, so runs
    /// are deterministic.
    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (child, parent) = match self.size[ra as usize].cmp(&self.size[rb as usize]) {
            std::cmp::Ordering::Less => (ra, rb),
            std::cmp::Ordering::Greater => (rb, ra),
            std::cmp::Ordering::Equal => (ra.max(rb), ra.min(rb)),
        };
        self.parent[child as usize] = parent;
        self.size[parent as usize] += self.size[child as usize];
        self.merged.push(child);
        self.components -= 1;
        true
    }

    fn mark(&self) -> usize {
        self.merged.len()
    }

    fn rollback(&mut self, mark: usize) {
        while self.merged.len() > mark {
            let child = self.merged.pop().unwrap();
            let parent = self.parent[child as usize];
            self.parent[child as usize] = child;
            self.size[parent as usize] -= self.size[child as usize];
            self.components += 1;
        }
    }
}

enum Search {
    Found,
    Exhausted,
    Limit,
}

struct RstSearch<'a> {
    inst: &'a RstInstance,
    /// Edges conflicting with each edge.
    partners: Vec<Vec<EdgeId>>,
    dsu: RollbackDsu,
    /// How many chosen edges currently ban each edge.
    ban_count: Vec<u32>,
    chosen: Vec<EdgeId>,
    cost: u64,
    branches: u64,
    node_limit: u64,
}

impl RstSearch<'_> {
    /// Candidate edges bridging different components, unbanned, affordable.
    fn candidate(&self, e: &crate::graph::UEdge) -> Option<(u32, u32)> {
        if self.ban_count[e.id.0 as usize] > 0 {
            return None;
        }
        if self.cost.saturating_add(e.w) > self.inst.budget {
            return None;
        }
        let (ru, rv) = (self.dsu.find(e.u.0), self.dsu.find(e.v.0));
        (ru != rv).then_some((ru, rv))
    }

    fn run(&mut self) -> Search {
        if self.dsu.components == 1 {
            return Search::Found;
        }
        // Gather candidates, bucketed by the components they leave.
        let mut per_root: BTreeMap<u32, Vec<(u64, EdgeId)>> = BTreeMap::new();
        let mut cheapest: Option<u64> = None;
        for e in self.inst.graph.edges() {
            if let Some((ru, rv)) = self.candidate(e) {
                per_root.entry(ru).or_default().push((e.w, e.id));
                per_root.entry(rv).or_default().push((e.w, e.id));
                cheapest = Some(cheapest.map_or(e.w, |c: u64| c.min(e.w)));
            }
        }
        // Every remaining component must be reached by some candidate, and
        // the cheapest possible completion must fit the budget.
        if per_root.len() < self.dsu.components as usize {
            return Search::Exhausted;
        }
        let need = u64::from(self.dsu.components - 1);
        match cheapest {
            None => return Search::Exhausted,
            Some(w) => {
                if self.cost.saturating_add(need.saturating_mul(w)) > self.inst.budget {
                    return Search::Exhausted;
                }
            }
        }
        // Fail-first: branch on the component with the fewest ways out.
        let (_, options) = per_root
            .into_iter()
            .min_by_key(|(root, opts)| (opts.len(), *root))
            .expect("components remain, so candidates exist");
        let mut options = options;
        options.sort_unstable();
        for (w, id) in options {
            self.branches += 1;
            if self.branches > self.node_limit {
                return Search::Limit;
            }
            let mark = self.dsu.mark();
            let e = self.inst.graph.edge(id).unwrap();
            self.dsu.union(e.u.0, e.v.0);
            self.cost += w;
            self.chosen.push(id);
            for p in &self.partners[id.0 as usize] {
                self.ban_count[p.0 as usize] += 1;
            }
            match self.run() {
                Search::Found => return Search::Found,
                Search::Limit => return Search::Limit,
                Search::Exhausted => {}
            }
            for p in &self.partners[id.0 as usize] {
                self.ban_count[p.0 as usize] -= 1;
            }
            self.chosen.pop();
            self.cost -= w;
            self.dsu.rollback(mark);
        }
        Search::Exhausted
    }
}

/// Exact decision procedure: branch and bound over edges bridging
/// components, after an optional safe-edge contraction pass.
///
/// Contraction repeatedly commits an edge that (a) has minimum weight among
/// all edges leaving one of its components and (b) belongs to no forbidden
/// pair. Swapping such an edge into any feasible tree (for the other edge
/// the induced cycle crosses the cut with) keeps the tree feasible, so the
/// decision is preserved. On built instances this pass absorbs the anchor
/// edges and every unconflicted clause, leaving only the genuinely
/// combinatorial choices to the search.
pub fn rst_solve_with(
    inst: &RstInstance,
    opts: &RstSolveOptions,
) -> Result<RstSolution, SearchBudgetExceeded> {
    let n = inst.graph.num_vertices();
    let m = inst.graph.num_edges() as usize;

    let mut in_pair = vec![false; m];
    let mut partners: Vec<Vec<EdgeId>> = vec![Vec::new(); m];
    for &(a, b) in &inst.forbidden {
        // Unknown ids in the pair list would poison indexing; treat them as
        // unusable edges that simply never appear in the graph.
        if a.0 as usize >= m || b.0 as usize >= m {
            continue;
        }
        in_pair[a.0 as usize] = true;
        in_pair[b.0 as usize] = true;
        partners[a.0 as usize].push(b);
        partners[b.0 as usize].push(a);
    }

    let mut dsu = RollbackDsu::new(n);
    let mut forced: Vec<EdgeId> = Vec::new();
    let mut cost: u64 = 0;

    if opts.contract {
        loop {
            // Per component: the cheapest crossing weight, and the best
            // pair-free crossing edge.
            let mut min_w: BTreeMap<u32, u64> = BTreeMap::new();
            let mut best_free: BTreeMap<u32, (u64, EdgeId)> = BTreeMap::new();
            for e in inst.graph.edges() {
                let (ru, rv) = (dsu.find(e.u.0), dsu.find(e.v.0));
                if ru == rv {
                    continue;
                }
                for root in [ru, rv] {
                    min_w
                        .entry(root)
                        .and_modify(|w| *w = (*w).min(e.w))
                        .or_insert(e.w);
                    if !in_pair[e.id.0 as usize] {
                        best_free
                            .entry(root)
                            .and_modify(|b| *b = (*b).min((e.w, e.id)))
                            .or_insert((e.w, e.id));
                    }
                }
            }
            let safe = best_free
                .iter()
                .filter(|(root, (w, _))| min_w[root] == *w)
                .map(|(_, &(_, id))| id)
                .min();
            match safe {
                None => break,
                Some(id) => {
                    let e = inst.graph.edge(id).unwrap();
                    dsu.union(e.u.0, e.v.0);
                    forced.push(id);
                    cost += e.w;
                }
            }
        }
        if cost > inst.budget {
            // Safe edges are exchangeable into any feasible tree, so even
            // the forced part already overruns: provably unsatisfiable.
            return Ok(RstSolution {
                certificate: None,
                branches: 0,
            });
        }
    }

    let mut search = RstSearch {
        inst,
        partners,
        dsu,
        ban_count: vec![0; m],
        chosen: Vec::new(),
        cost,
        branches: 0,
        node_limit: opts.node_limit,
    };
    match search.run() {
        Search::Found => {
            let edges: BTreeSet<EdgeId> =
                forced.iter().chain(search.chosen.iter()).copied().collect();
            let cert = TreeCertificate { edges };
            debug_assert!(matches!(
                rst_verify(inst, &cert),
                Ok(RstVerdict::Accept { .. })
            ));
            Ok(RstSolution {
                certificate: Some(cert),
                branches: search.branches,
            })
        }
        Search::Exhausted => Ok(RstSolution {
            certificate: None,
            branches: search.branches,
        }),
        Search::Limit => Err(SearchBudgetExceeded {
            explored: search.branches,
            limit: opts.node_limit,
        }),
    }
}

/// Extraction failed because the certificate's labels contradict each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("certificate asserts both x{var} and its negation")]
pub struct InconsistentLabels {
    pub var: u32,
}

/// Reads a satisfying assignment off an accepted tree: every literal
/// labeling a tree edge is set true, unlabeled variables default to false.
/// Sound because forbidden pairs keep the used labels consistent.
pub fn rst_extract(
    labels: &RstLabels,
    cert: &TreeCertificate,
    num_vars: u32,
) -> Result<Assignment, InconsistentLabels> {
    let mut decided: BTreeMap<u32, bool> = BTreeMap::new();
    for id in &cert.edges {
        if let Some(lit) = labels.edge_literals.get(id) {
            let value = !lit.negated;
            if decided.insert(lit.var, value) == Some(!value) {
                return Err(InconsistentLabels { var: lit.var });
            }
        }
    }
    let mut a = Assignment::all_false(num_vars);
    for (var, value) in decided {
        a.set(var, value);
    }
    Ok(a)
}

/// The constructive direction: a satisfying assignment becomes the tree
/// with the anchor edge, every Top–slot edge, and per clause the literal
/// edge of its lowest-position true literal. Cost `4C + 1`, always within
/// budget.
pub fn tree_from_assignment(
    cnf: &CnfInstance,
    a: &Assignment,
) -> Result<TreeCertificate, WitnessError> {
    if !cnf.evaluate(a)? {
        return Err(WitnessError::NotSatisfying);
    }
    let mut edges = BTreeSet::new();
    edges.insert(EdgeId(0));
    for (ci, clause) in cnf.clauses().iter().enumerate() {
        let ci = ci as u32;
        for pos in 0..3u32 {
            edges.insert(EdgeId(1 + 7 * ci + pos));
        }
        let pos = clause
            .literals()
            .iter()
            .position(|lit| lit.holds(a).expect("evaluate checked the assignment"))
            .expect("a satisfying assignment serves every clause") as u32;
        edges.insert(literal_edge_id(ci, pos));
    }
    Ok(TreeCertificate { edges })
}
