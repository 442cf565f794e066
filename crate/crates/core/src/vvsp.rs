//! Vector-valued shortest path: given an undirected graph whose edges carry
//! non-negative integer vectors, decide whether some simple source–target
//! path's summed vector has squared Euclidean norm within a budget.
//!
//! [`vvsp_build`] compiles a 3-CNF formula with `V` variables and `C`
//! clauses into such an instance over `2V` coordinates (one per literal).
//! The graph is a chain: per variable, a diamond whose two branches load
//! `M` onto the positive or the negated coordinate; per clause, a bundle of
//! three two-edge detours, each loading one unit onto one literal's
//! coordinate. A path commits to one branch per variable and one literal
//! per clause. Squares make the interaction: a clause unit landing on a
//! loaded coordinate costs `2M + 1` extra instead of `1`, and with
//! `M > C³/2` the budget `V·M² + C³` admits exactly the paths whose clause
//! picks all avoid the loaded coordinates — which exist iff the formula is
//! satisfiable (load the coordinate of each *false* literal).

use std::collections::BTreeMap;

use thiserror::Error;

use crate::cnf::{Assignment, CnfInstance, Literal, WitnessError};
use crate::graph::{
    EdgeId, PathCertificate, SearchBudgetExceeded, SparseVec, VGraph, VertexId, VertexRole,
    DEFAULT_NODE_LIMIT,
};

/// A vector-valued shortest-path instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VvspInstance {
    pub graph: VGraph,
    pub source: VertexId,
    pub target: VertexId,
    /// Maximum admissible squared path cost.
    pub budget_sq: u64,
    /// The branch load `M` (for rendering; the largest single entry).
    pub big_weight: u64,
}

/// Construction metadata tying a built instance back to its formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VvspLabels {
    /// Per variable (1-based): its (positive-coordinate, negated-coordinate)
    /// branch vertices. Traversing the negated branch means "true" — it
    /// keeps the positive coordinate clean.
    pub var_branches: BTreeMap<u32, (VertexId, VertexId)>,
    /// Literal carried by each clause detour's entry edge.
    pub edge_literals: BTreeMap<EdgeId, Literal>,
    pub vertex_roles: Vec<VertexRole>,
}

/// Bad branch load passed to [`vvsp_build`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("branch load {m} too small: 2·{m} must exceed C³ = {c_cubed} for {c} clauses")]
pub struct VvspBuildError {
    pub m: u64,
    pub c: u32,
    pub c_cubed: u64,
}

struct VvspIds {
    num_vars: u32,
}

impl VvspIds {
    fn var_in(&self, var: u32) -> VertexId {
        VertexId(4 * (var - 1))
    }

    fn branch(&self, var: u32, negated: bool) -> VertexId {
        VertexId(4 * (var - 1) + 1 + u32::from(negated))
    }

    fn var_out(&self, var: u32) -> VertexId {
        VertexId(4 * (var - 1) + 3)
    }

    fn clause_in(&self, clause: u32) -> VertexId {
        VertexId(4 * self.num_vars + 5 * clause)
    }

    fn clause_slot(&self, clause: u32, pos: u32) -> VertexId {
        VertexId(4 * self.num_vars + 5 * clause + 1 + pos)
    }

    fn clause_out(&self, clause: u32) -> VertexId {
        VertexId(4 * self.num_vars + 5 * clause + 4)
    }

    fn entry_edge(&self, clause: u32, pos: u32) -> EdgeId {
        EdgeId(5 * self.num_vars + 7 * clause + pos)
    }

    fn coord(&self, lit: Literal) -> u32 {
        lit.var - 1 + if lit.negated { self.num_vars } else { 0 }
    }
}

/// Compiles a formula into an instance with `4V + 5C` vertices,
/// `5V + 7C − 1` edges, dimension `2V`, and squared budget `V·M² + C³`
/// (default `M = ⌈C³/2⌉ + 1`).
pub fn vvsp_build(
    cnf: &CnfInstance,
    m: Option<u64>,
) -> Result<(VvspInstance, VvspLabels), VvspBuildError> {
    let v = cnf.num_vars();
    let c = cnf.num_clauses();
    let c_cubed = u64::from(c).pow(3);
    let m = m.unwrap_or(c_cubed.div_ceil(2) + 1);
    if 2u128 * u128::from(m) <= u128::from(c_cubed) {
        return Err(VvspBuildError { m, c, c_cubed });
    }
    let dim = 2 * v;
    let ids = VvspIds { num_vars: v };

    let mut graph = VGraph::new(4 * v + 5 * c, dim);
    let mut roles = Vec::new();
    let mut var_branches = BTreeMap::new();
    let mut edge_literals = BTreeMap::new();

    for var in 1..=v {
        roles.extend([
            VertexRole::VarIn(var),
            VertexRole::GadgetBranch {
                var,
                negated: false,
            },
            VertexRole::GadgetBranch { var, negated: true },
            VertexRole::VarOut(var),
        ]);
        var_branches.insert(var, (ids.branch(var, false), ids.branch(var, true)));
        let pos_load = SparseVec::unit(dim, ids.coord(Literal::positive(var)), m);
        let neg_load = SparseVec::unit(dim, ids.coord(Literal::negative(var)), m);
        graph.add_edge(ids.var_in(var), ids.branch(var, false), pos_load);
        graph.add_edge(ids.var_in(var), ids.branch(var, true), neg_load);
        graph.add_edge(
            ids.branch(var, false),
            ids.var_out(var),
            SparseVec::zero(dim),
        );
        graph.add_edge(
            ids.branch(var, true),
            ids.var_out(var),
            SparseVec::zero(dim),
        );
        let next = if var < v {
            ids.var_in(var + 1)
        } else {
            ids.clause_in(0)
        };
        graph.add_edge(ids.var_out(var), next, SparseVec::zero(dim));
    }
    for (ci, clause) in cnf.clauses().iter().enumerate() {
        let ci = ci as u32;
        roles.push(VertexRole::ClauseIn(ci));
        for pos in 0..3u8 {
            roles.push(VertexRole::ClausePos { clause: ci, pos });
        }
        roles.push(VertexRole::ClauseOut(ci));
        for (pos, lit) in clause.literals().iter().enumerate() {
            let pos = pos as u32;
            let unit = SparseVec::unit(dim, ids.coord(*lit), 1);
            let id = graph.add_edge(ids.clause_in(ci), ids.clause_slot(ci, pos), unit);
            debug_assert_eq!(id, ids.entry_edge(ci, pos));
            edge_literals.insert(id, *lit);
        }
        for pos in 0..3u32 {
            graph.add_edge(
                ids.clause_slot(ci, pos),
                ids.clause_out(ci),
                SparseVec::zero(dim),
            );
        }
        if ci + 1 < c {
            graph.add_edge(
                ids.clause_out(ci),
                ids.clause_in(ci + 1),
                SparseVec::zero(dim),
            );
        }
    }

    let budget_sq = u64::from(v)
        .checked_mul(m.checked_mul(m).expect("M² overflows u64"))
        .and_then(|vm2| vm2.checked_add(c_cubed))
        .expect("budget overflows u64");
    let instance = VvspInstance {
        graph,
        source: ids.var_in(1),
        target: ids.clause_out(c - 1),
        budget_sq,
        big_weight: m,
    };
    Ok((
        instance,
        VvspLabels {
            var_branches,
            edge_literals,
            vertex_roles: roles,
        },
    ))
}

/// The vertex sequence is not a simple path of the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("vertex sequence is not a simple path in the graph")]
pub struct NotAPath;

/// Exact squared cost of a simple path: sum the edge vectors, square the
/// norm. 128-bit, so desk-scale weights cannot overflow.
pub fn path_cost2(inst: &VvspInstance, vertices: &[VertexId]) -> Result<u128, NotAPath> {
    if !inst.graph.is_simple_path(vertices) {
        return Err(NotAPath);
    }
    let mut total = SparseVec::zero(inst.graph.dim());
    for pair in vertices.windows(2) {
        let edge = inst
            .graph
            .edge_between(pair[0], pair[1])
            .expect("path checked");
        total.add_assign(&edge.w);
    }
    Ok(total.norm2())
}

/// Why a certificate was rejected; the first violated condition in the
/// order endpoints, path shape, budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum VvspReject {
    #[error("path must run from the source to the target")]
    WrongEndpoints,
    #[error("vertex sequence is not a simple path")]
    NotSimplePath,
    #[error("squared cost {cost_sq} exceeds budget {budget_sq}")]
    CostExceeded { cost_sq: u128, budget_sq: u64 },
}

/// Verification outcome for a claimed path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VvspVerdict {
    Accept { cost_sq: u128 },
    Reject(VvspReject),
}

impl VvspVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, VvspVerdict::Accept { .. })
    }
}

/// Checks a claimed path in polynomial time.
pub fn vvsp_verify(inst: &VvspInstance, cert: &PathCertificate) -> VvspVerdict {
    let vertices = &cert.vertices;
    if vertices.first() != Some(&inst.source) || vertices.last() != Some(&inst.target) {
        return VvspVerdict::Reject(VvspReject::WrongEndpoints);
    }
    match path_cost2(inst, vertices) {
        Err(NotAPath) => VvspVerdict::Reject(VvspReject::NotSimplePath),
        Ok(cost_sq) => {
            if cost_sq > u128::from(inst.budget_sq) {
                VvspVerdict::Reject(VvspReject::CostExceeded {
                    cost_sq,
                    budget_sq: inst.budget_sq,
                })
            } else {
                VvspVerdict::Accept { cost_sq }
            }
        }
    }
}

/// Knobs for [`vvsp_solve_with`].
#[derive(Debug, Clone)]
pub struct VvspSolveOptions {
    /// Abort with [`SearchBudgetExceeded`] after this many path extensions.
    pub node_limit: u64,
}

impl Default for VvspSolveOptions {
    fn default() -> Self {
        VvspSolveOptions {
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }
}

/// Solver result plus the number of visits explored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VvspSolution {
    pub certificate: Option<PathCertificate>,
    pub nodes: u64,
}

/// [`vvsp_solve_with`] under default options.
pub fn vvsp_solve(inst: &VvspInstance) -> Result<Option<PathCertificate>, SearchBudgetExceeded> {
    vvsp_solve_with(inst, &VvspSolveOptions::default()).map(|s| s.certificate)
}

struct VvspSearch<'a> {
    inst: &'a VvspInstance,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
    visited: Vec<bool>,
    path: Vec<VertexId>,
    /// Dense running coordinate sums of the current path.
    sums: Vec<u64>,
    cost_sq: u128,
    nodes: u64,
    node_limit: u64,
}

enum PathSearch {
    Found,
    Exhausted,
    Limit,
}

impl VvspSearch<'_> {
    /// Squared-cost increase from adding `w` to the current sums.
    fn delta(&self, w: &SparseVec) -> u128 {
        w.entries()
            .map(|(coord, val)| {
                let cur = u128::from(self.sums[coord as usize]);
                let val = u128::from(val);
                2 * cur * val + val * val
            })
            .sum()
    }

    fn dfs(&mut self, at: VertexId) -> PathSearch {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return PathSearch::Limit;
        }
        if at == self.inst.target {
            return PathSearch::Found;
        }
        for i in 0..self.adj[at.0 as usize].len() {
            let (next, eid) = self.adj[at.0 as usize][i];
            if self.visited[next.0 as usize] {
                continue;
            }
            let w = &self.inst.graph.edge(eid).unwrap().w;
            let delta = self.delta(w);
            // Coordinates only grow, so the squared cost is monotone along
            // a path: overshooting here can never recover.
            if self.cost_sq + delta > u128::from(self.inst.budget_sq) {
                continue;
            }
            self.visited[next.0 as usize] = true;
            self.path.push(next);
            self.cost_sq += delta;
            let w = w.clone();
            for (coord, val) in w.entries() {
                self.sums[coord as usize] += val;
            }
            match self.dfs(next) {
                PathSearch::Found => return PathSearch::Found,
                PathSearch::Limit => return PathSearch::Limit,
                PathSearch::Exhausted => {}
            }
            for (coord, val) in w.entries() {
                self.sums[coord as usize] -= val;
            }
            self.cost_sq -= delta;
            self.path.pop();
            self.visited[next.0 as usize] = false;
        }
        PathSearch::Exhausted
    }
}

/// Exact decision procedure: depth-first search over simple paths, pruning
/// any extension whose squared cost already exceeds the budget (sound
/// because coordinates never decrease along a path).
pub fn vvsp_solve_with(
    inst: &VvspInstance,
    opts: &VvspSolveOptions,
) -> Result<VvspSolution, SearchBudgetExceeded> {
    let n = inst.graph.num_vertices() as usize;
    assert!(
        inst.source.0 < n as u32 && inst.target.0 < n as u32,
        "endpoint out of range"
    );
    let mut search = VvspSearch {
        inst,
        adj: inst.graph.adjacency(),
        visited: vec![false; n],
        path: vec![inst.source],
        sums: vec![0; inst.graph.dim() as usize],
        cost_sq: 0,
        nodes: 0,
        node_limit: opts.node_limit,
    };
    search.visited[inst.source.0 as usize] = true;
    match search.dfs(inst.source) {
        PathSearch::Found => {
            let cert = PathCertificate {
                vertices: search.path,
            };
            debug_assert!(vvsp_verify(inst, &cert).is_accept());
            Ok(VvspSolution {
                certificate: Some(cert),
                nodes: search.nodes,
            })
        }
        PathSearch::Exhausted => Ok(VvspSolution {
            certificate: None,
            nodes: search.nodes,
        }),
        PathSearch::Limit => Err(SearchBudgetExceeded {
            explored: search.nodes,
            limit: opts.node_limit,
        }),
    }
}

/// Cheapest squared cost over **all** simple source–target paths, by plain
/// enumeration with per-path vector arithmetic and no pruning. Exponential;
/// the independent oracle the pruned solver is checked against.
pub fn vvsp_exhaustive_min(inst: &VvspInstance) -> Option<u128> {
    fn go(
        graph: &VGraph,
        adj: &[Vec<(VertexId, EdgeId)>],
        target: VertexId,
        at: VertexId,
        visited: &mut Vec<bool>,
        acc: &SparseVec,
        best: &mut Option<u128>,
    ) {
        if at == target {
            let cost = acc.norm2();
            *best = Some(best.map_or(cost, |b| b.min(cost)));
            return;
        }
        for &(next, eid) in &adj[at.0 as usize] {
            if visited[next.0 as usize] {
                continue;
            }
            let mut sum = acc.clone();
            sum.add_assign(&graph.edge(eid).unwrap().w);
            visited[next.0 as usize] = true;
            go(graph, adj, target, next, visited, &sum, best);
            visited[next.0 as usize] = false;
        }
    }
    let adj = inst.graph.adjacency();
    let mut visited = vec![false; inst.graph.num_vertices() as usize];
    visited[inst.source.0 as usize] = true;
    let mut best = None;
    go(
        &inst.graph,
        &adj,
        inst.target,
        inst.source,
        &mut visited,
        &SparseVec::zero(inst.graph.dim()),
        &mut best,
    );
    best
}

/// The constructive direction: traverse each variable's branch opposite to
/// its truth value (loading only false literals' coordinates) and each
/// clause's detour through its lowest-position true literal.
pub fn path_from_assignment(
    cnf: &CnfInstance,
    a: &Assignment,
) -> Result<PathCertificate, WitnessError> {
    if !cnf.evaluate(a)? {
        return Err(WitnessError::NotSatisfying);
    }
    let ids = VvspIds {
        num_vars: cnf.num_vars(),
    };
    let mut vertices = Vec::new();
    for var in 1..=cnf.num_vars() {
        vertices.push(ids.var_in(var));
        vertices.push(ids.branch(var, a.get(var).unwrap()));
        vertices.push(ids.var_out(var));
    }
    for (ci, clause) in cnf.clauses().iter().enumerate() {
        let ci = ci as u32;
        let pos = clause
            .literals()
            .iter()
            .position(|lit| lit.holds(a).expect("evaluate checked the assignment"))
            .expect("a satisfying assignment serves every clause") as u32;
        vertices.push(ids.clause_in(ci));
        vertices.push(ids.clause_slot(ci, pos));
        vertices.push(ids.clause_out(ci));
    }
    Ok(PathCertificate { vertices })
}

/// Extraction failed: the path doesn't traverse exactly one branch of a
/// variable's diamond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("path does not traverse exactly one branch of x{var}")]
pub struct UndecidedVariable {
    pub var: u32,
}

/// Reads an assignment off an accepted path: a variable is true iff the
/// path went through its negated-coordinate branch.
pub fn vvsp_extract(
    labels: &VvspLabels,
    cert: &PathCertificate,
    num_vars: u32,
) -> Result<Assignment, UndecidedVariable> {
    let mut a = Assignment::all_false(num_vars);
    for var in 1..=num_vars {
        let &(pos_branch, neg_branch) = labels
            .var_branches
            .get(&var)
            .unwrap_or_else(|| panic!("labels missing variable x{var}"));
        let through_pos = cert.vertices.contains(&pos_branch);
        let through_neg = cert.vertices.contains(&neg_branch);
        match (through_pos, through_neg) {
            (false, true) => a.set(var, true),
            (true, false) => a.set(var, false),
            _ => return Err(UndecidedVariable { var }),
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{brute_force_sat, parse_dimacs, random_cnf};
    use crate::fixtures::{example_b, example_b_witness, unsat_u3};

    fn build_b() -> (VvspInstance, VvspLabels) {
        vvsp_build(&example_b(), None).unwrap()
    }

    /// Hand-built accepted path for B under the witness x1=F x2=T x3=T
    /// x4=F, with clause picks x2@1, ~x1@2, ~x1@3, ~x4@4.
    fn hand_path_for_b() -> PathCertificate {
        let vs = [
            0, 1, 3, // x1 false: positive branch
            4, 6, 7, // x2 true: negated branch
            8, 10, 11, // x3 true: negated branch
            12, 13, 15, // x4 false: positive branch
            16, 18, 20, // clause 1 picks slot 2 (x2)
            21, 22, 25, // clause 2 picks slot 1 (~x1)
            26, 27, 30, // clause 3 picks slot 1 (~x1)
            31, 34, 35, // clause 4 picks slot 3 (~x4)
        ];
        PathCertificate::new(vs.into_iter().map(VertexId))
    }

    #[test]
    fn build_sizes_on_the_fixtures() {
        let (inst, labels) = build_b();
        assert_eq!(inst.graph.num_vertices(), 36); // 4·4 + 5·4
        assert_eq!(inst.graph.num_edges(), 47); // 5·4 + 7·4 − 1
        assert_eq!(inst.graph.dim(), 8);
        assert_eq!(inst.budget_sq, 4420); // 4·33² + 4³
        assert_eq!(inst.big_weight, 33); // ⌈64/2⌉ + 1
        assert_eq!(inst.source, VertexId(0));
        assert_eq!(inst.target, VertexId(35));
        assert_eq!(labels.var_branches.len(), 4);
        assert_eq!(labels.edge_literals.len(), 12);
        assert_eq!(labels.vertex_roles.len(), 36);

        let single = parse_dimacs("p cnf 3 1\n1 2 3 0\n").unwrap();
        let (inst, _) = vvsp_build(&single, None).unwrap();
        assert_eq!(inst.graph.num_vertices(), 17);
        assert_eq!(inst.graph.num_edges(), 21);
        assert_eq!(inst.big_weight, 2); // ⌈1/2⌉ + 1
        assert_eq!(inst.budget_sq, 13); // 3·2² + 1

        let (inst, _) = vvsp_build(&unsat_u3(), None).unwrap();
        assert_eq!(inst.graph.num_vertices(), 52);
        assert_eq!(inst.graph.num_edges(), 70);
        assert_eq!(inst.big_weight, 257); // ⌈512/2⌉ + 1
        assert_eq!(inst.budget_sq, 198_659); // 3·257² + 8³
    }

    #[test]
    fn branch_load_must_clear_the_threshold() {
        let b = example_b();
        assert!(vvsp_build(&b, Some(33)).is_ok());
        let err = vvsp_build(&b, Some(32)).unwrap_err();
        assert_eq!(
            err,
            VvspBuildError {
                m: 32,
                c: 4,
                c_cubed: 64
            }
        );
    }

    #[test]
    fn weights_land_on_literal_coordinates() {
        let (inst, _) = build_b();
        // Variable 1's positive branch loads M on coordinate 0.
        let e = inst.graph.edge(EdgeId(0)).unwrap();
        assert_eq!(e.w.get(0), 33);
        assert_eq!(e.w.entries().count(), 1);
        // Its negated branch loads coordinate V + 0 = 4.
        assert_eq!(inst.graph.edge(EdgeId(1)).unwrap().w.get(4), 33);
        // Clause 1 slot 1 carries x1: unit on coordinate 0.
        assert_eq!(inst.graph.edge(EdgeId(20)).unwrap().w.get(0), 1);
        // Clause 4 slot 3 carries ~x4: unit on coordinate 4 + 3 = 7.
        assert_eq!(inst.graph.edge(EdgeId(43)).unwrap().w.get(7), 1);
        // Connector edges are zero vectors.
        assert!(inst.graph.edge(EdgeId(4)).unwrap().w.is_zero());
    }

    #[test]
    fn hand_path_costs_4362_and_is_accepted() {
        let (inst, _) = build_b();
        let path = hand_path_for_b();
        assert_eq!(path_cost2(&inst, &path.vertices).unwrap(), 4362);
        assert_eq!(
            vvsp_verify(&inst, &path),
            VvspVerdict::Accept { cost_sq: 4362 }
        );
    }

    #[test]
    fn verify_rejects_in_condition_order() {
        let (inst, _) = build_b();

        // Re-pick clause 1's slot to x1 (vertex 17): its unit lands on the
        // loaded coordinate 0, overshooting the budget.
        let mut collide = hand_path_for_b();
        collide.vertices[13] = VertexId(17);
        assert_eq!(
            vvsp_verify(&inst, &collide),
            VvspVerdict::Reject(VvspReject::CostExceeded {
                cost_sq: 4428,
                budget_sq: 4420
            })
        );

        // Wrong endpoints beat everything else.
        let mut wrong = hand_path_for_b();
        wrong.vertices.pop();
        assert_eq!(
            vvsp_verify(&inst, &wrong),
            VvspVerdict::Reject(VvspReject::WrongEndpoints)
        );
        assert_eq!(
            vvsp_verify(&inst, &PathCertificate::new([])),
            VvspVerdict::Reject(VvspReject::WrongEndpoints)
        );

        // Right endpoints, broken middle: skipping a slot vertex leaves
        // non-adjacent neighbors.
        let mut broken = hand_path_for_b();
        broken.vertices.remove(13);
        assert_eq!(
            vvsp_verify(&inst, &broken),
            VvspVerdict::Reject(VvspReject::NotSimplePath)
        );

        // A repeated vertex is no simple path either.
        let mut repeat = hand_path_for_b();
        repeat.vertices[4] = VertexId(1);
        assert_eq!(
            vvsp_verify(&inst, &repeat),
            VvspVerdict::Reject(VvspReject::NotSimplePath)
        );
    }

    #[test]
    fn constructive_direction_picks_lowest_true_literals() {
        let b = example_b();
        let (inst, labels) = build_b();
        let path = path_from_assignment(&b, &example_b_witness()).unwrap();
        // Clause 4 = (x2 ∨ ~x3 ∨ ~x4) has x2 true at slot 1, so unlike the
        // hand path it stacks a second unit on x2's coordinate: 4364.
        assert_eq!(
            vvsp_verify(&inst, &path),
            VvspVerdict::Accept { cost_sq: 4364 }
        );
        // Extraction inverts exactly.
        let a = vvsp_extract(&labels, &path, 4).unwrap();
        assert_eq!(a, example_b_witness());
        assert_eq!(
            path_from_assignment(&b, &Assignment::all_false(4)).unwrap_err(),
            WitnessError::NotSatisfying
        );
    }

    #[test]
    fn single_clause_all_true_costs_exactly_the_budget() {
        let single = parse_dimacs("p cnf 3 1\n1 2 3 0\n").unwrap();
        let (inst, _) = vvsp_build(&single, None).unwrap();
        let all_true = Assignment::new(vec![true, true, true]);
        let path = path_from_assignment(&single, &all_true).unwrap();
        // Three negated-coordinate loads of M=2 plus one clean unit: 13.
        assert_eq!(
            vvsp_verify(&inst, &path),
            VvspVerdict::Accept { cost_sq: 13 }
        );
    }

    #[test]
    fn solve_finds_a_path_for_b_and_extracts_a_witness() {
        let b = example_b();
        let (inst, labels) = build_b();
        let solution = vvsp_solve_with(&inst, &VvspSolveOptions::default()).unwrap();
        let cert = solution.certificate.expect("B is satisfiable");
        assert!(vvsp_verify(&inst, &cert).is_accept());
        let a = vvsp_extract(&labels, &cert, 4).unwrap();
        assert!(
            b.evaluate(&a).unwrap(),
            "extracted assignment must satisfy B"
        );
    }

    #[test]
    fn solve_proves_u3_has_no_path_within_budget() {
        let (inst, _) = vvsp_build(&unsat_u3(), None).unwrap();
        let solution = vvsp_solve_with(&inst, &VvspSolveOptions::default()).unwrap();
        assert_eq!(solution.certificate, None);
    }

    #[test]
    fn exhaustive_minimum_on_u3_clears_the_unsat_gap() {
        let (inst, _) = vvsp_build(&unsat_u3(), None).unwrap();
        let min = vvsp_exhaustive_min(&inst).expect("target is reachable");
        // Analytic unsat lower bound: one clause pick must land on a loaded
        // coordinate, so cost ≥ V·M² + 2M + 1 = 198_662 > budget 198_659.
        assert!(min >= 198_662, "min = {min}");
        assert!(min > u128::from(inst.budget_sq));
        // The exact optimum: the forced collision (2M+1) plus the other
        // seven picks spread 3/2/2 over the three clean coordinates (17).
        assert_eq!(min, 198_679);
    }

    #[test]
    fn tiny_node_limit_reports_budget_not_no() {
        let (inst, _) = vvsp_build(&unsat_u3(), None).unwrap();
        let err = vvsp_solve_with(&inst, &VvspSolveOptions { node_limit: 10 }).unwrap_err();
        assert_eq!(err.limit, 10);
        assert!(err.explored > 10);
    }

    #[test]
    fn pruned_solver_agrees_with_exhaustive_enumeration_and_the_oracle() {
        for seed in 0..25 {
            let cnf = random_cnf(3 + seed % 2, 1 + seed % 4, 5200 + u64::from(seed)).unwrap();
            let (inst, labels) = vvsp_build(&cnf, None).unwrap();
            let solution = vvsp_solve_with(&inst, &VvspSolveOptions::default()).unwrap();
            let min = vvsp_exhaustive_min(&inst).expect("chain graphs always reach the target");
            let sat = brute_force_sat(&cnf).unwrap().is_satisfiable();
            assert_eq!(
                solution.certificate.is_some(),
                min <= u128::from(inst.budget_sq),
                "pruned search disagrees with exhaustive enumeration on seed {seed}:\n{}",
                cnf.to_dimacs()
            );
            assert_eq!(
                solution.certificate.is_some(),
                sat,
                "solver disagrees with the oracle on seed {seed}:\n{}",
                cnf.to_dimacs()
            );
            if let Some(cert) = solution.certificate {
                assert!(vvsp_verify(&inst, &cert).is_accept());
                let a = vvsp_extract(&labels, &cert, cnf.num_vars()).unwrap();
                assert!(cnf.evaluate(&a).unwrap(), "seed {seed}");
            }
        }
    }

    #[test]
    fn solve_is_deterministic() {
        let (inst, _) = build_b();
        assert_eq!(vvsp_solve(&inst).unwrap(), vvsp_solve(&inst).unwrap());
    }

    #[test]
    fn extraction_needs_exactly_one_branch() {
        let (_, labels) = build_b();
        // A path missing variable 2's diamond entirely.
        let cert = PathCertificate::new([VertexId(0), VertexId(1), VertexId(3)]);
        assert_eq!(
            vvsp_extract(&labels, &cert, 4).unwrap_err(),
            UndecidedVariable { var: 2 }
        );
        // Both branches named (not a real path, but extraction is local).
        let cert = PathCertificate::new([
            VertexId(0),
            VertexId(1),
            VertexId(2),
            VertexId(3),
            VertexId(5),
            VertexId(6),
            VertexId(9),
            VertexId(10),
            VertexId(13),
            VertexId(14),
        ]);
        assert_eq!(
            vvsp_extract(&labels, &cert, 4).unwrap_err(),
            UndecidedVariable { var: 1 }
        );
    }
}
