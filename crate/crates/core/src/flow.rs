//! All-or-nothing flow: given a capacitated network, a set of *rigid* arcs
//! that must run either saturated or empty, and a target value, decide
//! whether a feasible flow reaches the target.
//!
//! [`flow_build`] compiles a 3-CNF formula with `V` variables and `C`
//! clauses into such an instance. The source feeds one hub per variable
//! (capacity `C`); each hub splits into two rigid arcs toward the
//! variable's literal nodes, so a target-hitting flow must pick exactly one
//! sign per variable. Literal nodes forward one unit into each clause they
//! serve (each clause exit passes capacity 1 to the sink) and dump their
//! surplus into a collector whose arc to the sink absorbs exactly
//! `V·C − C`. The target `V·C` is reachable iff the formula is
//! satisfiable, and the saturated rigid arcs read off an assignment.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::baselines::Residual;
use crate::cnf::{Assignment, CnfInstance, WitnessError};
use crate::graph::{
    CapNetwork, EdgeId, FlowCertificate, SearchBudgetExceeded, UnknownEdge, VertexId, VertexRole,
    DEFAULT_NODE_LIMIT,
};

/// An all-or-nothing flow instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowInstance {
    pub net: CapNetwork,
    /// Rigid arcs: each must carry 0 or its full capacity.
    pub all_or_nothing: BTreeSet<EdgeId>,
    /// Minimum admissible flow value.
    pub target: u64,
}

/// Construction metadata tying a built instance back to its formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowLabels {
    /// Per variable (1-based): its (positive, negative) rigid arcs.
    pub var_arcs: BTreeMap<u32, (EdgeId, EdgeId)>,
    pub vertex_roles: Vec<VertexRole>,
}

const SOURCE: VertexId = VertexId(0);
const SINK: VertexId = VertexId(1);
const COLLECTOR: VertexId = VertexId(2);

struct FlowIds {
    num_vars: u32,
}

impl FlowIds {
    fn hub(&self, var: u32) -> VertexId {
        VertexId(3 + (var - 1))
    }

    fn literal(&self, var: u32, negated: bool) -> VertexId {
        VertexId(3 + self.num_vars + 2 * (var - 1) + u32::from(negated))
    }

    fn clause_slot(&self, clause: u32, pos: u32) -> VertexId {
        VertexId(3 + 3 * self.num_vars + 4 * clause + pos)
    }

    fn clause_exit(&self, clause: u32) -> VertexId {
        VertexId(3 + 3 * self.num_vars + 4 * clause + 3)
    }

    fn source_arc(&self, var: u32) -> EdgeId {
        EdgeId(5 * (var - 1))
    }

    fn rigid_arc(&self, var: u32, negated: bool) -> EdgeId {
        EdgeId(5 * (var - 1) + 1 + u32::from(negated))
    }

    fn surplus_arc(&self, var: u32, negated: bool) -> EdgeId {
        EdgeId(5 * (var - 1) + 3 + u32::from(negated))
    }

    fn serve_arc(&self, clause: u32, pos: u32) -> EdgeId {
        EdgeId(5 * self.num_vars + 7 * clause + pos)
    }

    fn slot_exit_arc(&self, clause: u32, pos: u32) -> EdgeId {
        EdgeId(5 * self.num_vars + 7 * clause + 3 + pos)
    }

    fn exit_sink_arc(&self, clause: u32) -> EdgeId {
        EdgeId(5 * self.num_vars + 7 * clause + 6)
    }

    fn collector_arc(&self, num_clauses: u32) -> EdgeId {
        EdgeId(5 * self.num_vars + 7 * num_clauses)
    }
}

/// Compiles a formula into an instance with `3 + 3V + 4C` vertices,
/// `5V + 7C + 1` arcs, `2V` rigid arcs, and target `V·C`.
pub fn flow_build(cnf: &CnfInstance) -> (FlowInstance, FlowLabels) {
    let v = cnf.num_vars();
    let c = cnf.num_clauses();
    let ids = FlowIds { num_vars: v };
    let vc = u64::from(v) * u64::from(c);
    let cap_c = u64::from(c);

    let mut net = CapNetwork::new(3 + 3 * v + 4 * c, SOURCE, SINK);
    let mut roles = vec![VertexRole::Source, VertexRole::Sink, VertexRole::Collector];
    for var in 1..=v {
        roles.push(VertexRole::VarHub(var));
    }
    for var in 1..=v {
        roles.push(VertexRole::LiteralNode {
            var,
            negated: false,
        });
        roles.push(VertexRole::LiteralNode { var, negated: true });
    }
    for (ci, _) in cnf.clauses().iter().enumerate() {
        let ci = ci as u32;
        for pos in 0..3u8 {
            roles.push(VertexRole::ClausePos { clause: ci, pos });
        }
        roles.push(VertexRole::ClauseOut(ci));
    }

    let mut all_or_nothing = BTreeSet::new();
    let mut var_arcs = BTreeMap::new();
    for var in 1..=v {
        let id = net.add_arc(SOURCE, ids.hub(var), cap_c);
        debug_assert_eq!(id, ids.source_arc(var));
        let pos_arc = net.add_arc(ids.hub(var), ids.literal(var, false), cap_c);
        let neg_arc = net.add_arc(ids.hub(var), ids.literal(var, true), cap_c);
        debug_assert_eq!(pos_arc, ids.rigid_arc(var, false));
        debug_assert_eq!(neg_arc, ids.rigid_arc(var, true));
        all_or_nothing.insert(pos_arc);
        all_or_nothing.insert(neg_arc);
        var_arcs.insert(var, (pos_arc, neg_arc));
        let surplus_pos = net.add_arc(ids.literal(var, false), COLLECTOR, vc);
        let surplus_neg = net.add_arc(ids.literal(var, true), COLLECTOR, vc);
        debug_assert_eq!(surplus_pos, ids.surplus_arc(var, false));
        debug_assert_eq!(surplus_neg, ids.surplus_arc(var, true));
    }
    for (ci, clause) in cnf.clauses().iter().enumerate() {
        let ci = ci as u32;
        for (pos, lit) in clause.literals().iter().enumerate() {
            let pos = pos as u32;
            let id = net.add_arc(
                ids.literal(lit.var, lit.negated),
                ids.clause_slot(ci, pos),
                vc,
            );
            debug_assert_eq!(id, ids.serve_arc(ci, pos));
        }
        for pos in 0..3u32 {
            let id = net.add_arc(ids.clause_slot(ci, pos), ids.clause_exit(ci), vc);
            debug_assert_eq!(id, ids.slot_exit_arc(ci, pos));
        }
        let id = net.add_arc(ids.clause_exit(ci), SINK, 1);
        debug_assert_eq!(id, ids.exit_sink_arc(ci));
    }
    let id = net.add_arc(COLLECTOR, SINK, vc - cap_c);
    debug_assert_eq!(id, ids.collector_arc(c));

    let instance = FlowInstance {
        net,
        all_or_nothing,
        target: vc,
    };
    (
        instance,
        FlowLabels {
            var_arcs,
            vertex_roles: roles,
        },
    )
}

/// Why a certificate was rejected; the first violated condition in the
/// order capacity, rigidity, conservation, value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FlowReject {
    #[error("arc {arc} carries {flow}, over its capacity {cap}")]
    CapacityExceeded { arc: EdgeId, flow: u64, cap: u64 },
    #[error("rigid arc {arc} carries {flow}, neither 0 nor its capacity {cap}")]
    NotAllOrNothing { arc: EdgeId, flow: u64, cap: u64 },
    #[error("vertex {vertex} receives {inflow} but sends {outflow}")]
    NotConserved {
        vertex: VertexId,
        inflow: u64,
        outflow: u64,
    },
    #[error("flow value {value} below target {target}")]
    BelowTarget { value: i128, target: u64 },
}

/// Verification outcome for a claimed flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowVerdict {
    Accept { value: u64 },
    Reject(FlowReject),
}

impl FlowVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, FlowVerdict::Accept { .. })
    }
}

/// Checks a claimed flow in polynomial time. Arcs absent from the
/// certificate carry 0; unknown arc ids are a hard error.
pub fn flow_verify(
    inst: &FlowInstance,
    cert: &FlowCertificate,
) -> Result<FlowVerdict, UnknownEdge> {
    for (id, flow) in cert.entries() {
        let arc = inst.net.arc(id).ok_or(UnknownEdge { id })?;
        if flow > arc.cap {
            return Ok(FlowVerdict::Reject(FlowReject::CapacityExceeded {
                arc: id,
                flow,
                cap: arc.cap,
            }));
        }
    }
    for &id in &inst.all_or_nothing {
        let arc = inst.net.arc(id).ok_or(UnknownEdge { id })?;
        let flow = cert.on(id);
        if flow != 0 && flow != arc.cap {
            return Ok(FlowVerdict::Reject(FlowReject::NotAllOrNothing {
                arc: id,
                flow,
                cap: arc.cap,
            }));
        }
    }
    let n = inst.net.num_vertices() as usize;
    let mut inflow = vec![0u64; n];
    let mut outflow = vec![0u64; n];
    for arc in inst.net.arcs() {
        let f = cert.on(arc.id);
        outflow[arc.from.0 as usize] = outflow[arc.from.0 as usize]
            .checked_add(f)
            .expect("flow totals overflow u64");
        inflow[arc.to.0 as usize] = inflow[arc.to.0 as usize]
            .checked_add(f)
            .expect("flow totals overflow u64");
    }
    for v in 0..n {
        let vid = VertexId(v as u32);
        if vid == inst.net.source() || vid == inst.net.sink() {
            continue;
        }
        if inflow[v] != outflow[v] {
            return Ok(FlowVerdict::Reject(FlowReject::NotConserved {
                vertex: vid,
                inflow: inflow[v],
                outflow: outflow[v],
            }));
        }
    }
    let s = inst.net.source().0 as usize;
    let value = i128::from(outflow[s]) - i128::from(inflow[s]);
    if value < i128::from(inst.target) {
        return Ok(FlowVerdict::Reject(FlowReject::BelowTarget {
            value,
            target: inst.target,
        }));
    }
    Ok(FlowVerdict::Accept {
        value: value as u64,
    })
}

/// Knobs for [`flow_solve_with`].
#[derive(Debug, Clone)]
pub struct FlowSolveOptions {
    /// Abort with [`SearchBudgetExceeded`] after this many rigid patterns.
    pub pattern_limit: u64,
    /// Try every saturated/empty pattern instead of skipping the provably
    /// impossible ones (for cross-checking the prunes).
    pub exhaustive: bool,
}

impl Default for FlowSolveOptions {
    fn default() -> Self {
        FlowSolveOptions {
            pattern_limit: DEFAULT_NODE_LIMIT,
            exhaustive: false,
        }
    }
}

/// Solver result plus the number of rigid patterns attempted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowSolution {
    pub certificate: Option<FlowCertificate>,
    pub patterns: u64,
}

/// [`flow_solve_with`] under default options.
pub fn flow_solve(inst: &FlowInstance) -> Result<Option<FlowCertificate>, SearchBudgetExceeded> {
    flow_solve_with(inst, &FlowSolveOptions::default()).map(|s| s.certificate)
}

/// Exact decision procedure. Each rigid arc must run saturated or empty,
/// so the solver enumerates saturated-subset patterns per tail vertex and
/// solves an ordinary max-flow with lower bounds for each (super
/// source/sink for the forced arcs, then augmentation from source to sink).
///
/// Two sound prunes keep built instances at one pattern per variable side:
/// a subset whose saturated capacity exceeds the tail's total in-capacity
/// would already violate conservation, and the empty subset is impossible
/// at a tail that provably receives flow it can only push through rigid
/// arcs (all in-arcs come saturated from the source because the target
/// equals the source's out-capacity, and every out-arc is rigid).
pub fn flow_solve_with(
    inst: &FlowInstance,
    opts: &FlowSolveOptions,
) -> Result<FlowSolution, SearchBudgetExceeded> {
    let net = &inst.net;
    let n = net.num_vertices() as usize;

    // Group rigid arcs by tail vertex.
    let mut groups: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
    for &id in &inst.all_or_nothing {
        let arc = net
            .arc(id)
            .expect("rigid arc ids must exist in the network");
        groups.entry(arc.from).or_default().push(id);
    }
    let groups: Vec<(VertexId, Vec<EdgeId>)> = groups.into_iter().collect();

    let mut in_cap = vec![0u64; n];
    let mut source_out: u64 = 0;
    for arc in net.arcs() {
        in_cap[arc.to.0 as usize] = in_cap[arc.to.0 as usize]
            .checked_add(arc.cap)
            .expect("capacities overflow u64");
        if arc.from == net.source() {
            source_out = source_out
                .checked_add(arc.cap)
                .expect("capacities overflow u64");
        }
    }

    // Admissible saturated subsets per group, as masks over the group's arcs.
    let mut group_masks: Vec<Vec<u32>> = Vec::with_capacity(groups.len());
    for (tail, arcs) in &groups {
        assert!(arcs.len() <= 20, "too many rigid arcs share tail {tail}");
        let endpoint = *tail == net.source() || *tail == net.sink();
        let must_carry = !endpoint
            && !opts.exhaustive
            && inst.target == source_out
            && in_cap[tail.0 as usize] > 0
            && net
                .arcs()
                .iter()
                .all(|a| a.to != *tail || a.from == net.source())
            && net
                .arcs()
                .iter()
                .all(|a| a.from != *tail || inst.all_or_nothing.contains(&a.id));
        let mut masks = Vec::new();
        for mask in 0u32..(1 << arcs.len()) {
            if mask == 0 && must_carry {
                continue;
            }
            if !opts.exhaustive && !endpoint {
                let saturated: u64 = arcs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, id)| net.arc(*id).unwrap().cap)
                    .sum();
                if saturated > in_cap[tail.0 as usize] {
                    continue;
                }
            }
            masks.push(mask);
        }
        group_masks.push(masks);
    }

    let mut patterns: u64 = 0;
    let mut choice = vec![0usize; groups.len()];
    loop {
        patterns += 1;
        if patterns > opts.pattern_limit {
            return Err(SearchBudgetExceeded {
                explored: patterns,
                limit: opts.pattern_limit,
            });
        }
        let mut saturated = BTreeSet::new();
        for (gi, (_, arcs)) in groups.iter().enumerate() {
            let mask = group_masks[gi][choice[gi]];
            for (i, id) in arcs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    saturated.insert(*id);
                }
            }
        }
        if let Some(cert) = max_flow_with_forced(inst, &saturated) {
            debug_assert!(matches!(
                flow_verify(inst, &cert),
                Ok(FlowVerdict::Accept { .. })
            ));
            return Ok(FlowSolution {
                certificate: Some(cert),
                patterns,
            });
        }
        // Advance the odometer over group choices.
        let mut gi = 0;
        loop {
            if gi == groups.len() {
                return Ok(FlowSolution {
                    certificate: None,
                    patterns,
                });
            }
            choice[gi] += 1;
            if choice[gi] < group_masks[gi].len() {
                break;
            }
            choice[gi] = 0;
            gi += 1;
        }
    }
}

/// Max flow with the given arcs forced to their capacity and all other
/// rigid arcs forced to zero; returns a certificate iff the forced pattern
/// is feasible and reaches the target.
fn max_flow_with_forced(
    inst: &FlowInstance,
    saturated: &BTreeSet<EdgeId>,
) -> Option<FlowCertificate> {
    let net = &inst.net;
    let n = net.num_vertices() as usize;
    let (super_source, super_sink) = (n, n + 1);
    let (s, t) = (net.source().0 as usize, net.sink().0 as usize);

    let mut residual = Residual::new(n + 2);
    let mut free_idx: Vec<Option<usize>> = vec![None; net.arcs().len()];
    let mut forced_total: u64 = 0;
    for arc in net.arcs() {
        if saturated.contains(&arc.id) {
            // Lower bound = capacity: route the obligation via the super
            // source and sink; no slack remains on the arc itself.
            residual.add(super_source, arc.to.0 as usize, arc.cap);
            residual.add(arc.from.0 as usize, super_sink, arc.cap);
            forced_total = forced_total
                .checked_add(arc.cap)
                .expect("capacities overflow u64");
        } else if inst.all_or_nothing.contains(&arc.id) {
            // Forced empty: absent from the residual network.
        } else {
            free_idx[arc.id.0 as usize] =
                Some(residual.add(arc.from.0 as usize, arc.to.0 as usize, arc.cap));
        }
    }
    let big = net
        .arcs()
        .iter()
        .map(|a| a.cap)
        .fold(0u64, |acc, c| {
            acc.checked_add(c).expect("capacities overflow u64")
        })
        .checked_add(1)
        .expect("capacities overflow u64");
    let ts_idx = residual.add(t, s, big);

    // Feasibility phase: the forced obligations admit a circulation iff the
    // super-source flow saturates them all.
    if residual.max_flow(super_source, super_sink) != forced_total {
        return None;
    }
    let routed = residual.sent(ts_idx, big);
    residual.close(ts_idx);
    // Maximization phase on the residual, without the return arc.
    let value = routed + residual.max_flow(s, t);
    if value < inst.target {
        return None;
    }
    Some(FlowCertificate::new(net.arcs().iter().map(|arc| {
        let flow = if saturated.contains(&arc.id) {
            arc.cap
        } else {
            free_idx[arc.id.0 as usize].map_or(0, |idx| residual.sent(idx, arc.cap))
        };
        (arc.id, flow)
    })))
}

/// The constructive direction: route `C` along each true literal's rigid
/// arc, one unit through each clause via its lowest-position true literal,
/// and the surplus through the collector. Value exactly `V·C`.
pub fn flow_from_assignment(
    cnf: &CnfInstance,
    a: &Assignment,
) -> Result<FlowCertificate, WitnessError> {
    if !cnf.evaluate(a)? {
        return Err(WitnessError::NotSatisfying);
    }
    let v = cnf.num_vars();
    let c = cnf.num_clauses();
    let ids = FlowIds { num_vars: v };
    let cap_c = u64::from(c);

    let mut flow: BTreeMap<EdgeId, u64> = BTreeMap::new();
    for var in 1..=v {
        let negated = !a.get(var).unwrap();
        flow.insert(ids.source_arc(var), cap_c);
        flow.insert(ids.rigid_arc(var, negated), cap_c);
    }
    // served[(var, negated)] counts clauses routed through that literal.
    let mut served: BTreeMap<(u32, bool), u64> = BTreeMap::new();
    for (ci, clause) in cnf.clauses().iter().enumerate() {
        let ci = ci as u32;
        let (pos, lit) = clause
            .literals()
            .iter()
            .enumerate()
            .find(|(_, lit)| lit.holds(a).expect("evaluate checked the assignment"))
            .expect("a satisfying assignment serves every clause");
        flow.insert(ids.serve_arc(ci, pos as u32), 1);
        flow.insert(ids.slot_exit_arc(ci, pos as u32), 1);
        flow.insert(ids.exit_sink_arc(ci), 1);
        *served.entry((lit.var, lit.negated)).or_insert(0) += 1;
    }
    for var in 1..=v {
        let negated = !a.get(var).unwrap();
        let used = served.get(&(var, negated)).copied().unwrap_or(0);
        flow.insert(ids.surplus_arc(var, negated), cap_c - used);
    }
    flow.insert(ids.collector_arc(c), u64::from(v) * cap_c - cap_c);
    Ok(FlowCertificate::new(flow))
}

/// Extraction failed: a variable's rigid arcs don't determine a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("rigid arcs of x{var} carry {pos_flow} and {neg_flow}: no unique sign")]
pub struct AmbiguousVariable {
    pub var: u32,
    pub pos_flow: u64,
    pub neg_flow: u64,
}

/// Reads an assignment off an accepted flow: a variable is true iff its
/// positive rigid arc carries flow. Needs only the labels and the
/// certificate; on accepted certificates exactly one side is saturated.
pub fn flow_extract(
    labels: &FlowLabels,
    cert: &FlowCertificate,
    num_vars: u32,
) -> Result<Assignment, AmbiguousVariable> {
    let mut a = Assignment::all_false(num_vars);
    for var in 1..=num_vars {
        let &(pos_arc, neg_arc) = labels
            .var_arcs
            .get(&var)
            .unwrap_or_else(|| panic!("labels missing variable x{var}"));
        let (pos_flow, neg_flow) = (cert.on(pos_arc), cert.on(neg_arc));
        match (pos_flow > 0, neg_flow > 0) {
            (true, false) => a.set(var, true),
            (false, true) => a.set(var, false),
            _ => {
                return Err(AmbiguousVariable {
                    var,
                    pos_flow,
                    neg_flow,
                })
            }
        }
    }
    Ok(a)
}
