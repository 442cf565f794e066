//! JSON interchange for instances, certificates, and construction labels.
//!
//! Instances are tagged (`"problem": "rst" | "flow" | "vvsp"`) and carry
//! their edges as arrays with explicit dense ids, so certificates and
//! forbidden/rigid sets reference edges unambiguously. Certificates are
//! parsed *against* an instance: an id or vertex outside the instance is a
//! [`SchemaError`], not a verifier reject. All collections serialize in
//! sorted order, so output is deterministic. Parsing is strict — unknown
//! fields are errors — and every error names the offending field.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::Literal;
use crate::flow::{FlowInstance, FlowLabels};
use crate::graph::{
    CapNetwork, EdgeId, FlowCertificate, PathCertificate, SparseVec, TreeCertificate, UGraph,
    VGraph, VertexId,
};
use crate::rst::{RstInstance, RstLabels};
use crate::vvsp::{VvspInstance, VvspLabels};

/// A document that doesn't match the expected shape; `path` points at the
/// offending field (`$` is the document root).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {message}")]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl SchemaError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Strict deserialization with the JSON path threaded into the error.
fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| SchemaError {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

fn render<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serialization cannot fail");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------
// Restricted spanning tree
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RstJson {
    problem: String,
    num_vertices: u32,
    edges: Vec<UEdgeJson>,
    forbidden: Vec<(u32, u32)>,
    budget: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UEdgeJson {
    id: u32,
    u: u32,
    v: u32,
    w: u64,
}

pub fn rst_to_json(inst: &RstInstance) -> String {
    render(&RstJson {
        problem: "rst".into(),
        num_vertices: inst.graph.num_vertices(),
        edges: inst
            .graph
            .edges()
            .iter()
            .map(|e| UEdgeJson {
                id: e.id.0,
                u: e.u.0,
                v: e.v.0,
                w: e.w,
            })
            .collect(),
        forbidden: inst.forbidden.iter().map(|&(a, b)| (a.0, b.0)).collect(),
        budget: inst.budget,
    })
}

pub fn rst_from_json(text: &str) -> Result<RstInstance, SchemaError> {
    let doc: RstJson = parse(text)?;
    check_tag("rst", &doc.problem)?;
    if doc.num_vertices == 0 {
        return Err(SchemaError::at(
            "num_vertices",
            "graph needs at least one vertex",
        ));
    }
    let mut graph = UGraph::new(doc.num_vertices);
    for (i, e) in doc.edges.iter().enumerate() {
        check_edge_shape("edges", i, e.id, e.u, e.v, doc.num_vertices)?;
        graph.add_edge(VertexId(e.u), VertexId(e.v), e.w);
    }
    let mut forbidden = BTreeSet::new();
    for (i, &(a, b)) in doc.forbidden.iter().enumerate() {
        let path = format!("forbidden[{i}]");
        if a == b {
            return Err(SchemaError::at(path, "a pair must name two distinct edges"));
        }
        for id in [a, b] {
            if id >= graph.num_edges() {
                return Err(SchemaError::at(path, format!("unknown edge id {id}")));
            }
        }
        forbidden.insert((EdgeId(a.min(b)), EdgeId(a.max(b))));
    }
    // The heavy-edge weight isn't part of the wire format; built instances
    // always have it equal to the budget, and it only drives rendering.
    Ok(RstInstance {
        graph,
        forbidden,
        budget: doc.budget,
        big_weight: doc.budget,
    })
}

pub fn tree_cert_to_json(cert: &TreeCertificate) -> String {
    #[derive(Serialize)]
    struct TreeJson {
        tree: Vec<u32>,
    }
    render(&TreeJson {
        tree: cert.edges.iter().map(|id| id.0).collect(),
    })
}

pub fn tree_cert_from_json(text: &str) -> Result<TreeCertificate, SchemaError> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct TreeJson {
        tree: Vec<u32>,
    }
    let doc: TreeJson = parse(text)?;
    Ok(TreeCertificate::new(doc.tree.into_iter().map(EdgeId)))
}

/// Like [`tree_cert_from_json`], additionally requiring every id to exist
/// in the instance.
pub fn tree_cert_from_json_checked(
    text: &str,
    inst: &RstInstance,
) -> Result<TreeCertificate, SchemaError> {
    let cert = tree_cert_from_json(text)?;
    for &id in &cert.edges {
        if id.0 >= inst.graph.num_edges() {
            return Err(SchemaError::at("tree", format!("unknown edge id {id}")));
        }
    }
    Ok(cert)
}

// ---------------------------------------------------------------------
// All-or-nothing flow
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlowJson {
    problem: String,
    num_vertices: u32,
    arcs: Vec<ArcJson>,
    source: u32,
    sink: u32,
    all_or_nothing: Vec<u32>,
    target: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcJson {
    id: u32,
    from: u32,
    to: u32,
    cap: u64,
}

pub fn flow_to_json(inst: &FlowInstance) -> String {
    render(&FlowJson {
        problem: "flow".into(),
        num_vertices: inst.net.num_vertices(),
        arcs: inst
            .net
            .arcs()
            .iter()
            .map(|a| ArcJson {
                id: a.id.0,
                from: a.from.0,
                to: a.to.0,
                cap: a.cap,
            })
            .collect(),
        source: inst.net.source().0,
        sink: inst.net.sink().0,
        all_or_nothing: inst.all_or_nothing.iter().map(|id| id.0).collect(),
        target: inst.target,
    })
}

pub fn flow_from_json(text: &str) -> Result<FlowInstance, SchemaError> {
    let doc: FlowJson = parse(text)?;
    check_tag("flow", &doc.problem)?;
    if doc.source >= doc.num_vertices {
        return Err(SchemaError::at("source", "vertex out of range"));
    }
    if doc.sink >= doc.num_vertices {
        return Err(SchemaError::at("sink", "vertex out of range"));
    }
    if doc.source == doc.sink {
        return Err(SchemaError::at("sink", "source and sink must differ"));
    }
    let mut net = CapNetwork::new(doc.num_vertices, VertexId(doc.source), VertexId(doc.sink));
    for (i, a) in doc.arcs.iter().enumerate() {
        check_edge_shape("arcs", i, a.id, a.from, a.to, doc.num_vertices)?;
        net.add_arc(VertexId(a.from), VertexId(a.to), a.cap);
    }
    let mut all_or_nothing = BTreeSet::new();
    for (i, &id) in doc.all_or_nothing.iter().enumerate() {
        if id >= net.arcs().len() as u32 {
            return Err(SchemaError::at(
                format!("all_or_nothing[{i}]"),
                format!("unknown arc id {id}"),
            ));
        }
        all_or_nothing.insert(EdgeId(id));
    }
    Ok(FlowInstance {
        net,
        all_or_nothing,
        target: doc.target,
    })
}

pub fn flow_cert_to_json(cert: &FlowCertificate) -> String {
    #[derive(Serialize)]
    struct FlowCertJson {
        flow: BTreeMap<u32, u64>,
    }
    render(&FlowCertJson {
        flow: cert.entries().map(|(id, f)| (id.0, f)).collect(),
    })
}

pub fn flow_cert_from_json(text: &str) -> Result<FlowCertificate, SchemaError> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct FlowCertJson {
        flow: BTreeMap<u32, u64>,
    }
    let doc: FlowCertJson = parse(text)?;
    Ok(FlowCertificate::new(
        doc.flow.into_iter().map(|(id, f)| (EdgeId(id), f)),
    ))
}

/// Like [`flow_cert_from_json`], additionally requiring every arc id to
/// exist in the instance.
pub fn flow_cert_from_json_checked(
    text: &str,
    inst: &FlowInstance,
) -> Result<FlowCertificate, SchemaError> {
    let cert = flow_cert_from_json(text)?;
    for (id, _) in cert.entries() {
        if id.0 >= inst.net.arcs().len() as u32 {
            return Err(SchemaError::at(
                format!("flow.{id}"),
                format!("unknown arc id {id}"),
            ));
        }
    }
    Ok(cert)
}

// ---------------------------------------------------------------------
// Vector-valued shortest path
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VvspJson {
    problem: String,
    num_vertices: u32,
    dim: u32,
    edges: Vec<VEdgeJson>,
    source: u32,
    target: u32,
    budget_sq: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VEdgeJson {
    id: u32,
    u: u32,
    v: u32,
    w: BTreeMap<u32, u64>,
}

pub fn vvsp_to_json(inst: &VvspInstance) -> String {
    render(&VvspJson {
        problem: "vvsp".into(),
        num_vertices: inst.graph.num_vertices(),
        dim: inst.graph.dim(),
        edges: inst
            .graph
            .edges()
            .iter()
            .map(|e| VEdgeJson {
                id: e.id.0,
                u: e.u.0,
                v: e.v.0,
                w: e.w.entries().collect(),
            })
            .collect(),
        source: inst.source.0,
        target: inst.target.0,
        budget_sq: inst.budget_sq,
    })
}

pub fn vvsp_from_json(text: &str) -> Result<VvspInstance, SchemaError> {
    let doc: VvspJson = parse(text)?;
    check_tag("vvsp", &doc.problem)?;
    if doc.num_vertices == 0 {
        return Err(SchemaError::at(
            "num_vertices",
            "graph needs at least one vertex",
        ));
    }
    for (name, vertex) in [("source", doc.source), ("target", doc.target)] {
        if vertex >= doc.num_vertices {
            return Err(SchemaError::at(name, "vertex out of range"));
        }
    }
    let mut graph = VGraph::new(doc.num_vertices, doc.dim);
    let mut seen_pairs = BTreeMap::new();
    let mut big_weight = 0;
    for (i, e) in doc.edges.iter().enumerate() {
        check_edge_shape("edges", i, e.id, e.u, e.v, doc.num_vertices)?;
        let key = (e.u.min(e.v), e.u.max(e.v));
        if let Some(j) = seen_pairs.insert(key, i) {
            return Err(SchemaError::at(
                format!("edges[{i}]"),
                format!(
                    "parallel edge: edges[{j}] already joins {} and {}",
                    e.u, e.v
                ),
            ));
        }
        let w = SparseVec::from_entries(doc.dim, e.w.iter().map(|(&c, &v)| (c, v)))
            .map_err(|bad| SchemaError::at(format!("edges[{i}].w"), bad.to_string()))?;
        big_weight = big_weight.max(e.w.values().copied().max().unwrap_or(0));
        graph.add_edge(VertexId(e.u), VertexId(e.v), w);
    }
    // The branch load isn't part of the wire format; on built instances it
    // is exactly the largest entry, and it only drives rendering.
    Ok(VvspInstance {
        graph,
        source: VertexId(doc.source),
        target: VertexId(doc.target),
        budget_sq: doc.budget_sq,
        big_weight,
    })
}

pub fn path_cert_to_json(cert: &PathCertificate) -> String {
    #[derive(Serialize)]
    struct PathJson {
        path: Vec<u32>,
    }
    render(&PathJson {
        path: cert.vertices.iter().map(|v| v.0).collect(),
    })
}

pub fn path_cert_from_json(text: &str) -> Result<PathCertificate, SchemaError> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct PathJson {
        path: Vec<u32>,
    }
    let doc: PathJson = parse(text)?;
    Ok(PathCertificate::new(doc.path.into_iter().map(VertexId)))
}

/// Like [`path_cert_from_json`], additionally requiring every vertex to
/// exist in the instance.
pub fn path_cert_from_json_checked(
    text: &str,
    inst: &VvspInstance,
) -> Result<PathCertificate, SchemaError> {
    let cert = path_cert_from_json(text)?;
    for (i, &vertex) in cert.vertices.iter().enumerate() {
        if vertex.0 >= inst.graph.num_vertices() {
            return Err(SchemaError::at(
                format!("path[{i}]"),
                format!("unknown vertex {vertex}"),
            ));
        }
    }
    Ok(cert)
}

// ---------------------------------------------------------------------
// Construction labels
// ---------------------------------------------------------------------

/// The on-disk form of construction labels: everything extraction needs
/// (and display names for rendering), keyed by plain integers.
///
/// `edge_literals` names the literal carried by a labeled edge (tree and
/// path instances), `var_gadget_edges` a variable's positive/negative
/// rigid arcs (flow), `var_gadget_vertices` its branch vertices (path).
/// `vertex_labels` is display-only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelsFile {
    pub num_vars: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub edge_literals: BTreeMap<u32, LiteralJson>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub var_gadget_edges: BTreeMap<u32, PosNeg>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub var_gadget_vertices: BTreeMap<u32, PosNeg>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vertex_labels: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiteralJson {
    pub var: u32,
    pub negated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosNeg {
    pub pos: u32,
    pub neg: u32,
}

impl LiteralJson {
    pub fn display(&self) -> String {
        format!("{}x{}", if self.negated { "~" } else { "" }, self.var)
    }
}

impl LabelsFile {
    pub fn from_rst(labels: &RstLabels, num_vars: u32) -> Self {
        LabelsFile {
            num_vars,
            edge_literals: literal_map(&labels.edge_literals),
            var_gadget_edges: BTreeMap::new(),
            var_gadget_vertices: BTreeMap::new(),
            vertex_labels: labels.vertex_roles.iter().map(|r| r.label()).collect(),
        }
    }

    pub fn from_flow(labels: &FlowLabels, num_vars: u32) -> Self {
        LabelsFile {
            num_vars,
            edge_literals: BTreeMap::new(),
            var_gadget_edges: labels
                .var_arcs
                .iter()
                .map(|(&var, &(pos, neg))| {
                    (
                        var,
                        PosNeg {
                            pos: pos.0,
                            neg: neg.0,
                        },
                    )
                })
                .collect(),
            var_gadget_vertices: BTreeMap::new(),
            vertex_labels: labels.vertex_roles.iter().map(|r| r.label()).collect(),
        }
    }

    pub fn from_vvsp(labels: &VvspLabels, num_vars: u32) -> Self {
        LabelsFile {
            num_vars,
            edge_literals: literal_map(&labels.edge_literals),
            var_gadget_edges: BTreeMap::new(),
            var_gadget_vertices: labels
                .var_branches
                .iter()
                .map(|(&var, &(pos, neg))| {
                    (
                        var,
                        PosNeg {
                            pos: pos.0,
                            neg: neg.0,
                        },
                    )
                })
                .collect(),
            vertex_labels: labels.vertex_roles.iter().map(|r| r.label()).collect(),
        }
    }

    /// Labels usable by tree-certificate extraction. Display names are not
    /// recoverable from disk as structured roles, so `vertex_roles` comes
    /// back empty; extraction never looks at it.
    pub fn rst_labels(&self) -> RstLabels {
        RstLabels {
            edge_literals: edge_literal_map(&self.edge_literals),
            vertex_roles: vec![],
        }
    }

    /// Labels usable by flow-certificate extraction, checked to cover
    /// every variable (extraction requires both arcs of each).
    pub fn flow_labels(&self) -> Result<FlowLabels, SchemaError> {
        Ok(FlowLabels {
            var_arcs: pos_neg_map("var_gadget_edges", &self.var_gadget_edges, self.num_vars)?,
            vertex_roles: vec![],
        })
    }

    /// Labels usable by path-certificate extraction, checked to cover
    /// every variable (extraction requires both branches of each).
    pub fn vvsp_labels(&self) -> Result<VvspLabels, SchemaError> {
        Ok(VvspLabels {
            var_branches: pos_neg_map(
                "var_gadget_vertices",
                &self.var_gadget_vertices,
                self.num_vars,
            )?
            .into_iter()
            .map(|(var, (pos, neg))| (var, (VertexId(pos.0), VertexId(neg.0))))
            .collect(),
            edge_literals: edge_literal_map(&self.edge_literals),
            vertex_roles: vec![],
        })
    }
}

fn literal_map(literals: &BTreeMap<EdgeId, Literal>) -> BTreeMap<u32, LiteralJson> {
    literals
        .iter()
        .map(|(&id, &lit)| {
            (
                id.0,
                LiteralJson {
                    var: lit.var,
                    negated: lit.negated,
                },
            )
        })
        .collect()
}

fn edge_literal_map(literals: &BTreeMap<u32, LiteralJson>) -> BTreeMap<EdgeId, Literal> {
    literals
        .iter()
        .map(|(&id, &lit)| {
            let literal = if lit.negated {
                Literal::negative(lit.var)
            } else {
                Literal::positive(lit.var)
            };
            (EdgeId(id), literal)
        })
        .collect()
}

fn pos_neg_map(
    key: &str,
    map: &BTreeMap<u32, PosNeg>,
    num_vars: u32,
) -> Result<BTreeMap<u32, (EdgeId, EdgeId)>, SchemaError> {
    for var in 1..=num_vars {
        if !map.contains_key(&var) {
            return Err(SchemaError::at(key, format!("missing variable x{var}")));
        }
    }
    for &var in map.keys() {
        if var == 0 || var > num_vars {
            return Err(SchemaError::at(
                format!("{key}.{var}"),
                format!("variable out of range 1..={num_vars}"),
            ));
        }
    }
    Ok(map
        .iter()
        .map(|(&var, &pn)| (var, (EdgeId(pn.pos), EdgeId(pn.neg))))
        .collect())
}

pub fn labels_to_json(labels: &LabelsFile) -> String {
    render(labels)
}

pub fn labels_from_json(text: &str) -> Result<LabelsFile, SchemaError> {
    parse(text)
}

// ---------------------------------------------------------------------
// Shared validation
// ---------------------------------------------------------------------

fn check_tag(expected: &str, found: &str) -> Result<(), SchemaError> {
    if expected == found {
        Ok(())
    } else {
        Err(SchemaError::at(
            "problem",
            format!("expected \"{expected}\", found \"{found}\""),
        ))
    }
}

fn check_edge_shape(
    key: &str,
    index: usize,
    id: u32,
    u: u32,
    v: u32,
    num_vertices: u32,
) -> Result<(), SchemaError> {
    if id != index as u32 {
        return Err(SchemaError::at(
            format!("{key}[{index}].id"),
            format!("ids must be dense and in order; expected {index}, found {id}"),
        ));
    }
    if u == v {
        return Err(SchemaError::at(
            format!("{key}[{index}]"),
            format!("self-loop at {u}"),
        ));
    }
    for vertex in [u, v] {
        if vertex >= num_vertices {
            return Err(SchemaError::at(
                format!("{key}[{index}]"),
                format!("vertex {vertex} out of range (num_vertices = {num_vertices})"),
            ));
        }
    }
    Ok(())
}
