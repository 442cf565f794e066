//! Graphviz DOT rendering for the three instance types.
//!
//! Output is one node line per vertex and one edge line per edge, in id
//! order, so the text is deterministic and the structural counts are
//! visible with a line scan. Heavy edges (weight equal to the instance's
//! big weight) are bold; rigid all-or-nothing arcs are dashed. When a
//! labels file is supplied, vertices get their construction names and
//! labeled edges show their literal.

use std::fmt::Write as _;

use crate::flow::FlowInstance;
use crate::graph::{EdgeId, SparseVec};
use crate::json::LabelsFile;
use crate::rst::RstInstance;
use crate::vvsp::VvspInstance;

fn node_lines(out: &mut String, n: u32, labels: Option<&LabelsFile>) {
    for i in 0..n {
        let name = labels
            .and_then(|l| l.vertex_labels.get(i as usize))
            .cloned()
            .unwrap_or_else(|| i.to_string());
        writeln!(out, "  {i} [label=\"{name}\"];").unwrap();
    }
}

fn literal_suffix(labels: Option<&LabelsFile>, id: EdgeId) -> String {
    labels
        .and_then(|l| l.edge_literals.get(&id.0))
        .map(|lit| format!(" {}", lit.display()))
        .unwrap_or_default()
}

/// Renders a restricted-spanning-tree instance as an undirected graph;
/// heavy fallback edges are bold.
pub fn rst_to_dot(inst: &RstInstance, labels: Option<&LabelsFile>) -> String {
    let mut out = String::from("graph rst {\n");
    node_lines(&mut out, inst.graph.num_vertices(), labels);
    for e in inst.graph.edges() {
        let style = if e.w == inst.big_weight {
            ", style=bold"
        } else {
            ""
        };
        let lit = literal_suffix(labels, e.id);
        writeln!(
            out,
            "  {} -- {} [label=\"{}{}\"{}];",
            e.u.0, e.v.0, e.w, lit, style
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// Renders a flow instance as a directed graph; rigid all-or-nothing arcs
/// are dashed, and arc labels show capacities.
pub fn flow_to_dot(inst: &FlowInstance, labels: Option<&LabelsFile>) -> String {
    let mut out = String::from("digraph flow {\n");
    node_lines(&mut out, inst.net.num_vertices(), labels);
    for a in inst.net.arcs() {
        let style = if inst.all_or_nothing.contains(&a.id) {
            ", style=dashed"
        } else {
            ""
        };
        writeln!(
            out,
            "  {} -> {} [label=\"{}\"{}];",
            a.from.0, a.to.0, a.cap, style
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

fn vector_label(w: &SparseVec) -> String {
    if w.is_zero() {
        return "0".into();
    }
    w.entries()
        .map(|(coord, val)| {
            if val == 1 {
                format!("e{coord}")
            } else {
                format!("{val}*e{coord}")
            }
        })
        .collect::<Vec<_>>()
        .join("+")
}

/// Renders a vector-valued shortest-path instance as an undirected graph;
/// edges carrying the big branch load are bold.
pub fn vvsp_to_dot(inst: &VvspInstance, labels: Option<&LabelsFile>) -> String {
    let mut out = String::from("graph vvsp {\n");
    node_lines(&mut out, inst.graph.num_vertices(), labels);
    for e in inst.graph.edges() {
        let heavy = inst.big_weight > 0 && e.w.entries().any(|(_, val)| val == inst.big_weight);
        let style = if heavy { ", style=bold" } else { "" };
        let lit = literal_suffix(labels, e.id);
        let w = vector_label(&e.w);
        writeln!(
            out,
            "  {} -- {} [label=\"{}{}\"{}];",
            e.u.0, e.v.0, w, lit, style
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
