//! Gadget compiler from 3-CNF satisfiability to three graph problems.
//!
//! The crate turns a 3-CNF formula into equivalent instances of
//!
//! * spanning tree with forbidden edge pairs and a cost budget ([`rst`]),
//! * maximum flow where selected arcs must run saturated or empty ([`flow`]),
//! * shortest path under a Euclidean bound on vector-valued weights ([`vvsp`]),
//!
//! and back: every accepted certificate decodes to a satisfying assignment.
//! Each target module exposes the same five-operation surface — `build`,
//! `verify`, `solve`, `extract`, plus a constructive `*_from_assignment`
//! direction used for cross-checking. [`baselines`] holds the classical
//! unrestricted algorithms (MST, shortest path, max flow) whose answers the
//! gadget variants are measured against, [`json`] the wire formats, and
//! [`dot`] Graphviz rendering for eyeballing small instances.

pub mod baselines;
pub mod cnf;
pub mod dot;
pub mod fixtures;
pub mod flow;
pub mod graph;
pub mod json;
pub mod rst;
pub mod vvsp;
