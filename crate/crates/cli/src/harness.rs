//! The round-trip harness: generate formulas, decide them by brute force,
//! and check that all three reductions' solvers return the same verdict —
//! with every YES backed by a certificate whose extracted assignment
//! satisfies the formula, and every satisfiable formula backed by accepted
//! constructive certificates.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::time::Instant;

use np_gadget_core::cnf::{brute_force_sat, random_cnf, CnfInstance};
use np_gadget_core::fixtures::{example_b, unsat_u3};
use np_gadget_core::flow::{
    flow_build, flow_extract, flow_from_assignment, flow_solve_with, FlowSolveOptions,
};
use np_gadget_core::graph::SearchBudgetExceeded;
use np_gadget_core::rst::{
    rst_build, rst_extract, rst_solve_with, rst_verify, tree_from_assignment, RstSolveOptions,
};
use np_gadget_core::vvsp::{
    path_from_assignment, vvsp_build, vvsp_extract, vvsp_solve_with, vvsp_verify, VvspSolveOptions,
};
use np_gadget_core::{flow::flow_verify, graph::DEFAULT_NODE_LIMIT};

/// What to sweep: random formulas drawn over a grid of sizes, plus the
/// built-in fixtures.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Variable counts, cycled over the grid (inclusive).
    pub vars: RangeInclusive<u32>,
    /// Clause counts, cycled over the grid (inclusive).
    pub clauses: RangeInclusive<u32>,
    /// Number of random instances.
    pub count: u32,
    /// Base seed; instance `i` uses `seed + i`.
    pub seed: u64,
    /// Per-solver search budget.
    pub node_limit: u64,
    /// Include the unsatisfiable 8-clause fixture even when the clause
    /// range doesn't reach 8. (The satisfiable fixture is always run.)
    pub include_u3: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            vars: 3..=5,
            clauses: 1..=6,
            count: 50,
            seed: 42,
            node_limit: DEFAULT_NODE_LIMIT,
            include_u3: false,
        }
    }
}

/// One formula's results across the oracle and the three reductions.
#[derive(Debug, Clone)]
pub struct RoundtripRow {
    pub name: String,
    pub fingerprint: String,
    pub num_vars: u32,
    pub num_clauses: u32,
    /// Brute-force oracle verdict.
    pub oracle_sat: bool,
    pub rst_yes: bool,
    pub flow_yes: bool,
    pub vvsp_yes: bool,
    /// Every YES certificate was accepted by its verifier and extracted
    /// to a satisfying assignment (vacuously true with no YES answers).
    pub extractions_ok: bool,
    /// Certificates built from the oracle witness were all accepted
    /// (vacuously true for unsatisfiable formulas).
    pub constructive_ok: bool,
    pub millis: u128,
    /// The formula, for reproducing failures.
    pub dimacs: String,
}

impl RoundtripRow {
    /// The harness's pass condition: all four verdicts agree and every
    /// extraction satisfied the formula.
    pub fn pass(&self) -> bool {
        self.rst_yes == self.oracle_sat
            && self.flow_yes == self.oracle_sat
            && self.vvsp_yes == self.oracle_sat
            && self.extractions_ok
    }
}

#[derive(Debug, Clone)]
pub struct RoundtripReport {
    pub rows: Vec<RoundtripRow>,
}

impl RoundtripReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(RoundtripRow::pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RoundtripRow> {
        self.rows.iter().filter(|r| !r.pass())
    }

    /// Plain-text table, one row per formula, in run order.
    pub fn table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<6} {:<16} {:>2} {:>2}  {:<6} {:<4} {:<4} {:<4} {:<8} {:<12} {:>6}",
            "name",
            "fingerprint",
            "V",
            "C",
            "oracle",
            "rst",
            "flow",
            "vvsp",
            "extract",
            "constructive",
            "ms"
        )
        .unwrap();
        for r in &self.rows {
            let yn = |b: bool| if b { "yes" } else { "no" };
            let ok = |b: bool| if b { "ok" } else { "FAIL" };
            writeln!(
                out,
                "{:<6} {:<16} {:>2} {:>2}  {:<6} {:<4} {:<4} {:<4} {:<8} {:<12} {:>6}",
                r.name,
                r.fingerprint,
                r.num_vars,
                r.num_clauses,
                if r.oracle_sat { "sat" } else { "unsat" },
                yn(r.rst_yes),
                yn(r.flow_yes),
                yn(r.vvsp_yes),
                ok(r.extractions_ok),
                ok(r.constructive_ok),
                r.millis,
            )
            .unwrap();
        }
        out
    }
}

/// Runs one formula through the oracle and all three reductions.
pub fn roundtrip_one(
    name: &str,
    cnf: &CnfInstance,
    node_limit: u64,
) -> Result<RoundtripRow, SearchBudgetExceeded> {
    let started = Instant::now();
    let oracle = brute_force_sat(cnf).expect("sweep formulas stay within the exhaustive limit");
    let oracle_sat = oracle.is_satisfiable();
    let mut extractions_ok = true;

    let (rst_inst, rst_labels) = rst_build(cnf, None).expect("default heavy weight is valid");
    let rst = rst_solve_with(
        &rst_inst,
        &RstSolveOptions {
            node_limit,
            contract: true,
        },
    )?
    .certificate;
    if let Some(cert) = &rst {
        extractions_ok &= rst_verify(&rst_inst, cert)
            .expect("solver ids are in range")
            .is_accept();
        let a = rst_extract(&rst_labels, cert, cnf.num_vars())
            .expect("solver trees respect forbidden pairs");
        extractions_ok &= cnf
            .evaluate(&a)
            .expect("extraction matches the variable count");
    }

    let (flow_inst, flow_labels) = flow_build(cnf);
    let flow = flow_solve_with(
        &flow_inst,
        &FlowSolveOptions {
            pattern_limit: node_limit,
            exhaustive: false,
        },
    )?
    .certificate;
    if let Some(cert) = &flow {
        extractions_ok &= flow_verify(&flow_inst, cert)
            .expect("solver ids are in range")
            .is_accept();
        let a = flow_extract(&flow_labels, cert, cnf.num_vars())
            .expect("accepted flows decide every variable");
        extractions_ok &= cnf
            .evaluate(&a)
            .expect("extraction matches the variable count");
    }

    let (vvsp_inst, vvsp_labels) = vvsp_build(cnf, None).expect("default branch load is valid");
    let vvsp = vvsp_solve_with(&vvsp_inst, &VvspSolveOptions { node_limit })?.certificate;
    if let Some(cert) = &vvsp {
        extractions_ok &= vvsp_verify(&vvsp_inst, cert).is_accept();
        let a = vvsp_extract(&vvsp_labels, cert, cnf.num_vars())
            .expect("accepted paths traverse every diamond");
        extractions_ok &= cnf
            .evaluate(&a)
            .expect("extraction matches the variable count");
    }

    let constructive_ok = match oracle.witness() {
        None => true,
        Some(w) => {
            let tree = tree_from_assignment(cnf, w).expect("witness satisfies");
            let flow_cert = flow_from_assignment(cnf, w).expect("witness satisfies");
            let path = path_from_assignment(cnf, w).expect("witness satisfies");
            rst_verify(&rst_inst, &tree)
                .expect("constructed ids are in range")
                .is_accept()
                && flow_verify(&flow_inst, &flow_cert)
                    .expect("constructed ids are in range")
                    .is_accept()
                && vvsp_verify(&vvsp_inst, &path).is_accept()
        }
    };

    Ok(RoundtripRow {
        name: name.to_string(),
        fingerprint: cnf.fingerprint(),
        num_vars: cnf.num_vars(),
        num_clauses: cnf.num_clauses(),
        oracle_sat,
        rst_yes: rst.is_some(),
        flow_yes: flow.is_some(),
        vvsp_yes: vvsp.is_some(),
        extractions_ok,
        constructive_ok,
        millis: started.elapsed().as_millis(),
        dimacs: cnf.to_dimacs(),
    })
}

/// The exact formula list a sweep runs, in order: the fixtures, then
/// `count` random formulas cycling the size grid with per-index seeds.
pub fn sweep_formulas(cfg: &SweepConfig) -> Vec<(String, CnfInstance)> {
    let mut formulas = vec![("B".to_string(), example_b())];
    if cfg.include_u3 || cfg.clauses.contains(&8) {
        formulas.push(("U3".to_string(), unsat_u3()));
    }
    let v_span = cfg.vars.end() - cfg.vars.start() + 1;
    let c_span = cfg.clauses.end() - cfg.clauses.start() + 1;
    for i in 0..cfg.count {
        let combo = i % (v_span * c_span);
        let v = cfg.vars.start() + combo % v_span;
        let c = cfg.clauses.start() + (combo / v_span) % c_span;
        let cnf = random_cnf(v, c, cfg.seed.wrapping_add(u64::from(i)))
            .expect("sweep ranges satisfy the generator preconditions");
        formulas.push((format!("r{i:03}"), cnf));
    }
    formulas
}

/// Runs the fixtures plus `count` seeded random formulas and collects the
/// per-formula rows. Fully deterministic for a fixed configuration
/// (timings aside, which never affect pass/fail).
pub fn run_sweep(cfg: &SweepConfig) -> Result<RoundtripReport, SearchBudgetExceeded> {
    let mut rows = Vec::new();
    for (name, cnf) in sweep_formulas(cfg) {
        rows.push(roundtrip_one(&name, &cnf, cfg.node_limit)?);
    }
    Ok(RoundtripReport { rows })
}
