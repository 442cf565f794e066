//! Command-line front end: file-based reduce / verify / solve / extract /
//! roundtrip / dot / baseline pipelines over the three gadget problems.
//!
//! Exit codes, never conflated: 0 = yes/success, 1 = no/reject,
//! 2 = malformed input, 3 = search budget exceeded.

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use np_gadget_core::baselines::{dijkstra, edmonds_karp, prim_mst, PathOutcome};
use np_gadget_core::cnf::{parse_dimacs, Assignment, CnfInstance};
use np_gadget_core::dot::{flow_to_dot, rst_to_dot, vvsp_to_dot};
use np_gadget_core::flow::{
    flow_build, flow_extract, flow_solve_with, flow_verify, FlowSolveOptions, FlowVerdict,
};
use np_gadget_core::graph::DEFAULT_NODE_LIMIT;
use np_gadget_core::json::{
    flow_cert_from_json, flow_cert_from_json_checked, flow_cert_to_json, flow_from_json,
    flow_to_json, labels_from_json, labels_to_json, path_cert_from_json,
    path_cert_from_json_checked, path_cert_to_json, rst_from_json, rst_to_json,
    tree_cert_from_json, tree_cert_from_json_checked, tree_cert_to_json, vvsp_from_json,
    vvsp_to_json, LabelsFile,
};
use np_gadget_core::rst::{
    rst_build, rst_extract, rst_solve_with, rst_verify, RstSolveOptions, RstVerdict,
};
use np_gadget_core::vvsp::{
    vvsp_build, vvsp_extract, vvsp_solve_with, vvsp_verify, VvspSolveOptions, VvspVerdict,
};

use crate::harness::{run_sweep, SweepConfig};

/// Environment variable supplying the default search budget when
/// `--node-limit` is absent.
pub const NODE_LIMIT_ENV: &str = "NP_GADGET_NODE_LIMIT";

#[derive(Parser)]
#[command(
    name = "np-gadget",
    version,
    about = "Compile 3-SAT formulas into three NP-complete graph problems, \
             verify certificates in polynomial time, solve desk-scale \
             instances exactly, and map certificates back to assignments."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Which gadget problem a command operates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    /// Spanning tree under forbidden edge pairs and a cost budget
    Rst,
    /// Flow with all-or-nothing arcs and a target value
    Flow,
    /// Vector-weighted path under a squared-norm budget
    Vvsp,
}

/// Which classical unrestricted algorithm `baseline` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// Minimum spanning tree (Prim), forbidden pairs ignored
    Mst,
    /// Scalarized shortest path (Dijkstra), vector budget ignored
    Sp,
    /// Maximum flow (Edmonds-Karp), all-or-nothing arcs ignored
    Maxflow,
}

#[derive(Subcommand)]
pub enum Command {
    /// Compile a DIMACS 3-CNF file into a problem instance
    Reduce {
        #[arg(long, value_enum)]
        problem: Problem,
        /// DIMACS file with exactly three distinct literals per clause
        #[arg(long)]
        cnf: PathBuf,
        /// Override the big weight M (rst: heavy edges, default 4C+2;
        /// vvsp: branch load, default ceil(C^3/2)+1); flow takes none
        #[arg(long)]
        param_m: Option<u64>,
        /// Where to write the instance JSON
        #[arg(long)]
        out: PathBuf,
        /// Where to write the labels JSON (needed later by extract)
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Check a certificate against an instance (exit 0 accept, 1 reject)
    Verify {
        #[arg(long, value_enum)]
        problem: Problem,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Decide an instance exactly (exit 0 yes, 1 no, 3 budget exceeded)
    Solve {
        #[arg(long, value_enum)]
        problem: Problem,
        #[arg(long)]
        instance: PathBuf,
        /// Where to write the certificate on YES (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Search budget (default: NP_GADGET_NODE_LIMIT or 10000000)
        #[arg(long)]
        node_limit: Option<u64>,
    },
    /// Read the encoded assignment off an accepted certificate
    Extract {
        #[arg(long, value_enum)]
        problem: Problem,
        /// Labels JSON written by reduce
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
        /// Also evaluate the assignment on this DIMACS file
        /// (exit 1 if it does not satisfy)
        #[arg(long)]
        check_cnf: Option<PathBuf>,
    },
    /// Sweep random formulas plus fixtures through all three reductions
    /// and compare every verdict with brute force (exit 0 iff all agree)
    Roundtrip {
        /// Variable-count range, inclusive (e.g. 3..5 or 4)
        #[arg(long, default_value = "3..5")]
        vars: String,
        /// Clause-count range, inclusive (e.g. 1..6 or 4)
        #[arg(long, default_value = "1..6")]
        clauses: String,
        /// Number of random instances
        #[arg(long, default_value_t = 50)]
        count: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Search budget (default: NP_GADGET_NODE_LIMIT or 10000000)
        #[arg(long)]
        node_limit: Option<u64>,
        /// Force the unsatisfiable 8-clause fixture into the sweep even
        /// when the clause range doesn't reach 8
        #[arg(long)]
        fixtures: bool,
    },
    /// Render an instance as Graphviz DOT on stdout
    Dot {
        #[arg(long, value_enum)]
        problem: Problem,
        #[arg(long)]
        instance: PathBuf,
        /// Labels JSON for vertex names and literal edge labels
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Run the classical algorithm with the restriction ignored
    Baseline {
        #[arg(value_enum)]
        algo: Algo,
        #[arg(long)]
        instance: PathBuf,
    },
}

/// Executes a parsed command, returning the process exit code. `Err` means
/// malformed input (exit 2, printed by the caller).
pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Reduce {
            problem,
            cnf,
            param_m,
            out,
            labels,
        } => cmd_reduce(problem, &cnf, param_m, &out, labels.as_deref()),
        Command::Verify {
            problem,
            instance,
            certificate,
        } => cmd_verify(problem, &instance, &certificate),
        Command::Solve {
            problem,
            instance,
            out,
            node_limit,
        } => cmd_solve(problem, &instance, out.as_deref(), node_limit),
        Command::Extract {
            problem,
            labels,
            certificate,
            check_cnf,
        } => cmd_extract(problem, &labels, &certificate, check_cnf.as_deref()),
        Command::Roundtrip {
            vars,
            clauses,
            count,
            seed,
            node_limit,
            fixtures,
        } => cmd_roundtrip(&vars, &clauses, count, seed, node_limit, fixtures),
        Command::Dot {
            problem,
            instance,
            labels,
        } => cmd_dot(problem, &instance, labels.as_deref()),
        Command::Baseline { algo, instance } => cmd_baseline(algo, &instance),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_cnf(path: &Path) -> Result<CnfInstance> {
    parse_dimacs(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// `--node-limit` flag, else the environment variable, else the default.
fn resolve_node_limit(flag: Option<u64>) -> Result<u64> {
    if let Some(limit) = flag {
        return Ok(limit);
    }
    match std::env::var(NODE_LIMIT_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .with_context(|| format!("{NODE_LIMIT_ENV}={text} is not a valid search budget")),
        Err(_) => Ok(DEFAULT_NODE_LIMIT),
    }
}

/// Parses an inclusive range written `a..b`, or a single number `a`.
fn parse_range(text: &str) -> Result<RangeInclusive<u32>> {
    let (lo, hi) = match text.split_once("..") {
        Some((lo, hi)) => (lo, hi),
        None => (text, text),
    };
    let lo: u32 = lo
        .trim()
        .parse()
        .with_context(|| format!("bad range `{text}`"))?;
    let hi: u32 = hi
        .trim()
        .parse()
        .with_context(|| format!("bad range `{text}`"))?;
    if lo > hi {
        bail!("bad range `{text}`: {lo} > {hi}");
    }
    Ok(lo..=hi)
}

fn cmd_reduce(
    problem: Problem,
    cnf_path: &Path,
    param_m: Option<u64>,
    out: &Path,
    labels_out: Option<&Path>,
) -> Result<u8> {
    let cnf = read_cnf(cnf_path)?;
    let (instance_json, labels_file, summary) = match problem {
        Problem::Rst => {
            let (inst, labels) = rst_build(&cnf, param_m)?;
            let summary = format!(
                "rst: vertices={} edges={} forbidden_pairs={} budget={}",
                inst.graph.num_vertices(),
                inst.graph.num_edges(),
                inst.forbidden.len(),
                inst.budget
            );
            (
                rst_to_json(&inst),
                LabelsFile::from_rst(&labels, cnf.num_vars()),
                summary,
            )
        }
        Problem::Flow => {
            if param_m.is_some() {
                bail!("the flow reduction has no big-weight parameter; drop --param-m");
            }
            let (inst, labels) = flow_build(&cnf);
            let summary = format!(
                "flow: vertices={} arcs={} rigid_arcs={} target={}",
                inst.net.num_vertices(),
                inst.net.arcs().len(),
                inst.all_or_nothing.len(),
                inst.target
            );
            (
                flow_to_json(&inst),
                LabelsFile::from_flow(&labels, cnf.num_vars()),
                summary,
            )
        }
        Problem::Vvsp => {
            let (inst, labels) = vvsp_build(&cnf, param_m)?;
            let summary = format!(
                "vvsp: vertices={} edges={} dim={} budget_sq={}",
                inst.graph.num_vertices(),
                inst.graph.num_edges(),
                inst.graph.dim(),
                inst.budget_sq
            );
            (
                vvsp_to_json(&inst),
                LabelsFile::from_vvsp(&labels, cnf.num_vars()),
                summary,
            )
        }
    };
    write(out, &instance_json)?;
    if let Some(path) = labels_out {
        write(path, &labels_to_json(&labels_file))?;
    }
    println!("{summary}");
    Ok(0)
}

fn cmd_verify(problem: Problem, instance: &Path, certificate: &Path) -> Result<u8> {
    let cert_text = read(certificate)?;
    let (accept, message) = match problem {
        Problem::Rst => {
            let inst = rst_from_json(&read(instance)?)?;
            let cert = tree_cert_from_json_checked(&cert_text, &inst)?;
            match rst_verify(&inst, &cert)? {
                RstVerdict::Accept { cost } => (true, format!("Accept cost={cost}")),
                RstVerdict::Reject(reason) => (false, format!("Reject: {reason}")),
            }
        }
        Problem::Flow => {
            let inst = flow_from_json(&read(instance)?)?;
            let cert = flow_cert_from_json_checked(&cert_text, &inst)?;
            match flow_verify(&inst, &cert)? {
                FlowVerdict::Accept { value } => (true, format!("Accept value={value}")),
                FlowVerdict::Reject(reason) => (false, format!("Reject: {reason}")),
            }
        }
        Problem::Vvsp => {
            let inst = vvsp_from_json(&read(instance)?)?;
            let cert = path_cert_from_json_checked(&cert_text, &inst)?;
            match vvsp_verify(&inst, &cert) {
                VvspVerdict::Accept { cost_sq } => (true, format!("Accept cost_sq={cost_sq}")),
                VvspVerdict::Reject(reason) => (false, format!("Reject: {reason}")),
            }
        }
    };
    println!("{message}");
    Ok(if accept { 0 } else { 1 })
}

fn cmd_solve(
    problem: Problem,
    instance: &Path,
    out: Option<&Path>,
    node_limit: Option<u64>,
) -> Result<u8> {
    let limit = resolve_node_limit(node_limit)?;
    let outcome = match problem {
        Problem::Rst => {
            let inst = rst_from_json(&read(instance)?)?;
            match rst_solve_with(
                &inst,
                &RstSolveOptions {
                    node_limit: limit,
                    contract: true,
                },
            ) {
                Err(err) => Err(err),
                Ok(solution) => Ok(solution.certificate.map(|cert| {
                    let cost = match rst_verify(&inst, &cert).expect("solver ids are in range") {
                        RstVerdict::Accept { cost } => cost,
                        RstVerdict::Reject(_) => unreachable!("solver output verifies"),
                    };
                    (tree_cert_to_json(&cert), format!("YES cost={cost}"))
                })),
            }
        }
        Problem::Flow => {
            let inst = flow_from_json(&read(instance)?)?;
            match flow_solve_with(
                &inst,
                &FlowSolveOptions {
                    pattern_limit: limit,
                    exhaustive: false,
                },
            ) {
                Err(err) => Err(err),
                Ok(solution) => Ok(solution.certificate.map(|cert| {
                    let value = match flow_verify(&inst, &cert).expect("solver ids are in range") {
                        FlowVerdict::Accept { value } => value,
                        FlowVerdict::Reject(_) => unreachable!("solver output verifies"),
                    };
                    (flow_cert_to_json(&cert), format!("YES value={value}"))
                })),
            }
        }
        Problem::Vvsp => {
            let inst = vvsp_from_json(&read(instance)?)?;
            match vvsp_solve_with(&inst, &VvspSolveOptions { node_limit: limit }) {
                Err(err) => Err(err),
                Ok(solution) => Ok(solution.certificate.map(|cert| {
                    let cost_sq = match vvsp_verify(&inst, &cert) {
                        VvspVerdict::Accept { cost_sq } => cost_sq,
                        VvspVerdict::Reject(_) => unreachable!("solver output verifies"),
                    };
                    (path_cert_to_json(&cert), format!("YES cost_sq={cost_sq}"))
                })),
            }
        }
    };
    match outcome {
        Err(err) => {
            println!(
                "search budget exceeded: explored {} (limit {})",
                err.explored, err.limit
            );
            Ok(3)
        }
        Ok(None) => {
            println!("NO (search space exhausted, no certificate exists)");
            Ok(1)
        }
        Ok(Some((cert_json, message))) => {
            match out {
                Some(path) => write(path, &cert_json)?,
                None => print!("{cert_json}"),
            }
            println!("{message}");
            Ok(0)
        }
    }
}

fn cmd_extract(
    problem: Problem,
    labels: &Path,
    certificate: &Path,
    check_cnf: Option<&Path>,
) -> Result<u8> {
    let labels = labels_from_json(&read(labels)?)?;
    let cert_text = read(certificate)?;
    let assignment: Assignment = match problem {
        Problem::Rst => {
            let cert = tree_cert_from_json(&cert_text)?;
            rst_extract(&labels.rst_labels(), &cert, labels.num_vars)?
        }
        Problem::Flow => {
            let cert = flow_cert_from_json(&cert_text)?;
            flow_extract(&labels.flow_labels()?, &cert, labels.num_vars)?
        }
        Problem::Vvsp => {
            let cert = path_cert_from_json(&cert_text)?;
            vvsp_extract(&labels.vvsp_labels()?, &cert, labels.num_vars)?
        }
    };
    for (i, value) in assignment.values().iter().enumerate() {
        println!("x{}={}", i + 1, value);
    }
    if let Some(path) = check_cnf {
        let cnf = read_cnf(path)?;
        let satisfies = cnf.evaluate(&assignment)?;
        println!("satisfies: {satisfies}");
        if !satisfies {
            return Ok(1);
        }
    }
    Ok(0)
}

fn cmd_roundtrip(
    vars: &str,
    clauses: &str,
    count: u32,
    seed: u64,
    node_limit: Option<u64>,
    fixtures: bool,
) -> Result<u8> {
    let clauses = parse_range(clauses)?;
    let cfg = SweepConfig {
        vars: parse_range(vars)?,
        include_u3: fixtures || clauses.contains(&8),
        clauses,
        count,
        seed,
        node_limit: resolve_node_limit(node_limit)?,
    };
    match run_sweep(&cfg) {
        Err(err) => {
            println!(
                "search budget exceeded: explored {} (limit {})",
                err.explored, err.limit
            );
            Ok(3)
        }
        Ok(report) => {
            print!("{}", report.table());
            if report.all_pass() {
                println!("all {} rows pass", report.rows.len());
                Ok(0)
            } else {
                for row in report.failures() {
                    println!(
                        "\nFAIL {} — formula for reproduction:\n{}",
                        row.name, row.dimacs
                    );
                }
                Ok(1)
            }
        }
    }
}

fn cmd_dot(problem: Problem, instance: &Path, labels: Option<&Path>) -> Result<u8> {
    let labels = match labels {
        Some(path) => Some(labels_from_json(&read(path)?)?),
        None => None,
    };
    let text = match problem {
        Problem::Rst => rst_to_dot(&rst_from_json(&read(instance)?)?, labels.as_ref()),
        Problem::Flow => flow_to_dot(&flow_from_json(&read(instance)?)?, labels.as_ref()),
        Problem::Vvsp => vvsp_to_dot(&vvsp_from_json(&read(instance)?)?, labels.as_ref()),
    };
    print!("{text}");
    Ok(0)
}

fn cmd_baseline(algo: Algo, instance: &Path) -> Result<u8> {
    match algo {
        Algo::Mst => {
            let inst = rst_from_json(&read(instance)?)?;
            match prim_mst(&inst.graph) {
                Ok(mst) => {
                    println!("mst cost={} (restriction ignored)", mst.total_weight);
                    Ok(0)
                }
                Err(err) => {
                    println!("no spanning tree: {err}");
                    Ok(1)
                }
            }
        }
        Algo::Sp => {
            let inst = vvsp_from_json(&read(instance)?)?;
            match dijkstra(&inst.graph.scalarized(), inst.source, inst.target) {
                PathOutcome::Reached { cost, .. } => {
                    println!("sp cost={cost} (restriction ignored)");
                    Ok(0)
                }
                PathOutcome::Unreachable => {
                    println!("no path: target unreachable");
                    Ok(1)
                }
            }
        }
        Algo::Maxflow => {
            let inst = flow_from_json(&read(instance)?)?;
            let flow = edmonds_karp(&inst.net);
            println!("maxflow value={} (restriction ignored)", flow.value);
            Ok(0)
        }
    }
}
