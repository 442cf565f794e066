//! Exit-code and flag behavior of the binary: 0 for YES/success, 1 for a
//! clean NO or rejection, 2 for malformed input, 3 for an exhausted search
//! budget — and the file formats, environment knob, and rendering paths
//! that the acceptance pipeline does not touch.

use std::path::{Path, PathBuf};
use std::process::Command;

use np_gadget_core::fixtures::{example_b, unsat_u3};

struct CliRun {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> CliRun {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_np-gadget"));
    cmd.args(args).env_remove("NP_GADGET_NODE_LIMIT");
    for (key, value) in env {
        cmd.env(key, value);
    }
    let output = cmd
        .output()
        .expect("the binary is built alongside the tests");
    CliRun {
        code: output.status.code().expect("the binary exits normally"),
        stdout: String::from_utf8_lossy(&output.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
    }
}

fn run(args: &[&str]) -> CliRun {
    run_with_env(args, &[])
}

/// A scratch directory pre-loaded with both fixture formulas.
struct Scratch {
    dir: tempfile::TempDir,
    b_cnf: PathBuf,
    u3_cnf: PathBuf,
}

impl Scratch {
    fn new() -> Self {
        let dir = tempfile::tempdir().expect("temp dir");
        let b_cnf = dir.path().join("b.cnf");
        let u3_cnf = dir.path().join("u3.cnf");
        std::fs::write(&b_cnf, example_b().to_dimacs()).expect("write formula");
        std::fs::write(&u3_cnf, unsat_u3().to_dimacs()).expect("write formula");
        Scratch { dir, b_cnf, u3_cnf }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Reduces a formula and returns the instance and labels paths.
    fn reduce(&self, problem: &str, cnf: &Path, stem: &str) -> (PathBuf, PathBuf) {
        let inst = self.path(&format!("{stem}-{problem}.json"));
        let labels = self.path(&format!("{stem}-{problem}-labels.json"));
        let r = run(&[
            "reduce",
            "--problem",
            problem,
            "--cnf",
            s(cnf),
            "--out",
            s(&inst),
            "--labels",
            s(&labels),
        ]);
        assert_eq!(r.code, 0, "reduce failed: {}", r.stderr);
        (inst, labels)
    }
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp paths")
}

#[test]
fn reduce_prints_size_summaries_and_writes_both_files() {
    let scratch = Scratch::new();
    let cases = [
        (
            "rst",
            "rst: vertices=18 edges=29 forbidden_pairs=8 budget=18",
        ),
        ("flow", "flow: vertices=31 arcs=49 rigid_arcs=8 target=16"),
        ("vvsp", "vvsp: vertices=36 edges=47 dim=8 budget_sq=4420"),
    ];
    for (problem, summary) in cases {
        let inst = scratch.path(&format!("{problem}.json"));
        let labels = scratch.path(&format!("{problem}-labels.json"));
        let r = run(&[
            "reduce",
            "--problem",
            problem,
            "--cnf",
            s(&scratch.b_cnf),
            "--out",
            s(&inst),
            "--labels",
            s(&labels),
        ]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert_eq!(r.stdout.trim_end(), summary);
        let inst_json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&inst).unwrap()).unwrap();
        assert_eq!(inst_json["problem"], problem);
        let labels_json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&labels).unwrap()).unwrap();
        assert_eq!(labels_json["num_vars"], 4);
    }
}

#[test]
fn verify_separates_rejection_from_malformed_input() {
    let scratch = Scratch::new();
    let (inst, _) = scratch.reduce("rst", &scratch.b_cnf, "b");

    // A structurally well-formed certificate that is simply wrong: exit 1.
    let bad_tree = scratch.path("bad-tree.json");
    std::fs::write(&bad_tree, "{\"tree\": [0, 1, 2]}\n").unwrap();
    let r = run(&[
        "verify",
        "--problem",
        "rst",
        "--instance",
        s(&inst),
        "--certificate",
        s(&bad_tree),
    ]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.starts_with("Reject: "), "got: {}", r.stdout);

    // A certificate naming an edge the instance does not have: exit 2.
    let unknown_edge = scratch.path("unknown-edge.json");
    std::fs::write(&unknown_edge, "{\"tree\": [0, 1, 999]}\n").unwrap();
    let r = run(&[
        "verify",
        "--problem",
        "rst",
        "--instance",
        s(&inst),
        "--certificate",
        s(&unknown_edge),
    ]);
    assert_eq!(r.code, 2);
    assert!(
        r.stderr.contains("unknown edge id 999"),
        "got: {}",
        r.stderr
    );

    // JSON that does not parse at all: exit 2, with the failing path named.
    let garbage = scratch.path("garbage.json");
    std::fs::write(&garbage, "{\"tree\": [0, \"x\"]}\n").unwrap();
    let r = run(&[
        "verify",
        "--problem",
        "rst",
        "--instance",
        s(&inst),
        "--certificate",
        s(&garbage),
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("tree"), "got: {}", r.stderr);

    // An instance file for the wrong problem: exit 2.
    let (flow_inst, _) = scratch.reduce("flow", &scratch.b_cnf, "b");
    let r = run(&[
        "verify",
        "--problem",
        "rst",
        "--instance",
        s(&flow_inst),
        "--certificate",
        s(&bad_tree),
    ]);
    assert_eq!(r.code, 2);
}

#[test]
fn solve_exit_codes_distinguish_no_from_budget() {
    let scratch = Scratch::new();
    let (inst, _) = scratch.reduce("rst", &scratch.u3_cnf, "u3");

    // A proven NO: exit 1.
    let r = run(&["solve", "--problem", "rst", "--instance", s(&inst)]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.starts_with("NO"), "got: {}", r.stdout);

    // An exhausted search budget: exit 3, not a NO.
    let r = run(&[
        "solve",
        "--problem",
        "rst",
        "--instance",
        s(&inst),
        "--node-limit",
        "3",
    ]);
    assert_eq!(r.code, 3);
    assert!(
        r.stdout.contains("search budget exceeded"),
        "got: {}",
        r.stdout
    );
}

#[test]
fn node_limit_comes_from_the_flag_then_the_environment() {
    let scratch = Scratch::new();
    let (inst, _) = scratch.reduce("vvsp", &scratch.b_cnf, "b");

    // The environment variable alone throttles the search.
    let r = run_with_env(
        &["solve", "--problem", "vvsp", "--instance", s(&inst)],
        &[("NP_GADGET_NODE_LIMIT", "5")],
    );
    assert_eq!(r.code, 3, "{}{}", r.stdout, r.stderr);

    // An explicit flag beats the environment.
    let r = run_with_env(
        &[
            "solve",
            "--problem",
            "vvsp",
            "--instance",
            s(&inst),
            "--node-limit",
            "1000000",
        ],
        &[("NP_GADGET_NODE_LIMIT", "5")],
    );
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("YES cost_sq="), "got: {}", r.stdout);

    // Garbage in the environment is malformed input, not a silent default.
    let r = run_with_env(
        &["solve", "--problem", "vvsp", "--instance", s(&inst)],
        &[("NP_GADGET_NODE_LIMIT", "a lot")],
    );
    assert_eq!(r.code, 2);
    assert!(
        r.stderr.contains("NP_GADGET_NODE_LIMIT"),
        "got: {}",
        r.stderr
    );
}

#[test]
fn solve_writes_the_certificate_where_asked() {
    let scratch = Scratch::new();
    let (inst, _) = scratch.reduce("flow", &scratch.b_cnf, "b");
    let cert = scratch.path("b-flow-cert.json");
    let r = run(&[
        "solve",
        "--problem",
        "flow",
        "--instance",
        s(&inst),
        "--out",
        s(&cert),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.trim_end(), "YES value=16");
    let cert_json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert!(cert_json["flow"].is_object());

    // Without --out the certificate goes to stdout, before the verdict.
    let r = run(&["solve", "--problem", "flow", "--instance", s(&inst)]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with('{'), "got: {}", r.stdout);
    assert!(
        r.stdout.trim_end().ends_with("YES value=16"),
        "got: {}",
        r.stdout
    );
}

#[test]
fn extract_flags_contradictions_and_unsatisfying_assignments() {
    let scratch = Scratch::new();
    let (_, labels) = scratch.reduce("rst", &scratch.b_cnf, "b");

    // Find two tree edges labeled with complementary literals; a
    // certificate containing both cannot name an assignment: exit 2.
    let labels_json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&labels).unwrap()).unwrap();
    let edge_literals = labels_json["edge_literals"].as_object().unwrap();
    let mut pos_x1 = None;
    let mut neg_x1 = None;
    for (edge, lit) in edge_literals {
        if lit["var"] == 1 {
            if lit["negated"] == false && pos_x1.is_none() {
                pos_x1 = Some(edge.clone());
            }
            if lit["negated"] == true && neg_x1.is_none() {
                neg_x1 = Some(edge.clone());
            }
        }
    }
    let (pos_x1, neg_x1) = (pos_x1.unwrap(), neg_x1.unwrap());
    let contradictory = scratch.path("contradictory.json");
    std::fs::write(
        &contradictory,
        format!("{{\"tree\": [{pos_x1}, {neg_x1}]}}\n"),
    )
    .unwrap();
    let r = run(&[
        "extract",
        "--problem",
        "rst",
        "--labels",
        s(&labels),
        "--certificate",
        s(&contradictory),
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("x1"), "got: {}", r.stderr);

    // A path visiting every positive branch names the all-false
    // assignment, which does not satisfy the formula: exit 1.
    let (_, vvsp_labels) = scratch.reduce("vvsp", &scratch.b_cnf, "b");
    let vl: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&vvsp_labels).unwrap()).unwrap();
    let branches = vl["var_gadget_vertices"].as_object().unwrap();
    let mut vertices: Vec<u64> = (1..=4)
        .map(|v| branches[&v.to_string()]["pos"].as_u64().unwrap())
        .collect();
    vertices.sort_unstable();
    let all_false = scratch.path("all-false-path.json");
    let list: Vec<String> = vertices.iter().map(u64::to_string).collect();
    std::fs::write(&all_false, format!("{{\"path\": [{}]}}\n", list.join(", "))).unwrap();
    let r = run(&[
        "extract",
        "--problem",
        "vvsp",
        "--labels",
        s(&vvsp_labels),
        "--certificate",
        s(&all_false),
        "--check-cnf",
        s(&scratch.b_cnf),
    ]);
    assert_eq!(r.code, 1, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("x1=false"), "got: {}", r.stdout);
    assert!(
        r.stdout.trim_end().ends_with("satisfies: false"),
        "got: {}",
        r.stdout
    );
}

#[test]
fn reduce_rejects_bad_weight_parameters() {
    let scratch = Scratch::new();
    let out = scratch.path("weighted.json");
    let reduce = |problem: &str, m: &str| {
        run(&[
            "reduce",
            "--problem",
            problem,
            "--cnf",
            s(&scratch.b_cnf),
            "--param-m",
            m,
            "--out",
            s(&out),
        ])
    };

    // The flow gadget has no big-weight knob at all.
    let r = reduce("flow", "33");
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("--param-m"), "got: {}", r.stderr);

    // Too-small weights break the gadget arithmetic and are refused.
    let r = reduce("rst", "17");
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("17"), "got: {}", r.stderr);
    let r = reduce("vvsp", "32");
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("32"), "got: {}", r.stderr);

    // The smallest valid weights are accepted.
    let r = reduce("rst", "18");
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = reduce("vvsp", "33");
    assert_eq!(r.code, 0, "{}", r.stderr);
}

#[test]
fn roundtrip_prints_the_table_and_passes() {
    let r = run(&[
        "roundtrip",
        "--vars",
        "3..4",
        "--clauses",
        "2",
        "--count",
        "4",
        "--seed",
        "7",
    ]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("name"), "missing header: {}", r.stdout);
    assert!(r.stdout.contains("all 5 rows pass"), "got: {}", r.stdout);

    // Bad ranges are malformed input.
    let r = run(&["roundtrip", "--vars", "5..3", "--count", "1"]);
    assert_eq!(r.code, 2);
    assert!(
        r.stderr.contains("5..3") || r.stderr.contains("5 > 3"),
        "got: {}",
        r.stderr
    );
}

#[test]
fn dot_renders_all_three_gadgets() {
    let scratch = Scratch::new();

    let (inst, labels) = scratch.reduce("rst", &scratch.b_cnf, "b");
    let r = run(&[
        "dot",
        "--problem",
        "rst",
        "--instance",
        s(&inst),
        "--labels",
        s(&labels),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("graph rst {"), "got: {}", r.stdout);
    assert!(r.stdout.contains("style=bold"), "heavy edges render bold");
    assert!(
        r.stdout.contains("x1") && r.stdout.contains("~x1"),
        "literal labels present"
    );

    let (inst, _) = scratch.reduce("flow", &scratch.b_cnf, "b");
    let r = run(&["dot", "--problem", "flow", "--instance", s(&inst)]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("digraph flow {"), "got: {}", r.stdout);
    assert!(
        r.stdout.contains("style=dashed"),
        "rigid arcs render dashed"
    );

    let (inst, _) = scratch.reduce("vvsp", &scratch.b_cnf, "b");
    let r = run(&["dot", "--problem", "vvsp", "--instance", s(&inst)]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("graph vvsp {"), "got: {}", r.stdout);
    assert!(r.stdout.contains("33*e0"), "vector weights render sparsely");
}

#[test]
fn baselines_run_on_instance_files() {
    let scratch = Scratch::new();

    let (inst, _) = scratch.reduce("rst", &scratch.b_cnf, "b");
    let r = run(&["baseline", "mst", "--instance", s(&inst)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.trim_end(), "mst cost=17 (restriction ignored)");

    let (inst, _) = scratch.reduce("flow", &scratch.b_cnf, "b");
    let r = run(&["baseline", "maxflow", "--instance", s(&inst)]);
    assert_eq!(r.code, 0);
    assert_eq!(
        r.stdout.trim_end(),
        "maxflow value=16 (restriction ignored)"
    );

    let (inst, _) = scratch.reduce("vvsp", &scratch.b_cnf, "b");
    let r = run(&["baseline", "sp", "--instance", s(&inst)]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.trim_end(), "sp cost=136 (restriction ignored)");
}

#[test]
fn missing_files_and_unknown_flags_are_malformed_input() {
    let scratch = Scratch::new();
    let r = run(&[
        "solve",
        "--problem",
        "rst",
        "--instance",
        s(&scratch.path("nope.json")),
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("nope.json"), "got: {}", r.stderr);

    let r = run(&["solve", "--problem", "mst", "--instance", "x.json"]);
    assert_eq!(r.code, 2, "unknown problem names are usage errors");

    let r = run(&["frobnicate"]);
    assert_eq!(r.code, 2, "unknown subcommands are usage errors");
}
