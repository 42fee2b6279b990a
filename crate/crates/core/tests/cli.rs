//! Black-box tests of the binary: documented outputs are byte-exact,
//! reports are deterministic across runs, and exit codes separate user
//! errors from breached invariants.

use std::io::Write;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_multipath"))
}

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("reports are utf-8")
}

#[test]
fn homology_reports_match_the_documented_examples() {
    assert_eq!(
        stdout_of(&["homology", &fixture("h_graph.edges")]),
        "{\"betti\":{\"2\":2}}\n"
    );
    assert_eq!(
        stdout_of(&[
            "homology",
            &fixture("line3_noncoherent.edges"),
            "--algebra",
            &fixture("dual_numbers.json"),
        ]),
        "{\"betti\":{\"0\":2,\"1\":2}}\n"
    );
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let args = [
        "homology",
        &fixture("h_graph.edges"),
        "--field",
        "gf5",
        "--full",
    ];
    let first = stdout_of(&args);
    let second = stdout_of(&args);
    assert_eq!(first, second);
    let single = bin()
        .args(args)
        .env("MULTIPATH_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(first, String::from_utf8(single.stdout).unwrap());
}

#[test]
fn full_reports_include_dims_ranks_and_euler_characteristic() {
    let out = stdout_of(&[
        "homology",
        &fixture("line3_noncoherent.edges"),
        "--algebra",
        &fixture("dual_numbers.json"),
        "--full",
    ]);
    assert_eq!(
        out,
        "{\"betti\":{\"0\":2,\"1\":2},\"chi\":0,\"dims\":{\"0\":8,\"1\":8},\"ranks\":{\"0\":6}}\n"
    );
}

#[test]
fn sign_subcommands_verify_and_relate_the_assignments() {
    let verify = stdout_of(&["verify-signs", &fixture("p3.edges")]);
    assert_eq!(verify, "{\"ok\":true,\"squares\":18}\n");
    let iso: serde_json::Value =
        serde_json::from_str(&stdout_of(&["sign-iso", &fixture("y1.edges")])).unwrap();
    assert_eq!(iso["isomorphic"], serde_json::Value::Bool(true));
    assert!(iso["eta"].as_array().is_some());
}

#[test]
fn morse_subcommand_accepts_matching_files() {
    assert_eq!(
        stdout_of(&[
            "morse",
            &fixture("h_graph.edges"),
            "--matching",
            &fixture("h_graph_matching.txt"),
        ]),
        "{\"acyclic\":true,\"betti\":{\"2\":2},\"conclusive\":true,\"critical\":{\"2\":2},\"pairs\":5}\n"
    );
    // the perfect matching kills everything
    assert_eq!(
        stdout_of(&[
            "morse",
            &fixture("y1.edges"),
            "--matching",
            &fixture("y1_matching.txt"),
        ]),
        "{\"acyclic\":true,\"betti\":{},\"conclusive\":true,\"critical\":{},\"pairs\":3}\n"
    );
    // greedy fallback without a file
    let greedy: serde_json::Value =
        serde_json::from_str(&stdout_of(&["morse", &fixture("y2.edges")])).unwrap();
    assert_eq!(greedy["acyclic"], serde_json::Value::Bool(true));
}

#[test]
fn chromatic_and_comparison_subcommands_report() {
    assert_eq!(
        stdout_of(&["chromatic", &fixture("digon.edges"), "--field", "gf5"]),
        "{\"betti\":{\"1\":1,\"2\":1},\"variant\":\"hat\"}\n"
    );
    assert_eq!(
        stdout_of(&[
            "compare-chromatic",
            "-n",
            "3",
            "--algebra",
            &fixture("dual_numbers.json"),
        ]),
        "{\"line\":true,\"n\":3,\"polygon\":true}\n"
    );
    let les: serde_json::Value =
        serde_json::from_str(&stdout_of(&["check-les", &fixture("y2.edges")])).unwrap();
    assert_eq!(les["holds"], serde_json::Value::Bool(true));
}

#[test]
fn hochschild_subcommands_report_dimensions() {
    assert_eq!(
        stdout_of(&[
            "hochschild",
            "--field",
            "gf2",
            "--algebra",
            &fixture("dual_numbers.json"),
        ]),
        "{\"hh\":{\"0\":2,\"1\":2,\"2\":2,\"3\":2,\"4\":2}}\n"
    );
    assert_eq!(
        stdout_of(&[
            "polygon-check",
            "-n",
            "3",
            "--algebra",
            &fixture("dual_numbers.json"),
        ]),
        "{\"betti\":{\"0\":2,\"1\":1,\"2\":1,\"3\":2},\"hh\":{\"0\":2,\"1\":1,\"2\":1},\"holds\":true,\"n\":3}\n"
    );
}

#[test]
fn hasse_dump_and_table_outputs_have_their_shapes() {
    let dot = stdout_of(&["homology", &fixture("y2.edges"), "--emit-hasse"]);
    assert!(dot.starts_with("digraph hasse {"));
    assert!(dot.trim_end().ends_with('}'));

    let dump: serde_json::Value = serde_json::from_str(&stdout_of(&[
        "homology",
        &fixture("single_vertex.edges"),
        "--dump",
    ]))
    .unwrap();
    assert_eq!(dump["dims"]["0"], serde_json::Value::from(1));

    let table = stdout_of(&["homology", &fixture("h_graph.edges"), "--format", "table"]);
    assert_eq!(table, "betti:\n  2  2\n");
}

#[test]
fn selftest_prints_one_line_per_suite() {
    let out = stdout_of(&["selftest"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines.iter().all(|l| l.starts_with("PASS ")));
}

#[test]
fn exit_codes_separate_user_errors_from_success() {
    // help and version are successes
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    // usage problems are user errors
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    // unreadable and unparsable inputs are user errors
    assert_eq!(
        run(&["homology", "/nonexistent/input.edges"]).status.code(),
        Some(1)
    );
    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "vertices 2\n0 7").unwrap();
    let out = run(&["homology", bad.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vertex"));
    // so are composite fields and broken matchings
    assert_eq!(
        run(&["homology", &fixture("y2.edges"), "--field", "gf6"])
            .status
            .code(),
        Some(1)
    );
    let mut shared = tempfile::NamedTempFile::new().unwrap();
    writeln!(shared, "0x0 0x1\n0x1 0x3").unwrap();
    assert_eq!(
        run(&[
            "morse",
            &fixture("i3.edges"),
            "--matching",
            shared.path().to_str().unwrap(),
        ])
        .status
        .code(),
        Some(1)
    );
}

#[test]
fn timing_goes_to_stderr_not_stdout() {
    let out = run(&["homology", &fixture("y2.edges")]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(!stdout.contains("elapsed"));
    assert!(stderr.contains("elapsed"));
}
