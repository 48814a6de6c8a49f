//! Drives the installed binary end to end: payload shapes, exit codes, and
//! the documented gate-count laws as seen from the command line.

use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn write_scratch(name: &str, content: &str) -> PathBuf {
    let path = scratch(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn fqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqc")).args(args).output().expect("binary runs")
}

fn payload(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn fermionic_circuit(width: usize, gates: Value) -> String {
    json!({ "kind": "fermionic", "width": width, "ancillas": 0, "gates": gates }).to_string()
}

#[test]
fn transpile_reports_the_defect_count_law() {
    for (j, k) in [(0usize, 1usize), (0, 4), (2, 5)] {
        let input = write_scratch(
            &format!("hop_{j}_{k}.json"),
            &fermionic_circuit(
                6,
                json!([{ "name": "hop", "params": [0.3, -0.55], "targets": [j, k] }]),
            ),
        );
        let out = fqc(&["transpile", input.to_str().unwrap(), "--encoding", "standard", "--verify"]);
        assert_eq!(out.status.code(), Some(0));
        let p = payload(&out);
        assert_eq!(p["report"]["gates"], json!(2 * (k - j - 1) + 1));
        assert_eq!(p["verification"]["ran"], json!(true));
        assert!(p["verification"]["deviation"].as_f64().unwrap() <= 1e-10);
    }
}

#[test]
fn transpile_of_an_empty_circuit_is_empty() {
    let input = write_scratch("empty.json", &fermionic_circuit(4, json!([])));
    let out = fqc(&["transpile", input.to_str().unwrap(), "--encoding", "standard"]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    assert_eq!(p["report"]["gates"], json!(0));
    assert_eq!(p["circuit"]["gates"], json!([]));
}

#[test]
fn tree_transpile_of_a_single_mode_gate_stays_logarithmic() {
    let input = write_scratch(
        "single.json",
        &fermionic_circuit(8, json!([{ "name": "phase_n", "params": [0.9], "targets": [5] }])),
    );
    let out = fqc(&["transpile", input.to_str().unwrap(), "--encoding", "tree", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    assert!(p["report"]["gates"].as_u64().unwrap() <= 12);
}

#[test]
fn transpiled_output_reparses_and_simulates() {
    let input = write_scratch(
        "roundtrip.json",
        &fermionic_circuit(
            5,
            json!([
                { "name": "hop", "params": [0.3, -0.55], "targets": [0, 3] },
                { "name": "phase_n", "params": [1.1], "targets": [2] },
            ]),
        ),
    );
    let emitted = scratch("roundtrip_out.json");
    let out = fqc(&[
        "transpile",
        input.to_str().unwrap(),
        "--encoding",
        "tree",
        "--out",
        emitted.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let sim = fqc(&["simulate", emitted.to_str().unwrap(), "--basis", "0"]);
    assert_eq!(sim.status.code(), Some(0));
    let p = payload(&sim);
    assert!((p["norm"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn malformed_circuit_exits_two() {
    let input = write_scratch("garbage.json", "{\"kind\": \"fermionic\"");
    let out = fqc(&["transpile", input.to_str().unwrap(), "--encoding", "standard"]);
    assert_eq!(out.status.code(), Some(2));
    let out = fqc(&["simulate", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_suite_exits_two_with_usage() {
    let out = fqc(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("possible values"), "usage text on stderr: {stderr}");
}

#[test]
fn verify_single_suite_payload_lists_checks() {
    let out = fqc(&["verify", "--suite", "codes", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    assert_eq!(p["suite"], json!("codes"));
    assert_eq!(p["passed"], json!(true));
    assert!(p["checks"].as_array().unwrap().len() >= 3);
    for check in p["checks"].as_array().unwrap() {
        assert!(check["name"].is_string());
        assert!(check["passed"].is_boolean());
    }
}

fn graph_file(name: &str, vertices: usize, edges: &[(usize, usize)]) -> PathBuf {
    let edges: Vec<Value> = edges.iter().map(|&(a, b)| json!([a, b])).collect();
    write_scratch(name, &json!({ "vertices": vertices, "edges": edges }).to_string())
}

#[test]
fn superfast_dimension_and_stabilizers() {
    let triangle = graph_file("triangle.json", 3, &[(0, 1), (1, 2), (2, 0)]);
    let out = fqc(&["superfast", "dim", triangle.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(payload(&out)["dimension"], json!(4));

    // trees carry no cycle stabilizers
    let path = graph_file("path.json", 4, &[(0, 1), (1, 2), (2, 3)]);
    let out = fqc(&["superfast", "stabilizers", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(payload(&out)["stabilizers"], json!([]));

    let k4 = graph_file("k4.json", 4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    let out = fqc(&["superfast", "stabilizers", k4.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(payload(&out)["count"], json!(3));
}

#[test]
fn superfast_rejects_bad_graphs() {
    let disconnected = graph_file("disconnected.json", 3, &[(0, 1)]);
    let out = fqc(&["superfast", "dim", disconnected.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let self_loop = graph_file("self_loop.json", 2, &[(0, 0), (0, 1)]);
    let out = fqc(&["superfast", "stabilizers", self_loop.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn superfast_transpile_emits_a_runnable_circuit() {
    let triangle = graph_file("triangle_t.json", 3, &[(0, 1), (1, 2), (2, 0)]);
    let emitted = scratch("sf_out.json");
    let out = fqc(&[
        "superfast",
        "transpile",
        triangle.to_str().unwrap(),
        "--modes",
        "1,2",
        "--gate",
        "hop",
        "--params",
        "0.3,-0.55",
        "--out",
        emitted.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let sim = fqc(&["simulate", emitted.to_str().unwrap(), "--basis", "0"]);
    assert_eq!(sim.status.code(), Some(0));

    // a non-edge is refused as bad input
    let path = graph_file("path_t.json", 3, &[(0, 1), (1, 2)]);
    let out = fqc(&["superfast", "transpile", path.to_str().unwrap(), "--modes", "0,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn protocol_rows_and_forced_branches() {
    let out = fqc(&["protocol", "run", "--trials", "5", "--seed", "9", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    let rows = p["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for row in rows {
        assert!((row["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert!((row["probability"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    }

    let out = fqc(&["protocol", "run", "--trials", "3", "--force-branch", "-1,-i", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    for row in p["rows"].as_array().unwrap() {
        assert_eq!(row["branch"], json!("-1,-i"));
    }

    let out = fqc(&["protocol", "run", "--force-branch", "up,down"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn protocol_payload_is_seed_deterministic() {
    let run = || fqc(&["protocol", "run", "--trials", "4", "--seed", "11", "--json"]);
    assert_eq!(run().stdout, run().stdout);
}

#[test]
fn code_distance_and_pairing_errors() {
    let out = fqc(&["code", "distance", "--family", "shor-like", "--l", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    assert_eq!(p["distance"], json!(2));
    assert_eq!(p["qubits"], json!(4));

    // an exhausted search is a failed check, not bad input
    let out = fqc(&["code", "distance", "--l", "3", "--max-weight", "2"]);
    assert_eq!(out.status.code(), Some(1));

    let out = fqc(&["code", "stabilizers", "--tau", "0,1,2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = fqc(&["code", "stabilizers"]);
    assert_eq!(out.status.code(), Some(2));
}
