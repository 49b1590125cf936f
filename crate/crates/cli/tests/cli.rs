use std::io::Write;
use std::process::{Command, Stdio};

use polycalc_cli::scenario::{Generate, Kind};
use polycalc_cli::{generate_instance, parse_scenario, run_scenario, to_canonical, Status};
use serde_json::{json, Value};

const KINDS: [Kind; 8] = [
    Kind::Lp,
    Kind::Polyhedron,
    Kind::PolyhedronPair,
    Kind::PolyhedronPairWithCommonPoint,
    Kind::Function,
    Kind::FunctionPair,
    Kind::QualifiedFenchel,
    Kind::MapPair,
];

fn gen(seed: u64, kind: Kind) -> Generate {
    Generate {
        seed,
        kind,
        dims: 3,
        rows: 6,
        bound: 5,
    }
}

fn run_bin(args: &[&str], stdin: &str) -> (i32, Value) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_polycalc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    let value = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), value)
}

fn run_json(command: &str, payload: Value) -> polycalc_cli::Report {
    run_scenario(&parse_scenario(command, &payload.to_string()).unwrap())
}

#[test]
fn separates_half_planes() {
    let r = run_json(
        "separate",
        json!({"P": {"A": [["0", "1"]], "b": ["0"]}, "Omega": {"A": [["0", "-1"]], "b": ["0"]}}),
    );
    assert_eq!(r.status, Status::Ok);
    assert!(r.verified);
    assert_eq!(r.certificates["v"], json!(["0/1", "1/1"]));
    assert_eq!(r.certificates["alpha"], json!("0/1"));
}

#[test]
fn disjoint_indicator_pair_reports_failed_qualification() {
    let r = run_json(
        "fenchel",
        json!({
            "f": {"pieces": [{"c": [0], "d": 0}], "domain": {"A": [[1]], "b": [-1]}},
            "g": {"pieces": [{"c": [0], "d": 0}], "domain": {"A": [[-1]], "b": [-1]}},
            "A": [[1]],
        }),
    );
    assert_eq!(r.status, Status::QualificationFailed);
    assert_eq!(r.certificates["p_hat"], json!("+inf"));
    // The dual objective grows without bound along y* ≥ 0.
    assert_eq!(r.certificates["d_hat"], json!("+inf"));
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn absolute_value_duality() {
    let r = run_json(
        "fenchel",
        json!({"f": {"pieces": [{"c": [1], "d": 0}, {"c": [-1], "d": 0}]}, "g": {"pieces": [{"c": [1], "d": 0}]}, "A": [[1]]}),
    );
    assert_eq!(r.status, Status::Ok);
    assert!(r.verified);
    assert_eq!(r.certificates["p_hat"], json!("0/1"));
    assert_eq!(r.certificates["dual_y"], json!(["-1/1"]));
    let r = run_json(
        "fenchel",
        json!({"f": {"pieces": [{"c": [2], "d": 0}, {"c": [-2], "d": 0}]}, "g": {"pieces": [{"c": [1], "d": 0}]}, "A": [[1]]}),
    );
    assert_eq!(r.certificates["p_hat"], json!("0/1"));
    assert_eq!(r.certificates["d_hat"], json!("0/1"));
    assert_eq!(r.certificates["dual_y"], json!(["-1/1"]));
}

#[test]
fn zero_denominator_is_invalid_input() {
    let (code, report) = run_bin(&["ri-point"], r#"{"P": {"A": [["1/0"]], "b": [0]}}"#);
    assert_eq!(code, 2);
    assert_eq!(report["status"], json!("invalid-input"));
}

#[test]
fn schema_violations_are_invalid_input() {
    for (cmd, text) in [
        ("ri-point", "not json"),
        ("ri-point", r#"{"Q": {}}"#),
        ("ri-point", r#"{"P": {"A": [[1.5]], "b": [0]}}"#),
        (
            "separate",
            r#"{"P": {"A": [[1, 2]], "b": [0]}, "Omega": {"A": [[1]], "b": [0]}}"#,
        ),
        ("normal-cone", r#"{"P": {"A": [[1]], "b": [0]}, "x": [1]}"#),
    ] {
        let (code, report) = run_bin(&[cmd], text);
        assert_eq!(code, 2, "{cmd} {text}");
        assert_eq!(report["status"], json!("invalid-input"));
    }
}

#[test]
fn empty_polyhedron_is_infeasible() {
    let r = run_json("ri-point", json!({"P": {"A": [[1], [-1]], "b": [0, -1]}}));
    assert_eq!(r.status, Status::Infeasible);
    assert_eq!(r.certificates["ineq_farkas"], json!(["1/1", "1/1"]));
}

#[test]
fn generation_is_deterministic_and_round_trips() {
    for kind in KINDS {
        for seed in 1..6 {
            let a = to_canonical(&generate_instance(&gen(seed, kind)).unwrap());
            let b = to_canonical(&generate_instance(&gen(seed, kind)).unwrap());
            assert_eq!(a, b);
            let parsed = parse_scenario("run", &a).unwrap();
            assert_eq!(to_canonical(&parsed), a);
        }
    }
}

#[test]
fn generated_scenarios_run_cleanly() {
    for kind in KINDS {
        for seed in 1..4 {
            let s = generate_instance(&gen(seed, kind)).unwrap();
            let r = run_scenario(&s);
            assert_ne!(
                r.status,
                Status::InvalidInput,
                "{kind:?} seed {seed}: {:?}",
                r.message
            );
            assert!(r.verified, "{kind:?} seed {seed}");
            if kind == Kind::QualifiedFenchel {
                assert_eq!(r.certificates["qualification_holds"], json!(true));
                assert_eq!(r.certificates["equality"], json!(true));
            }
        }
    }
}

#[test]
fn common_point_is_planted_in_both_sets() {
    for seed in 1..10 {
        let s = generate_instance(&gen(seed, Kind::PolyhedronPairWithCommonPoint)).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        let x = &v["payload"]["x"];
        for set in ["P", "Omega"] {
            let r = run_json("normal-cone", json!({"P": v["payload"][set], "x": x}));
            assert_eq!(r.status, Status::Ok, "seed {seed} {set}");
        }
    }
}

#[test]
fn binary_generate_then_run() {
    let out = Command::new(env!("CARGO_BIN_EXE_polycalc"))
        .args([
            "generate",
            "--kind",
            "qualified-fenchel",
            "--seed",
            "7",
            "--pretty",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let (code, report) = run_bin(&["run"], &text);
    assert_eq!(code, 0);
    assert_eq!(report["command"], json!("fenchel"));
    let (code, _) = run_bin(&["fenchel"], &text);
    assert_eq!(code, 0);
    let (code, _) = run_bin(&["separate"], &text);
    assert_eq!(code, 2);
}

#[test]
fn check_suite_exit_codes() {
    let (code, report) = run_bin(&["check-suite", "--count", "3", "--criteria", "1,9"], "");
    assert_eq!(code, 0);
    assert_eq!(
        report["certificates"]["criteria"].as_array().unwrap().len(),
        2
    );
    let (code, report) = run_bin(
        &[
            "check-suite",
            "--count",
            "1",
            "--criteria",
            "6",
            "--sequential",
        ],
        "",
    );
    assert_eq!(code, 1);
    assert_eq!(report["verified"], json!(false));
}

#[test]
fn rule_commands() {
    let abs = json!({"pieces": [{"c": [1], "d": 0}, {"c": [-1], "d": 0}]});
    let r = run_json("subdiff", json!({"f": abs, "x": [0]}));
    let mut rows = r.certificates["subdifferential"]["A"]
        .as_array()
        .unwrap()
        .clone();
    rows.sort_by_key(|v| v.to_string());
    assert_eq!(rows, vec![json!(["-1/1"]), json!(["1/1"])]);
    assert_eq!(
        r.certificates["subdifferential"]["b"],
        json!(["1/1", "1/1"])
    );
    let r = run_json("subdiff-sum", json!({"f1": abs, "f2": abs, "x": [0]}));
    assert_eq!(r.certificates["rule_holds"], json!(true));
    let r = run_json("subdiff-chain", json!({"f": abs, "A": [[2]], "x": [0]}));
    assert_eq!(r.certificates["rule_holds"], json!(true));
    let r = run_json("conjugate", json!({"f": abs, "x_star": ["1/2"]}));
    assert_eq!(r.certificates["value"], json!("0/1"));
    let r = run_json("conjugate", json!({"f": abs, "x_star": [2]}));
    assert_eq!(r.certificates["value"], json!("+inf"));
    let r = run_json("infconv", json!({"f": abs, "g": abs, "x": [3]}));
    assert_eq!(r.certificates["value"], json!("3/1"));
    let r = run_json("conj-sum", json!({"f": abs, "g": abs, "x_star": [1]}));
    assert_eq!(r.certificates["value"], json!("0/1"));
    let r = run_json("conj-chain", json!({"g": abs, "A": [[2]], "x_star": [1]}));
    assert_eq!(r.certificates["value"], json!("0/1"));
    let interval = json!({"A": [[1], [-1]], "b": [1, 1]});
    let r = run_json("support", json!({"Omega": interval, "x_star": [3]}));
    assert_eq!(r.certificates["value"], json!("3/1"));
    let r = run_json(
        "support",
        json!({"P": {"A": [[1], [-1]], "b": [0, 1]}, "Omega": {"A": [[1], [-1]], "b": [1, 0]}, "x_star": [1]}),
    );
    assert_eq!(r.status, Status::QualificationFailed);
    assert_eq!(r.certificates["value"], json!("0/1"));
    let line = json!({"nx": 1, "ny": 1, "graph": {"E": [[2, -1]], "e": [0]}});
    let r = run_json(
        "coderivative",
        json!({"F": line, "x": [1], "y": [2], "y_star": [3]}),
    );
    assert_eq!(
        r.certificates["coderivative"],
        json!({"A": [], "b": [], "E": [["1/1"]], "e": ["6/1"]})
    );
    let r = run_json(
        "coderiv-sum",
        json!({"F1": line, "F2": line, "x": [1], "y": [4], "y_star": [1]}),
    );
    assert_eq!(r.certificates["rule_holds"], json!(true));
    let r = run_json(
        "coderiv-chain",
        json!({"F": line, "G": line, "x": [1], "y": [2], "z": [4], "z_star": [1]}),
    );
    assert_eq!(r.certificates["rule_holds"], json!(true));
    let r = run_json("lp", json!({"c": [-1], "A": [[1]], "b": [3]}));
    assert_eq!(r.certificates["value"], json!("-3/1"));
}
