use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_smcirc"));
    c.env_remove("SMCIRC_PRIME");
    c
}

fn run_with(args: &[&str], stdin: &[u8], env: Option<(&str, &str)>) -> Output {
    let mut cmd = bin();
    cmd.args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    if let Some((k, v)) = env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn run(args: &[&str], stdin: &[u8]) -> Output {
    run_with(args, stdin, None)
}

fn ok(args: &[&str], stdin: &[u8]) -> Vec<u8> {
    let out = run(args, stdin);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn json_of(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

fn failure(args: &[&str], stdin: &[u8]) -> (i32, Value) {
    let out = run(args, stdin);
    assert!(!out.status.success());
    (
        out.status.code().unwrap(),
        serde_json::from_slice(&out.stderr).unwrap(),
    )
}

fn scratch(name: &str, contents: &[u8]) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("smcirc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn s(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn depth_reduced_permanent_is_equal_to_the_original() {
    let per = ok(&["gen", "per", "--n", "3"], b"");
    let original = scratch("per3.json", &per);
    let reduced = ok(&["depth-reduce"], &per);
    let v = json_of(&ok(&["equal", "--against", s(&original)], &reduced));
    assert_eq!(v["equal"], true);
}

#[test]
fn identity_sigma_program_reads_matched_pairs_in_turn() {
    let abp = ok(
        &["gen", "sigma-p-abp", "--d", "3", "--sigma", "identity"],
        b"",
    );
    let v = json_of(&ok(&["roabp-detect"], &abp));
    assert_eq!(v["order"], json!([1, 4, 2, 5, 3, 6]));
    assert_eq!(v["roabp"], true);
}

#[test]
fn comparing_different_degrees_is_a_validation_error() {
    let a = scratch("deg3.json", &ok(&["gen", "per", "--n", "3"], b""));
    let b = ok(&["gen", "per", "--n", "2"], b"");
    let (code, err) = failure(&["equal", "--against", s(&a)], &b);
    assert_eq!(code, 2);
    assert_eq!(err["error"], "IndexSetMismatch");
    assert_eq!(err["exit_code"], 2);
}

#[test]
fn ceilings_and_schema_errors_have_their_own_exit_codes() {
    let (code, err) = failure(&["gen", "per", "--n", "9"], b"");
    assert_eq!((code, err["error"].as_str()), (3, Some("ScaleExceeded")));

    let per = ok(&["gen", "per", "--n", "4"], b"");
    let (code, err) = failure(&["expand", "--max-terms", "3"], &per);
    assert_eq!((code, err["error"].as_str()), (3, Some("TermBlowup")));

    let (code, err) = failure(&["expand"], b"{\"nothing\": 1}");
    assert_eq!((code, err["error"].as_str()), (4, Some("Schema")));

    let (code, _) = failure(&["expand"], b"not json");
    assert_eq!(code, 4);

    let (code, _) = failure(&["no-such-command"], b"");
    assert_eq!(code, 4);

    let (code, err) = failure(&["expand", "--in", "/nonexistent/input.json"], b"");
    assert_eq!((code, err["error"].as_str()), (4, Some("Io")));

    let (code, err) = failure(&["gen", "per", "--n", "2", "--prime", "15"], b"");
    assert_eq!((code, err["error"].as_str()), (4, Some("UnsupportedPrime")));
}

#[test]
fn randomized_commands_require_a_seed() {
    let (code, _) = failure(&["gen", "random", "--d", "3"], b"");
    assert_eq!(code, 4);
    let (code, _) = failure(&["good-pairs", "--d", "8", "--samples", "10"], b"");
    assert_eq!(code, 4);
}

#[test]
fn outputs_are_deterministic_and_carry_provenance() {
    let args = ["gen", "random", "--d", "5", "--seed", "11"];
    let a = ok(&args, b"");
    assert_eq!(a, ok(&args, b""));
    let v = json_of(&a);
    assert_eq!(v["meta"]["seed"], 11);
    assert_eq!(v["meta"]["prime"], 2_147_483_647u64);
    assert_eq!(v["meta"]["command"], "gen random");
    assert_eq!(v["meta"]["tool"], "smcirc");

    let expanded = json_of(&ok(&["expand"], &a));
    let digest = expanded["meta"]["inputs"][0]["sha256"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert_ne!(ok(&["gen", "random", "--d", "5", "--seed", "12"], b""), a);
}

#[test]
fn prime_comes_from_the_environment_when_not_given() {
    let out = run_with(
        &["gen", "per", "--n", "2"],
        b"",
        Some(("SMCIRC_PRIME", "65537")),
    );
    assert!(out.status.success());
    assert_eq!(json_of(&out.stdout)["meta"]["prime"], 65537);
}

#[test]
fn validate_reports_circuits_programs_and_polynomials() {
    let per = ok(&["gen", "per", "--n", "3"], b"");
    let v = json_of(&ok(&["validate"], &per));
    assert_eq!(v["valid"], true);
    assert_eq!(v["annotation"]["degree"], 3);

    let abp = ok(&["gen", "per-roabp", "--n", "3"], b"");
    let v = json_of(&ok(&["validate"], &abp));
    assert_eq!(v["nodes"], 8);

    let poly = ok(&["expand"], &per);
    assert_eq!(json_of(&ok(&["validate"], &poly))["terms"], 6);
}

#[test]
fn validate_rejects_redundant_gates() {
    let circuit = json!({
        "version": 1, "d": 1, "bucket_sizes": [1],
        "gates": [
            {"id": 0, "op": "input", "var": [1, 1]},
            {"id": 1, "op": "const", "value": "-1"},
            {"id": 2, "op": "input", "var": [1, 1]},
            {"id": 3, "op": "mul", "args": [1, 2]},
            {"id": 4, "op": "add", "args": [0, 3]}
        ],
        "output": 4
    });
    let (code, err) = failure(&["validate"], circuit.to_string().as_bytes());
    assert_eq!(code, 2);
    assert_eq!(err["error"], "RedundantGate");
}

#[test]
fn eval_accepts_both_assignment_shapes() {
    let per = ok(&["gen", "per", "--n", "2"], b"");
    let entries = json!([
        {"var": [1, 1], "value": "2"}, {"var": [1, 2], "value": "3"},
        {"var": [2, 1], "value": "5"}, {"var": [2, 2], "value": "7"}
    ]);
    let plain = scratch("assign-plain.json", entries.to_string().as_bytes());
    let wrapped = scratch(
        "assign-wrapped.json",
        json!({ "assignment": entries }).to_string().as_bytes(),
    );
    for file in [&plain, &wrapped] {
        let v = json_of(&ok(&["eval", "--assign", s(file)], &per));
        assert_eq!(v["value"], "29");
    }
    let det = ok(&["gen", "det", "--n", "2"], b"");
    let v = json_of(&ok(&["eval", "--assign", s(&plain)], &det));
    assert_eq!(v["value"], "2147483646");
}

#[test]
fn block_diagonal_restriction_feeds_substitution() {
    let r = scratch(
        "blockdiag.json",
        &ok(&["gen", "blockdiag", "--n", "4", "--nu", "2"], b""),
    );
    let per = ok(&["gen", "per", "--n", "4"], b"");
    let restricted = ok(&["substitute", "--assign", s(&r)], &per);
    let poly = json_of(&ok(&["expand"], &restricted));
    assert_eq!(poly["terms"].as_array().unwrap().len(), 4);

    let expanded = ok(&["expand"], &per);
    let direct = json_of(&ok(&["substitute", "--assign", s(&r)], &expanded));
    assert_eq!(direct["terms"], poly["terms"]);
}

#[test]
fn random_equality_detects_differences() {
    let per = ok(&["gen", "per", "--n", "3"], b"");
    let det = scratch("det3.json", &ok(&["gen", "det", "--n", "3"], b""));
    let same = scratch("per3-copy.json", &per);
    let v = json_of(&ok(
        &[
            "equal",
            "--mode",
            "random",
            "--seed",
            "5",
            "--against",
            s(&same),
        ],
        &per,
    ));
    assert_eq!(v["equal"], true);
    assert!(v["error_bound"].as_f64().unwrap() < 1e-100);
    let v = json_of(&ok(
        &[
            "equal",
            "--mode",
            "random",
            "--seed",
            "5",
            "--against",
            s(&det),
        ],
        &per,
    ));
    assert_eq!(v["equal"], false);
}

#[test]
fn lowering_and_formula_commands_preserve_the_polynomial() {
    let c = ok(&["gen", "random", "--d", "4", "--seed", "3"], b"");
    let original = scratch("random4.json", &c);
    for cmd in ["to-formula", "to-abp", "depth-reduce"] {
        let out = ok(&[cmd], &c);
        let v = json_of(&ok(&["equal", "--against", s(&original)], &out));
        assert_eq!(v["equal"], true, "{cmd}");
    }
    let abp = json_of(&ok(&["to-abp"], &c));
    assert!(abp["meta"]["lowering"]["abp_nodes"].as_u64().unwrap() > 0);
    let stats = json_of(&ok(&["depth-reduce", "--stats"], &c));
    assert!(stats["stages"].is_array());
}

#[test]
fn proof_tree_commands() {
    let per = ok(&["gen", "per", "--n", "4"], b"");
    let types = json_of(&ok(&["tree-types"], &per));
    let parts = json_of(&ok(&["decompose"], &per));
    assert_eq!(types["count"], parts["count"]);
    assert!(json_of(&ok(&["property-u"], &per))["holds"].is_boolean());
    let slices = json_of(&ok(&["slice"], &per));
    assert_eq!(slices["partition"], true);

    let single = ok(&["gen", "per", "--n", "2"], b"");
    let formula = ok(&["unique-to-formula"], &single);
    let original = scratch("per2.json", &single);
    assert_eq!(
        json_of(&ok(&["equal", "--against", s(&original)], &formula))["equal"],
        true
    );

    let (code, err) = failure(&["slice", "--index-set", "1"], &per);
    assert_eq!((code, err["error"].as_str()), (2, Some("EmptyFrontier")));
}

#[test]
fn rank_and_width_reports() {
    let abp = ok(&["gen", "per-roabp", "--n", "3"], b"");
    let w = json_of(&ok(&["rank", "--abp-witness"], &abp));
    assert_eq!(w["mode"], "abp-witness");
    assert_eq!(w["total"], 8);

    let per = ok(&["gen", "per", "--n", "3"], b"");
    let f = json_of(&ok(&["rank", "--order", "1,2,3"], &per));
    let ranks: Vec<u64> = f["layers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["fixed"]["rank"].as_u64().unwrap())
        .collect();
    assert_eq!(ranks, [1, 3, 3, 1]);

    let tw = json_of(&ok(&["type-width"], &abp));
    assert_eq!(tw["max"], 1);
    let n = json_of(&ok(&["narrow", "--w", "1", "--threshold", "1"], &abp));
    assert_eq!(n["narrow"], true);

    let interp = ok(
        &["gen", "interp-f", "--d", "2", "--count", "2", "--seed", "9"],
        b"",
    );
    assert!(json_of(&ok(&["type-width"], &interp))["profile"].is_array());
}

#[test]
fn interval_check_accepts_circuits_and_programs() {
    let abp = ok(
        &["gen", "sigma-p-abp", "--d", "2", "--sigma", "2,4,1,3"],
        b"",
    );
    let v = json_of(&ok(&["interval-check", "--order", "2,1,4,3"], &abp));
    assert_eq!(v["interval"], true);
    let v = json_of(&ok(&["interval-check", "--order", "1,2,3,4"], &abp));
    assert_eq!(v["interval"], false);
    let (code, _) = failure(&["interval-check", "--order", "1,1,2,3"], &abp);
    assert_eq!(code, 2);
}

#[test]
fn good_pairs_report() {
    let v = json_of(&ok(
        &["good-pairs", "--d", "16", "--samples", "100", "--seed", "1"],
        b"",
    ));
    assert_eq!(v["stats"]["first_pair_probs"].as_array().unwrap().len(), 2);
    let (code, err) = failure(
        &["good-pairs", "--d", "12", "--samples", "10", "--seed", "1"],
        b"",
    );
    assert_eq!((code, err["error"].as_str()), (2, Some("BadDivisibility")));
}

#[test]
fn output_file_matches_standard_output() {
    let path = scratch("out.json", b"");
    let out = run(&["gen", "det", "--n", "3", "--out", s(&path)], b"");
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(
        std::fs::read(&path).unwrap(),
        ok(&["gen", "det", "--n", "3"], b"")
    );
}
