use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use sullivan::classifier::classify_data;
use sullivan::literal::parse_multidegree;
use sullivan::record::parse_sullivan_data;

const A: &str = "3^150,7^89,9^65,15,25^130";
const B: &str = "5^261,21^89,27^64";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sullivan"))
        .args(args)
        .env_remove("SULLIVAN_ENUM_LIMIT")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn sd_of_cp4() {
    let v = json(&["sd", "4", "1"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["sullivan_data"]["total_degree"], "1");
    assert_eq!(v["sullivan_data"]["pontryagin"], serde_json::json!(["-5", "10"]));
    assert_eq!(v["sullivan_data"]["euler"], "5");
    assert_eq!(v["wu"]["v2"], 1);
    assert_eq!(v["wu"]["v4"], 1);
    let v = json(&["sd", "4", "1", "--classical-signs"]);
    assert_eq!(v["classical_pontryagin"], serde_json::json!(["5", "10"]));
}

#[test]
fn sd_of_quadric_is_spin() {
    let v = json(&["sd", "4", "2"]);
    assert_eq!(v["wu"]["v2"], 0);
    assert_eq!(v["wu"]["spin"], true);
}

#[test]
fn example_pair_has_equal_records() {
    let a = json(&["sd", "4", A]);
    let b = json(&["sd", "4", B]);
    assert_eq!(a["sullivan_data"], b["sullivan_data"]);
    assert_ne!(a["multidegree"], b["multidegree"]);
}

#[test]
fn classify_examples() {
    let v = json(&["classify", "4", A, B]);
    assert_eq!(v["verdict"], "Diffeomorphic (Theorem 1.2)");
    assert_eq!(v["sd_equal"], true);
    let v = json(&["classify", "4", "1", "2"]);
    assert_eq!(v["status"], "NotDiffeomorphic");
    let v = json(&["classify", "2", "4", "2,2,2"]);
    assert_eq!(v["status"], "HomeomorphicOnly");
    let v = json(&["classify", "9", "2", "2"]);
    assert_eq!(v["status"], "Diffeomorphic");
}

#[test]
fn classify_records_round_trip() {
    for (n, a, b) in [("4", A, B), ("4", "1", "2"), ("3", "2,2", "4"), ("5", "3,2", "2,3")] {
        let v = json(&["classify", n, a, b]);
        let sa = parse_sullivan_data(&v["sd_a"]).unwrap();
        let sb = parse_sullivan_data(&v["sd_b"]).unwrap();
        let same = parse_multidegree(v["a"].as_str().unwrap()).unwrap()
            == parse_multidegree(v["b"].as_str().unwrap()).unwrap();
        let again = classify_data(n.parse().unwrap(), same, &sa, &sb).unwrap();
        assert_eq!(again.justification, v["citation"].as_str().unwrap());
        assert_eq!(format!("{:?}", again.status), v["status"].as_str().unwrap());
    }
}

#[test]
fn rigidity_examples() {
    let v = json(&["rigidity", "2,2"]);
    assert_eq!(v["status"], "ThetaRigid");
    let v = json(&["rigidity", "2"]);
    assert_eq!(v["status"], "StronglyThetaFlexible");
    assert!(v.get("conjecture").is_none());
    let v = json(&["rigidity", "1"]);
    assert_eq!(v["status"], "ConjecturedFlexible");
    assert_eq!(v["conjecture"], true);
}

#[test]
fn search_examples() {
    let v = json(&["search", "4", "--max-degree", "6", "--max-k", "3"]);
    assert_eq!(v["pairs"], serde_json::json!([]));
    assert_eq!(v["stats"]["enumerated"], 56);
    assert!(v["completeness"].as_str().unwrap().contains("exhaustive only"));
    let v = json(&["search", "4", "--total-degree", "8", "--max-k", "3"]);
    assert_eq!(v["multidegrees"], serde_json::json!(["8", "4,2", "2^3"]));
    let v = json(&["search", "4", "--total-degree", "1", "--max-k", "3"]);
    assert_eq!(v["multidegrees"], serde_json::json!(["1"]));
}

#[test]
fn search_output_is_byte_identical_across_runs_and_shards() {
    let base = run(&["search", "3", "--max-degree", "4", "--max-k", "2"]).stdout;
    for shards in ["1", "2", "8"] {
        for _ in 0..2 {
            let out = run(&["search", "3", "--max-degree", "4", "--max-k", "2", "--shards", shards]);
            assert_eq!(out.status.code(), Some(0));
            assert_eq!(out.stdout, base);
        }
    }
}

#[test]
fn guard_limit_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_sullivan"))
        .args(["search", "4", "--max-degree", "6", "--max-k", "3"])
        .env("SULLIVAN_ENUM_LIMIT", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["reached"], "56");
    assert!(v["partial_stats"].is_object());
    let out = run(&["search", "4", "--max-degree", "6", "--max-k", "3", "--limit", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ledger_verify() {
    let v = json(&["ledger", "verify"]);
    assert_eq!(v["c_eta"], "Z/4");
    assert_eq!(v["torsion"], "Z/4");
    assert_eq!(v["all_passed"], true);
    let steps = v["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 6);
    assert!(steps.iter().all(|s| s["outcome"] == "pass" && !s["citation"].as_str().unwrap().is_empty()));

    let v = json(&["ledger", "verify", "--counterfactual", "split-bracket"]);
    assert_eq!(v["counterfactual"], "split-bracket");
    assert_eq!(v["c_eta"], "Z/2+Z/2");
    assert_eq!(v["torsion"], "Z/2+Z/2");
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn corrupted_ledgers_fail_with_a_step_report() {
    let shipped = sullivan::abelian::ledger::SHIPPED_LEDGER;
    let cases = [
        ("not_toml.toml", "this is [not toml".to_string(), "load"),
        ("pi4.toml", shipped.replace("orders = []\ngenerators = []\nprovenance = \"Toda, stable 4-stem", "orders = [2]\ngenerators = [\"x\"]\nprovenance = \"Toda, stable 4-stem"), "eta_on_pi6"),
        ("imj.toml", shipped.replace("generators = [[1, 0]]", "generators = [[0, 1]]"), "comparison"),
    ];
    for (name, text, failing) in cases {
        let path = temp_file(name, &text);
        let out = run(&["ledger", "verify", "--ledger", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        let last = v["steps"].as_array().unwrap().last().unwrap().clone();
        assert_eq!(last["id"], failing, "{name}");
        assert_eq!(last["outcome"], "fail");
        assert_eq!(v["all_passed"], false);
    }
    let path = temp_file("shipped_copy.toml", shipped);
    let v = json(&["ledger", "verify", "--ledger", path.to_str().unwrap()]);
    assert_eq!(v["torsion"], "Z/4");
    let out = run(&["ledger", "verify", "--ledger", "/nonexistent/ledger.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn parse_errors_are_positioned() {
    let out = run(&["sd", "4", "3,x"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("position 2"), "{err}");
    let out = run(&["classify", "4", "2", "2^0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        &["frobnicate"][..],
        &["sd", "four", "2"],
        &["search", "4", "--max-k", "2"],
        &["search", "2", "--max-degree", "3", "--max-k", "2"],
        &["classify", "1", "2", "3"],
        &["search", "4", "--total-degree", "-8", "--max-k", "2"],
        &["sd", "0", "2"],
    ] {
        assert_eq!(run(args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn help_explains_the_caret() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("multiplicity"));
    let out = run(&["sd", "--help"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("NOT exponentiation"));
}

#[test]
fn table_format() {
    let out = run(&["--format", "table", "sd", "4", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("sullivan_data.pontryagin") && l.ends_with("-5, 10")));
    let out = run(&["ledger", "verify", "--format", "table"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("torsion"));
}
