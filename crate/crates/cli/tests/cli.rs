use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ltlbridge"));
    cmd.args(args).env_remove("LTLBRIDGE_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn lines(out: &Output) -> Vec<Value> {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_from_arg_and_file() {
    let v = json(&run(&["verify", "always, (if p, then eventually, q)"], &[]));
    assert_eq!(v["kind"], "verified");
    assert_eq!(json(&run(&["verify", "(p and not p)"], &[]))["kind"], "unsatisfiable");
    assert_eq!(json(&run(&["verify", "always, (p and"], &[]))["kind"], "parse_failure");

    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("cand.itl");
    fs::write(&f, "(p or not p)\n").unwrap();
    assert_eq!(json(&run(&["verify", "--file", path(&f)], &[]))["kind"], "trivial_valid");
}

#[test]
fn verify_usage_errors() {
    assert_eq!(run(&["verify"], &[]).status.code(), Some(2));
    let out = run(&["verify", "--file", "/nonexistent/x"], &[]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("reading"));
}

#[test]
fn repair_budget_flag_and_env() {
    let v = json(&run(&["repair", "eventual, p"], &[]));
    assert_eq!(v["repair"]["status"], "repaired_verified");
    assert_eq!(v["repair"]["result"], "eventually, p");
    assert_eq!(v["repair"]["repair_cost"], 1);

    let starved = json(&run(&["repair", "eventual, (p and"], &[("LTLBRIDGE_BUDGET", "1")]));
    assert_eq!(starved["repair"]["status"], "failed");
    // the flag wins over the environment
    let v = json(&run(&["repair", "eventual, (p and", "--budget", "5"], &[("LTLBRIDGE_BUDGET", "1")]));
    assert_eq!(v["repair"]["status"], "repaired_verified");
}

#[test]
fn explain_with_context() {
    let dir = tempfile::tempdir().unwrap();
    let ctx = dir.path().join("ctx.json");
    fs::write(
        &ctx,
        r#"{"domain": "automotive", "definitions": {"brake": "the brake pedal is pressed", "stop": "the vehicle stops"}}"#,
    )
    .unwrap();
    let want = "Always, if the brake pedal is pressed, then eventually, the vehicle stops.";
    for formula in ["always, (if brake, then eventually, stop)", "G (brake -> F stop)"] {
        let v = json(&run(&["explain", formula, "--context", path(&ctx)], &[]));
        assert_eq!(v["explanation"], want);
    }
    assert_eq!(run(&["explain", "G zz", "--context", path(&ctx)], &[]).status.code(), Some(1));
}

#[test]
fn corpus_eval_filter_round() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["gen-corpus", "--seed", "7", "--counts", "3,3,2,1"], &[]);
    let records = lines(&out);
    assert_eq!(records.len(), 9);
    let refs = dir.path().join("refs.jsonl");
    fs::write(&refs, &out.stdout).unwrap();

    let cands = dir.path().join("cands.jsonl");
    let body: String = records
        .iter()
        .map(|r| serde_json::json!({"id": r["id"], "candidate": r["itl"]}).to_string() + "\n")
        .collect();
    fs::write(&cands, body).unwrap();

    let report = json(&run(&["eval", "--refs", path(&refs), "--cands", path(&cands)], &[]));
    for k in ["sem_eq", "syn_corr", "sat", "non_triv", "pass_rate"] {
        assert_eq!(report["overall"][k], 1.0, "{k}");
    }

    let filtered = lines(&run(&["filter", "--in", path(&cands)], &[]));
    assert_eq!(filtered.len(), 9);
    assert!(filtered.iter().all(|r| r["verdict"]["kind"] == "verified"));
    assert_eq!(filtered[0]["id"], records[0]["id"]);
}

#[test]
fn bad_inputs_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{not json}\n").unwrap();
    assert_eq!(run(&["filter", "--in", path(&bad)], &[]).status.code(), Some(1));
    assert_eq!(run(&["eval", "--refs", path(&bad), "--cands", path(&bad)], &[]).status.code(), Some(1));
    assert_eq!(run(&["gen-corpus", "--counts", "1,2"], &[]).status.code(), Some(2));
}

#[test]
fn train_report() {
    let v = json(&run(&["train", "--steps", "20", "--group", "4", "--alpha", "1", "--beta", "1", "--gamma", "0.1"], &[]));
    assert_eq!(v["steps"].as_array().unwrap().len(), 20);
    for s in v["steps"].as_array().unwrap() {
        for sum in s["advantage_sums"].as_array().unwrap() {
            assert!(sum.as_f64().unwrap().abs() < 1e-9);
        }
    }
    assert!(v["initial_pass_rate"].as_f64().is_some() && v["final_pass_rate"].as_f64().is_some());
}
