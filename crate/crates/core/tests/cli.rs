use std::path::Path;
use std::process::{Command, Output};

use decmata::baseline::lp::parse_lp;
use decmata::{load_scenario, Plan};
use serde_json::Value;

fn decmata(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decmata")).args(args).current_dir(dir).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = decmata(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn scenario(dir: &Path) {
    ok(dir, &["gen", "--seed", "5", "--robots", "3", "--tasks", "9", "--out", "s.json"]);
}

#[test]
fn gen_writes_a_loadable_scenario() {
    let dir = tempfile::tempdir().unwrap();
    scenario(dir.path());
    let s = load_scenario(dir.path().join("s.json")).unwrap();
    assert_eq!((s.robot_count, s.task_count(), s.task_cap, s.seed), (3, 9, 5, 5));
    let printed = ok(dir.path(), &["gen", "--seed", "5", "--robots", "3", "--tasks", "9"]);
    assert_eq!(printed.trim_end(), std::fs::read_to_string(dir.path().join("s.json")).unwrap().trim_end());
}

#[test]
fn allocate_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    scenario(dir.path());
    ok(dir.path(), &["allocate", "s.json", "--trace", "t.jsonl", "--out", "plan.json"]);
    let plan = Plan::from_json(&std::fs::read_to_string(dir.path().join("plan.json")).unwrap()).unwrap();
    assert_eq!(plan.routes.len(), 3);
    let trace = std::fs::read_to_string(dir.path().join("t.jsonl")).unwrap();
    assert!(trace.lines().all(|l| serde_json::from_str::<Value>(l).is_ok()));

    let report: Value = serde_json::from_str(&ok(dir.path(), &["verify", "s.json", "plan.json"])).unwrap();
    assert_eq!(report["valid"], Value::Bool(true));

    let mut broken: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("plan.json")).unwrap()).unwrap();
    broken["routes"][0]["nodes"] = serde_json::json!([0, 0]);
    std::fs::write(dir.path().join("bad.json"), broken.to_string()).unwrap();
    let report: Value = serde_json::from_str(&ok(dir.path(), &["verify", "s.json", "bad.json"])).unwrap();
    assert_eq!(report["valid"], Value::Bool(false));
    assert!(report["violations"].as_array().unwrap().iter().any(|v| v["kind"] == "task_missing"));
}

#[test]
fn allocate_flags_change_the_run() {
    let dir = tempfile::tempdir().unwrap();
    scenario(dir.path());
    let fcm = ok(dir.path(), &["allocate", "s.json"]);
    let same = ok(dir.path(), &["allocate", "s.json", "--mode", "fcm", "--kb", "1000", "--gamma", "2", "--seed", "5"]);
    assert_eq!(fcm, same);
    let constant = ok(dir.path(), &["allocate", "s.json", "--mode", "const:1"]);
    assert!(Plan::from_json(&constant).is_ok());
}

#[test]
fn baseline_and_lp() {
    let dir = tempfile::tempdir().unwrap();
    scenario(dir.path());
    let sol: Value = serde_json::from_str(&ok(dir.path(), &["baseline", "s.json", "--budget-s", "20"])).unwrap();
    assert_eq!(sol["proven_optimal"], Value::Bool(true));
    assert_eq!(sol["routes"].as_array().unwrap().len(), 3);

    ok(dir.path(), &["emit-lp", "s.json", "--out", "m.lp"]);
    let lp = parse_lp(&std::fs::read_to_string(dir.path().join("m.lp")).unwrap()).unwrap();
    assert_eq!(lp.constraints.len(), 2 + 2 * 9 + 9 * 8);
}

#[test]
fn bench_formats() {
    let dir = tempfile::tempdir().unwrap();
    let csv = ok(dir.path(), &["bench", "--cases", "1", "--reps", "2", "--algos", "CNT,DM"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "case,n,m,h,algorithm,mean_cost,mean_sigma,mean_time_s,gap_vs_cnt");
    assert!(lines[1].starts_with("1,10,2,7,CNT,"));
    assert_eq!(lines.len(), 3);
    let json: Value = serde_json::from_str(&ok(dir.path(), &["bench", "--cases", "2,3", "--reps", "1", "--format", "json"])).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 2 * 3);
}

#[test]
fn errors_are_json_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    for (args, kind) in [
        (vec!["allocate", "nope.json"], "io"),
        (vec!["bench", "--cases", "6", "--reps", "1", "--algos", "CNT"], "unsupported_size"),
        (vec!["gen", "--seed", "1", "--robots", "4", "--tasks", "2"], "parameter"),
    ] {
        let out = decmata(dir.path(), &args);
        assert!(!out.status.success());
        let err: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(err["error"], kind, "{args:?}");
        assert!(err["message"].is_string());
    }
    std::fs::write(dir.path().join("bad.json"), r#"{"seed": 1}"#).unwrap();
    let out = decmata(dir.path(), &["allocate", "bad.json"]);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "parse");
}
