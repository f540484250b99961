use std::process::{Command, Output};

use serde_json::Value;

fn cfcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfcalc")).args(args).output().expect("binary runs")
}

fn scenario(name: &str, text: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("cfcalc-{}-{name}.json", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

fn strip_times(v: &mut Value) {
    if let Some(checks) = v["checks"].as_array_mut() {
        for c in checks {
            c.as_object_mut().unwrap().remove("time_ms");
        }
    }
}

#[test]
fn same_seed_gives_same_report() {
    let run = || {
        let out = cfcalc(&["run", "--suite", "foundations,reducedness", "--seed", "7", "--json", "--jobs", "2"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let mut v: Value = serde_json::from_slice(&out.stdout).unwrap();
        strip_times(&mut v);
        v
    };
    let a = run();
    assert_eq!(a["schema"], 1);
    assert_eq!(a, run());
}

#[test]
fn empty_scenario_passes() {
    let path = scenario("empty", r#"{"schema": 1, "checks": []}"#);
    let out = cfcalc(&["run", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn scenario_errors_name_the_path() {
    let path = scenario("badname", r#"{"schema": 1, "checks": [{"name": "foundations"}, {"name": "nope"}]}"#);
    let out = cfcalc(&["run", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("checks[1]"));

    let path = scenario("badjson", "{\"schema\": 1,\n \"checks\": [}");
    let out = cfcalc(&["run", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let path = scenario("schema", r#"{"schema": 2, "checks": []}"#);
    assert_eq!(cfcalc(&["run", "--scenario", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn run_needs_a_suite() {
    assert_eq!(cfcalc(&["run"]).status.code(), Some(2));
    assert_eq!(cfcalc(&["run", "--suite", "unknown"]).status.code(), Some(2));
}

#[test]
fn failing_suite_sets_exit_code() {
    let out = cfcalc(&["run", "--suite", "tower-agreement", "--max-n", "1", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["summary"]["fail"].as_u64().unwrap() > 0);
    let failed = v["checks"].as_array().unwrap().iter().find(|c| c["status"] == "fail").unwrap();
    assert!(failed.get("replay").is_some());
}

#[test]
fn demo_cross_effect_of_tensor2() {
    let out = cfcalc(&["demo", "crosseff", "--functor", "tensor2", "--pointed", "--json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"schema\": 1"));
}

#[test]
fn list_names_every_suite() {
    let out = cfcalc(&["list"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for s in cfcalc::suites::suite_names() {
        assert!(text.contains(s), "{s}");
    }
}
