use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

const M: &str = "\\x.(\\y.y)((\\z.\\w.w z) x)";

fn losim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_losim")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn example_file() -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(losim_core::ltrs::EXAMPLE_LTRS.as_bytes()).unwrap();
    f
}

#[test]
fn parse_prints_canonical_form_and_depth() {
    let o = losim(&["parse", "\\x.x"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "\\x.x\ndepth 1\n");
}

#[test]
fn run_losim_json_header_and_steps() {
    let o = losim(&["run-losim", M, "--emit", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let h = &v["header"];
    for key in ["ltrs_hash", "source_term", "D", "ldepth_start", "contracts", "steps", "complete"] {
        assert!(!h[key].is_null(), "missing header field {key}");
    }
    assert_eq!(h["contracts"], 2);
    let steps = v["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 11);
    for (k, s) in steps.iter().enumerate() {
        assert_eq!(s["index"], k + 1);
        assert!(s["class"] == "search" || s["class"] == "contract");
        assert!(s["rule"].is_string() && s["position"].is_array() && s["ldepth"].is_u64());
        assert!(s.get("term").is_none());
    }
}

#[test]
fn ltrs_file_input() {
    let f = example_file();
    let path = f.path().to_str().unwrap();
    let o = losim(&["run-losim", "--ltrs", path, "--start", "f(g,h)", "--include-terms", "--cross-check-ldepth"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("source f(g,h) D 3 ldepth_start 6 contracts 2 steps 11"));
    assert!(out.contains("\\x0.\\x1.@(x1,x0)"));
    assert!(out.contains("0 mismatches"));

    let o = losim(&["expand", "--ltrs", path, "--start", "f(g,h)"]);
    assert_eq!(stdout(&o), "\\x0. ((\\x1. x1) ((\\x1. \\x2. (x2 x1)) x0))\ndepth 6\n");
}

#[test]
fn lift_output_reads_back_as_a_ltrs() {
    let o = losim(&["lift", M]);
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(&o.stdout).unwrap();
    let o = losim(&["run-losim", "--ltrs", f.path().to_str().unwrap(), "--start", "f0", "--emit", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["header"]["steps"], 11);
}

#[test]
fn file_input() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "{M}").unwrap();
    let o = losim(&["run-beta", "--file", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("steps 2 complete true"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(losim(&["parse"]).status.code(), Some(2));
    assert_eq!(losim(&["parse", "\\x.x", "--file", "nope"]).status.code(), Some(2));
    assert_eq!(losim(&["parse", "\\x."]).status.code(), Some(2));
    assert_eq!(losim(&["run-beta", "\\x.x", "--emit", "csv"]).status.code(), Some(2));
    assert_eq!(losim(&["verify", "--check", "no-such-check"]).status.code(), Some(2));
    assert_eq!(losim(&["run-losim", "--start", "f0"]).status.code(), Some(2));
    assert_eq!(losim(&["lift", "x"]).status.code(), Some(2));
}

#[test]
fn step_limit_exits_1_with_partial_trace() {
    let o = losim(&["run-beta", "(\\x.x x)(\\x.x x)", "--max-steps", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("steps 3 complete false"));
    let o = losim(&["run-losim", "(\\x.x x)(\\x.x x)", "--max-contracts", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("stopped: contract-limit"));
}

#[test]
fn node_budget_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_losim"))
        .args(["expand", M])
        .env("LOSIM_MAX_NODES", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget of 3"));
}

#[test]
fn run_dag_csv() {
    let o = losim(&["run-dag", M]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], losim_core::export::DAG_CSV_HEADER);
    assert_eq!(lines.len(), 3);
}

#[test]
fn repsim_and_families() {
    let o = losim(&["run-repsim", M, "--emit", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["header"]["contracts"], 2);

    let o = losim(&["family", "depth", "--i", "4", "--emit", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["depth_a"].as_u64(), v["depth_b"].as_u64()), (Some(15), Some(16)));
    assert_eq!(v["inside_out_steps"], 16);

    let o = losim(&["family", "size", "--i", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("lo_steps 6\n"));
}

#[test]
fn verify_default_seed_7_passes() {
    let o = losim(&["verify", "--suite", "default", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("8/8 checks passed\n"));
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--suite", "quick", "--emit", "json"];
    let (a, b) = (losim(&args), losim(&args));
    assert_eq!(a.stdout, b.stdout);
    let c = losim(&["verify", "--suite", "quick", "--emit", "json", "--sequential"]);
    assert_eq!(a.stdout, c.stdout);
    let args = ["run-losim", "\\f.\\x.f (f (f x))", "--emit", "json", "--include-terms"];
    assert_eq!(losim(&args).stdout, losim(&args).stdout);
}
