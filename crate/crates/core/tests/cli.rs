//! The `avlip` binary: output shapes, reproducibility and the exit contract.

use std::process::{Command, Output};

use serde_json::Value;

const STEP: &str = r#"{"kind":"step","jump_points":["1/2"],"point_values":["0"],"levels":["0","1"]}"#;

fn avlip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avlip")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = avlip(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(stdout(&out)).unwrap()
}

#[test]
fn seminorms_rows() {
    let id = json(&["seminorms", "--format", "json", "--inline", r#"{"kind":"plf","breakpoints":["0","1"],"values":["0","1"]}"#]);
    assert_eq!(id["variation"], "1");
    assert_eq!(id["lipschitz"], "1");
    assert_eq!(id["chain"], "PASS");
    for key in ["strong_avg", "weak_avg"] {
        let lo = id[key]["lower"].as_f64().unwrap();
        let hi = id[key]["upper"].as_f64().unwrap();
        assert!(lo <= 1.0 && 1.0 <= hi && hi - lo <= 1e-6, "{key}: [{lo}, {hi}]");
    }

    let step = avlip(&["seminorms", "--inline", STEP]);
    assert!(step.status.success());
    assert!(stdout(&step).contains("∞ (cap exceeded)"));
    let step = json(&["seminorms", "--format", "json", "--inline", STEP]);
    assert_eq!(step["variation"], "1");
    assert_eq!(step["strong_avg"]["verdict"]["kind"], "divergent_beyond_cap");
    assert_eq!(step["chain"], "PASS");
}

#[test]
fn verify_writes_the_documented_csv() {
    let out = avlip(&["--seed", "3", "verify", "--count", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("function_id,check_name,lhs,rhs,slack,verdict"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len() % 6, 0);
    assert!(rows.iter().all(|r| r.ends_with(",PASS")));
    assert_eq!(stdout(&avlip(&["--seed", "3", "verify", "--count", "4"])), text);
}

#[test]
fn injected_violation_exits_nonzero_with_rows() {
    let out = avlip(&["--seed", "3", "verify", "--count", "4", "--inject-violation"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.lines().any(|l| l.starts_with("FAIL ") && l.contains("variation_sandwich")));
    assert!(stdout(&out).contains(",FAIL"));
}

#[test]
fn covering_and_shatter_reports() {
    let cov = json(&["covering", "--format", "json", "--inline", r#"[["0","1/2"],["1/4","3/4"],["5/8","1"]]"#]);
    assert_eq!(cov["indices"], serde_json::json!([0, 2]));
    assert_eq!(cov["bound_holds"], true);

    let strong = json(&["shatter", "--class", "strong", "-L", "1", "--gamma", "1/4", "--format", "json"]);
    assert_eq!(strong["points"], 3);
    assert_eq!(strong["labelings"], 8);
    assert_eq!(strong["verdict"], "CERTIFIED");

    let weak = json(&["shatter", "--class", "weak", "-L", "1", "--gamma", "1/6", "--format", "json"]);
    assert_eq!(weak["labelings"], 4096);
    assert_eq!(weak["min_margin"], "1/6");
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let path = std::env::temp_dir().join(format!("avlip-cli-{}.csv", std::process::id()));
    let args = ["--seed", "5", "verify", "--count", "2"];
    let direct = avlip(&args);
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    assert!(avlip(&with_out).status.success());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(avlip(&["bogus"]).status.code(), Some(2));
    assert_eq!(avlip(&["seminorms", "--tol=0", "--inline", STEP]).status.code(), Some(2));
    assert_eq!(avlip(&["seminorms", "--inline", "{"]).status.code(), Some(2));
    assert_eq!(avlip(&["eval", "--at", "2", "--inline", STEP]).status.code(), Some(2));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_avlip"))
        .args(["seminorms", "--inline", STEP])
        .env("AVLIP_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}
