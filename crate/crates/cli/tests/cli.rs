use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cyclolog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclolog")).args(args).env_remove("CYCLOLOG_PREC").output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    stdout(out).lines().map(|l| serde_json::from_str(l).expect("valid JSON line")).collect()
}

fn json(out: &Output) -> Value {
    let mut lines = json_lines(out);
    assert_eq!(lines.len(), 1, "{}", stdout(out));
    lines.pop().unwrap()
}

#[test]
fn lseries_q3() {
    let out = cyclolog(&["lseries", "--q", "3", "--f", "1,-1,0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["L"].as_str().unwrap().starts_with("0.604599788078072616864692752547"));
    assert_eq!(v["L_class"], "NonZero");
    assert_eq!(v["prec_bits"], 128);
    assert_eq!(v["decomposition"]["value"], v["L"]);
}

#[test]
fn divergent_series_exit_2() {
    let out = cyclolog(&["lseries", "--q", "3", "--f", "1,1,0"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("series diverges: Σf(a) = 2 ≠ 0"), "{err}");
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        &["lseries", "--q", "3", "--f", "1,x,0"][..],
        &["lseries", "--q", "4", "--f", "1,-1,0"],
        &["lseries", "--q", "3", "--f", "1,-1,0", "--route", "magic"],
        &["relations", "--q", "8", "--prec", "32"],
        &["relations", "--q", "8", "--prec", "8192"],
        &["dedekind", "--p", "9"],
        &["no-such-command"],
        &["scan"],
    ] {
        assert_eq!(code(&cyclolog(args)), 1, "{args:?}");
    }
}

#[test]
fn fourier_route_matches_digamma() {
    let a = json(&cyclolog(&["lseries", "--q", "5", "--f", "1,-1,-1,1,0"]));
    let b = json(&cyclolog(&["lseries", "--q", "5", "--f", "1,-1,-1,1,0", "--route", "fourier"]));
    assert_eq!(a["L"].as_str().unwrap()[..34], b["L"].as_str().unwrap()[..34]);
    assert_eq!(b["route"], "fourier");
}

#[test]
fn relations_q8() {
    let v = json(&cyclolog(&["relations", "--q", "8"]));
    assert_eq!(v["count"], 2);
    assert_eq!(v["rank"], 2);
    assert_eq!(v["all_zero"], true);
    for r in v["relations"].as_array().unwrap() {
        assert_eq!(r["class"], "Zero");
    }
}

#[test]
fn dedekind_p5() {
    let v = json(&cyclolog(&["dedekind", "--p", "5"]));
    assert_eq!(v["agree"], true);
    let direct = v["det_direct"].as_str().unwrap();
    assert!(direct.starts_with("-0.3872402775812658408047418"), "{direct}");
    assert_eq!(v["det_direct"], v["det_product"]);
}

#[test]
fn certificate_and_classify() {
    let out = cyclolog(&["certificate", "--p", "11"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["status"], "certified");
    let v = json(&cyclolog(&["classify", "--f", "1,-1,-1,1,0"]));
    assert_eq!(v["branch"], "L_nonzero");
}

#[test]
fn scan_parity_and_counts() {
    let v = json(&cyclolog(&["scan", "--q", "6", "--no-store"]));
    assert_eq!(v["admissible_count"], 0);
    assert_eq!(v["reason"], "parity");

    let lines = json_lines(&cyclolog(&["scan", "--q", "7", "--no-store"]));
    assert_eq!(lines.len(), 21);
    let summary = lines.last().unwrap();
    assert_eq!(summary["admissible_count"], 20);
    assert_eq!(summary["all_nonzero"], true);
    assert!(lines[..20].iter().all(|r| r["class"] == "NonZero"));
}

fn store_lines(path: &Path) -> usize {
    std::fs::read_to_string(path).map(|s| s.lines().count()).unwrap_or(0)
}

#[test]
fn scan_store_appends_once_and_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("scans.jsonl");
    let s = store.to_str().unwrap();
    let first = cyclolog(&["scan", "--q", "5", "--store", s]);
    assert_eq!(code(&first), 0);
    assert_eq!(store_lines(&store), 6);
    let second = cyclolog(&["scan", "--q", "5", "--store", s]);
    assert_eq!(code(&second), 0);
    assert_eq!(store_lines(&store), 6);
    assert_eq!(first.stdout, second.stdout);
    assert!(String::from_utf8_lossy(&second.stderr).contains("6 verified"));

    let text = std::fs::read_to_string(&store).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut v: Value = serde_json::from_str(&lines[0]).unwrap();
    v["L"] = Value::String("0.5".into());
    lines[0] = v.to_string();
    std::fs::write(&store, lines.join("\n") + "\n").unwrap();
    assert_eq!(code(&cyclolog(&["scan", "--q", "5", "--store", s])), 4);
}

#[test]
fn bbw_vanishes() {
    let out = cyclolog(&["bbw", "--q", "9"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["all_vanish"], true);
    assert_eq!(v["kernels"].as_array().unwrap().len(), 3);
    assert_eq!(code(&cyclolog(&["bbw", "--q", "9", "--l", "4"])), 1);
}

#[test]
fn intrel_and_rank() {
    let v = json(&cyclolog(&["intrel", "--q", "7", "--bound", "1000000", "--prec", "512"]));
    assert_eq!(v["verdict"], "NoneBelowBound");
    let v = json(&cyclolog(&["intrel", "--q", "8"]));
    assert_eq!(v["verdict"], "Found");
    let v = json(&cyclolog(&["rank", "--q", "12"]));
    assert_eq!(v["rank"], v["constructed_rank"]);
}

#[test]
fn characters_listing() {
    let v = json(&cyclolog(&["characters", "--q", "7"]));
    assert_eq!(v["count"], 6);
    let v = json(&cyclolog(&["characters", "--q", "7", "--even"]));
    assert_eq!(v["count"], 3);
}

#[test]
fn json_round_trips_byte_identically() {
    let runs: [&[&str]; 8] = [
        &["lseries", "--q", "4", "--f", "1,0,-1,0"],
        &["decompose", "--q", "6", "--f", "1/2,-1,0,1,-1/2,0"],
        &["relations", "--q", "12"],
        &["dedekind", "--p", "7"],
        &["certificate", "--p", "5"],
        &["scan", "--q", "5", "--no-store"],
        &["rank", "--q", "8"],
        &["characters", "--q", "5"],
    ];
    for args in runs {
        let out = stdout(&cyclolog(args));
        for line in out.lines() {
            let v: Value = serde_json::from_str(line).unwrap();
            assert_eq!(serde_json::to_string(&v).unwrap(), line, "{args:?}");
        }
    }
}

/// Keeps the digits a `P`-bit run is entitled to: `P - 16` bits' worth.
fn leading_digits(s: &str, prec: u32) -> String {
    let n = ((prec - 16) as f64 * std::f64::consts::LOG10_2).floor() as usize;
    s.chars().filter(|c| c.is_ascii_digit()).skip_while(|&c| c == '0').take(n).collect()
}

#[test]
fn doubled_precision_agrees() {
    for prec in [64u32, 128, 256] {
        let p = prec.to_string();
        let p2 = (2 * prec).to_string();
        let a = json(&cyclolog(&["lseries", "--q", "7", "--f", "1,2,-1,0,-3,1,0", "--prec", &p]));
        let b = json(&cyclolog(&["lseries", "--q", "7", "--f", "1,2,-1,0,-3,1,0", "--prec", &p2]));
        let (x, y) = (a["L"].as_str().unwrap(), b["L"].as_str().unwrap());
        let n = leading_digits(x, prec).len();
        let tol = 2; // last retained digit may round differently
        assert_eq!(leading_digits(x, prec)[..n - tol], leading_digits(y, prec)[..n - tol], "{x} vs {y}");

        let a = json(&cyclolog(&["dedekind", "--p", "7", "--prec", &p]));
        let b = json(&cyclolog(&["dedekind", "--p", "7", "--prec", &p2]));
        let (x, y) = (a["det_direct"].as_str().unwrap(), b["det_direct"].as_str().unwrap());
        let n = leading_digits(x, prec).len();
        assert_eq!(leading_digits(x, prec)[..n - tol], leading_digits(y, prec)[..n - tol]);
    }
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_cyclolog"))
        .args(["lseries", "--q", "3", "--f", "1,-1,0"])
        .env("CYCLOLOG_PREC", "256")
        .output()
        .unwrap();
    assert_eq!(json(&out)["prec_bits"], 256);
    let out = Command::new(env!("CARGO_BIN_EXE_cyclolog"))
        .args(["lseries", "--q", "3", "--f", "1,-1,0", "--prec", "192"])
        .env("CYCLOLOG_PREC", "256")
        .output()
        .unwrap();
    assert_eq!(json(&out)["prec_bits"], 192);
}

#[test]
fn text_output() {
    let out = cyclolog(&["scan", "--q", "6", "--output", "text", "--no-store"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("parity"));
    let out = cyclolog(&["dedekind", "--p", "5", "--output", "text"]);
    assert!(stdout(&out).contains("agree: true"));
}
