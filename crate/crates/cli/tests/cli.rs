use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn tchar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tchar"))
        .args(args)
        .env_remove("TCHAR_HORIZON")
        .output()
        .expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("bad json line {l}: {e}")))
        .collect()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn decide_exit_codes_follow_the_answer() {
    let yes = tchar(&["decide", "--annihilator", "Z:1", "--gdelta", "--proper"]);
    assert_eq!(code(&yes), 0);
    assert_eq!(json_lines(&yes)[0]["answer"], "yes");

    let no = tchar(&["decide", "--annihilator", "Z(2):1", "--gdelta", "--proper"]);
    assert_eq!(code(&no), 1);
    assert_eq!(json_lines(&no)[0]["answer"], "no");

    let omega = tchar(&["decide", "--annihilator", "Z(2):omega", "--gdelta", "--proper"]);
    assert_eq!(code(&omega), 0);
}

#[test]
fn decide_reads_descriptor_files() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "Z(2):omega + Z(4):1").unwrap();
    let out = tchar(&["decide", "--annihilator", f.path().to_str().unwrap(), "--gdelta", "--proper"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json_lines(&out)[0]["annihilator"], "Z(2):omega + Z(4):1");
}

#[test]
fn malformed_descriptor_exits_two_with_a_column() {
    let out = tchar(&["decide", "--annihilator", "Z:1 + Q:1", "--gdelta", "--proper"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("column 7"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn decide_other_queries() {
    let c = tchar(&["decide", "--annihilator", "Z:1", "--query", "connected"]);
    assert_eq!(code(&c), 0);
    let d = tchar(&["decide", "--annihilator", "Z(2):1 + Z:1", "--query", "connected"]);
    assert_eq!(code(&d), 1);
    let m = tchar(&["decide", "--annihilator", "Z(3):5", "--query", "minap"]);
    assert_eq!(code(&m), 1);
    assert_eq!(json_lines(&m)[0]["branch"], "finite");
}

#[test]
fn member_verdicts_and_exit_codes() {
    let zero = tchar(&["member", "--element", "model=padic p=2 nk=squares prefix=[] tail=zero"]);
    assert_eq!(code(&zero), 0);
    assert_eq!(json_lines(&zero)[0]["outcome"], "Member");

    let limit = tchar(&["member", "--element", "model=product bases=geom(2,2) prefix=[0,1] tail=scaledfloor(1/250)"]);
    assert_eq!(code(&limit), 1);
    let v = &json_lines(&limit)[0];
    assert_eq!(v["outcome"], "NonMember");
    assert_eq!(v["limit"], "1/250");
    assert_eq!(v["criterion"], "eq5");
    assert_eq!(v["trace_len"], 256);
    assert_eq!(v["consistent"], true);

    let open = tchar(&["member", "--element", "model=padic p=2 nk=arith(1,3) prefix=[1] tail=periodic([0,1,1])"]);
    assert_eq!(code(&open), 3);
    assert_eq!(json_lines(&open)[0]["outcome"], "Undetermined");
}

#[test]
fn member_model_mismatch_exits_two() {
    let out = tchar(&[
        "member",
        "--element",
        "model=torus bases=arith(2,1) prefix=[1] tail=zero",
        "--sequence",
        "model=padic p=2 nk=squares",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn member_batches_report_the_least_settled_verdict() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# two points").unwrap();
    writeln!(f, "model=torus bases=arith(100,100) prefix=[0,3] tail=zero").unwrap();
    writeln!(f, "model=torus bases=arith(100,100) prefix=[0,0] tail=scaledfloor(1/250)").unwrap();
    let out = tchar(&["member", "--element", f.path().to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let v = json_lines(&out);
    assert_eq!(v.len(), 2);
    assert_eq!(v[0]["outcome"], "Member");
    assert_eq!(v[1]["limit"], "1/250");
}

#[test]
fn horizon_flag_beats_environment() {
    let line = "model=product bases=geom(2,2) prefix=[] tail=const(1)";
    let env_only = Command::new(env!("CARGO_BIN_EXE_tchar"))
        .args(["member", "--element", line])
        .env("TCHAR_HORIZON", "40")
        .output()
        .unwrap();
    assert_eq!(json_lines(&env_only)[0]["trace_len"], 40);
    let both = Command::new(env!("CARGO_BIN_EXE_tchar"))
        .args(["--horizon", "64", "member", "--element", line])
        .env("TCHAR_HORIZON", "40")
        .output()
        .unwrap();
    assert_eq!(json_lines(&both)[0]["trace_len"], 64);
    let default = tchar(&["member", "--element", line]);
    assert_eq!(json_lines(&default)[0]["trace_len"], 256);
}

#[test]
fn pair_padic_example() {
    let out = tchar(&["pair", "--model", "padic", "--p", "2", "--char", "1/8", "--element", "[1,1,0]"]);
    assert_eq!(code(&out), 0);
    let v = &json_lines(&out)[0];
    assert_eq!(v["angle"], "3/8");
    assert_eq!(v["exact"], true);
}

#[test]
fn pair_torus_and_product() {
    let t = tchar(&["pair", "--model", "torus", "--bases", "arith(2,1)", "--char", "2", "--element", "[1,2]"]);
    // x = 1/2 + 2/6 = 5/6, and 2x = 5/3
    assert_eq!(json_lines(&t)[0]["angle"], "2/3");
    let p = tchar(&["pair", "--model", "product", "--bases", "geom(2,2)", "--char", "[1,1]", "--element", "[1,3]"]);
    // 1/2 + 3/4
    assert_eq!(json_lines(&p)[0]["angle"], "1/4");
}

#[test]
fn witness_case_b_passes_and_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.jsonl");
    let out = tchar(&[
        "witness",
        "--family",
        "auto",
        "--descriptor",
        "Zp(2,inf):1",
        "--epsilon",
        "2/25",
        "--scale",
        "40",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = &json_lines(&out)[0];
    assert_eq!(summary["family"], "B");
    assert_eq!(summary["failed"], 0);
    assert_eq!(summary["s"], 8);
    assert_eq!(summary["l"], 9);
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let (last, checks) = lines.split_last().unwrap();
    assert_eq!(last["type"], "summary");
    assert!(checks.iter().all(|c| c["type"] == "budget_check" && c["pass"] == true));
    assert_eq!(checks.len() as u64, last["checks"].as_u64().unwrap());
    // the limit element re-parses
    let limit = last["limit"].as_str().unwrap();
    let again = tchar(&["member", "--element", limit]);
    assert_eq!(json_lines(&again)[0]["limit"], "8");
}

#[test]
fn witness_csv_is_a_budget_table() {
    let out = tchar(&["--format", "csv", "witness", "--family", "c", "--epsilon", "2/25", "--scale", "10"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let mut rows = text.lines();
    let header = rows.next().unwrap();
    assert!(header.contains("name") && header.contains("pass"));
    assert!(rows.all(|r| r.contains("true")));
}

#[test]
fn witness_rejects_bad_epsilon_and_bounded_groups() {
    let eps = tchar(&["witness", "--descriptor", "Z:1", "--epsilon", "1/5", "--scale", "4"]);
    assert_eq!(code(&eps), 2);
    let bounded = tchar(&["witness", "--descriptor", "Z(4):omega", "--epsilon", "2/25", "--scale", "4"]);
    assert_eq!(code(&bounded), 2);
}

#[test]
fn verify_sandwich_suite() {
    let out = tchar(&["verify", "--suite", "eq02", "--samples", "10000"]);
    assert_eq!(code(&out), 0);
    let v = &json_lines(&out)[0];
    assert_eq!(v["pass"], true);
    assert_eq!(v["checked"], 10000);
}

#[test]
fn verify_remaining_suites() {
    for suite in ["membership", "decision", "budgets"] {
        let out = tchar(&["--horizon", "96", "verify", "--suite", suite, "--samples", "12"]);
        assert_eq!(code(&out), 0, "{suite}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn encode_emits_a_parsable_element() {
    let out = tchar(&["encode", "--bases", "arith(2,1)", "--value", "5/6"]);
    assert_eq!(code(&out), 0);
    let v = &json_lines(&out)[0];
    assert_eq!(v["element"], "model=torus bases=arith(2,1) prefix=[1,2] tail=zero");
    let back = tchar(&["member", "--element", v["element"].as_str().unwrap()]);
    assert_eq!(code(&back), 0);
    let bad = tchar(&["encode", "--bases", "arith(2,1)", "--value", "3/2"]);
    assert_eq!(code(&bad), 2);
}
