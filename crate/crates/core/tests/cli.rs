use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use fairknap::instances::{fixture, FixtureName};
use fairknap::model::{kappa, validate_allocation, Allocation};
use fairknap::rational::{int, rat};
use fairknap::Instance;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fairknap"));
    cmd.env_remove("FAIRKNAP_ENUM_BOUND");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fixture_file(dir: &TempDir, name: FixtureName, eps: &str) -> PathBuf {
    let out = run(&["fixture", "--name", &name.to_string(), "--epsilon", eps]);
    assert!(out.status.success());
    write(dir, &format!("{name}.json"), &stdout(&out))
}

fn verify_ratio(instance: &Path, alloc: &Path, extra: &[&str]) -> (i32, serde_json::Value) {
    let mut args = vec!["verify", "--instance", s(instance), "--alloc", s(alloc)];
    args.extend_from_slice(extra);
    let out = run(&args);
    let code = out.status.code().unwrap();
    let json = if code == 0 {
        serde_json::from_str(&stdout(&out)).unwrap()
    } else {
        serde_json::Value::Null
    };
    (code, json)
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let a = run(&["gen", "--n", "2", "--m", "8", "--seed", "7"]);
    let b = run(&["gen", "--n", "2", "--m", "8", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let inst = Instance::from_json(&stdout(&a)).unwrap();
    assert_eq!((inst.agents(), inst.item_count()), (2, 8));
}

#[test]
fn gen_honours_kappa_floor() {
    let out = run(&["gen", "--n", "2", "--m", "8", "--seed", "7", "--kappa-floor", "10"]);
    let inst = Instance::from_json(&stdout(&out)).unwrap();
    assert!(kappa(&inst).unwrap() >= int(10));
}

#[test]
fn gen_rejects_bad_flags() {
    assert_eq!(run(&["gen", "--m", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--values", "3:1"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--n", "0"]).status.code(), Some(2));
}

#[test]
fn solve_greedy_on_table3() {
    let dir = TempDir::new().unwrap();
    let inst = fixture_file(&dir, FixtureName::Table3, "1/100");
    let trace = dir.path().join("trace.jsonl");
    let out = run(&["solve", "--alg", "greedy", "--input", s(&inst), "--trace", s(&trace)]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), r#"{"bundles":{"0":[],"1":[1,3],"2":[2,4,5,6]}}"#);

    let lines: Vec<serde_json::Value> = std::fs::read_to_string(&trace)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 8);
    assert_eq!(lines[3]["item"], 4);
    assert_eq!(lines[3]["levels"], serde_json::json!([1, 2]));
    assert_eq!(lines[3]["sizes"], serde_json::json!(["1000001/1000000", "201/100"]));

    let alloc = write(&dir, "alloc.json", &stdout(&out));
    let (code, report) = verify_ratio(&inst, &alloc, &["--notion", "ef1"]);
    assert_eq!(code, 0);
    assert_eq!(report["ratio"], "101/194");
    assert_eq!(report["witnesses"][0]["subset"], serde_json::json!([2, 5, 6]));
}

#[test]
fn solve_uniform_on_table1() {
    let dir = TempDir::new().unwrap();
    let inst_path = fixture_file(&dir, FixtureName::Table1, "1/10");
    let out = run(&["solve", "--alg", "uniform", "--input", s(&inst_path)]);
    assert!(out.status.success());
    let alloc = Allocation::from_json(&stdout(&out)).unwrap();
    let inst = fixture(FixtureName::Table1, &rat(1, 10)).unwrap();
    for agent in 0..2 {
        assert_eq!(alloc.agent_bundle(agent).len(), 10);
        assert_eq!(common_value(&inst, alloc.agent_bundle(agent)), int(5));
    }
}

fn common_value(inst: &Instance, bundle: &[usize]) -> fairknap::Rational {
    bundle.iter().map(|&j| inst.item(j).value.clone()).sum()
}

#[test]
fn solve_reports_unmet_preconditions() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "i.json",
        r#"{"budgets": ["1", "2"], "items": [{"value": "1", "size": "1"}]}"#,
    );
    assert_eq!(
        run(&["solve", "--alg", "uniform", "--input", s(&inst)]).status.code(),
        Some(4)
    );
    let three = write(&dir, "three.json", r#"{"budgets": ["1", "1", "1"], "items": []}"#);
    assert_eq!(
        run(&["solve", "--alg", "two", "--input", s(&three)]).status.code(),
        Some(4)
    );
    let bad = write(
        &dir,
        "bad.json",
        r#"{"budgets": ["1"], "items": [{"value": "1", "size": "0"}]}"#,
    );
    assert_eq!(
        run(&["solve", "--alg", "greedy", "--input", s(&bad)]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["solve", "--alg", "rr", "--input", s(&inst), "--trace", "t"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn two_agent_selection_flag() {
    let dir = TempDir::new().unwrap();
    let inst = fixture_file(&dir, FixtureName::Table2, "1/10");
    for (sel, expected) in [("proof", "1"), ("argmin", "2/9")] {
        let out = run(&["solve", "--alg", "two", "--selection", sel, "--input", s(&inst)]);
        let alloc = write(&dir, &format!("{sel}.json"), &stdout(&out));
        let (_, report) = verify_ratio(&inst, &alloc, &[]);
        assert_eq!(report["ratio"], expected, "{sel}");
    }
}

#[test]
fn verify_density_greedy_on_table2() {
    let dir = TempDir::new().unwrap();
    let inst = fixture_file(&dir, FixtureName::Table2, "1/10");
    let out = run(&["solve", "--alg", "dgreedy", "--input", s(&inst)]);
    let alloc = write(&dir, "a.json", &stdout(&out));
    let (code, report) = verify_ratio(&inst, &alloc, &["--notion", "ef1"]);
    assert_eq!(code, 0);
    assert_eq!(report["ratio"], "2/9");
}

#[test]
fn verify_enumeration_bound() {
    let dir = TempDir::new().unwrap();
    let items: Vec<String> = (0..30)
        .map(|_| r#"{"value": "1", "size": "1/10"}"#.to_string())
        .collect();
    let inst = write(
        &dir,
        "big.json",
        &format!(r#"{{"budgets": ["1"], "items": [{}]}}"#, items.join(",")),
    );
    let ids: Vec<String> = (1..=30).map(|j| j.to_string()).collect();
    let alloc = write(
        &dir,
        "a.json",
        &format!(r#"{{"bundles": {{"0": [{}]}}}}"#, ids.join(",")),
    );
    assert_eq!(verify_ratio(&inst, &alloc, &[]).0, 3);
    let (code, report) = verify_ratio(&inst, &alloc, &["--bound", "30"]);
    assert_eq!(code, 0);
    assert_eq!(report["ratio"], "0");

    let out = bin()
        .env("FAIRKNAP_ENUM_BOUND", "40")
        .args(["verify", "--instance", s(&inst), "--alloc", s(&alloc)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_rejects_invalid_allocations() {
    let dir = TempDir::new().unwrap();
    let inst = fixture_file(&dir, FixtureName::Table2, "1/10");
    let dup = write(&dir, "dup.json", r#"{"bundles": {"0": [3], "1": [1, 2], "2": [2]}}"#);
    assert_eq!(verify_ratio(&inst, &dup, &[]).0, 2);
    let over = write(&dir, "over.json", r#"{"bundles": {"1": [1, 2, 3]}}"#);
    assert_eq!(verify_ratio(&inst, &over, &[]).0, 2);
    let missing = dir.path().join("nope.json");
    assert_eq!(verify_ratio(&inst, &missing, &[]).0, 2);
}

#[test]
fn gen_solve_verify_pipeline() {
    let dir = TempDir::new().unwrap();
    for alg in ["greedy", "rr", "dgreedy", "nsw"] {
        let gen = run(&["gen", "--n", "3", "--m", "7", "--seed", "11"]);
        let mut child = bin()
            .args(["solve", "--alg", alg, "--input", "-"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .unwrap();
        child.stdin.take().unwrap().write_all(&gen.stdout).unwrap();
        let solved = child.wait_with_output().unwrap();
        assert!(solved.status.success(), "{alg}");
        let inst = Instance::from_json(&stdout(&gen)).unwrap();
        let alloc = Allocation::from_json(&stdout(&solved)).unwrap();
        assert_eq!(validate_allocation(&inst, &alloc), Ok(()));
        let ip = write(&dir, "i.json", &stdout(&gen));
        let ap = write(&dir, "a.json", &stdout(&solved));
        let (code, _) = verify_ratio(&ip, &ap, &["--notion", "ef"]);
        assert_eq!(code, 0, "{alg}");
    }
}

fn parse_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn sweep_rows_meet_the_large_budget_bound() {
    let out = run(&[
        "sweep", "--kappas", "10", "--trials", "50", "--seed", "3", "--algs", "greedy",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), fairknap::cli::SWEEP_HEADER);
    let rows = parse_rows(&text);
    assert_eq!(rows.len(), 50);
    for row in rows {
        let ratio = rat(row[6].parse().unwrap(), row[7].parse().unwrap());
        assert!(ratio >= rat(9, 10), "{row:?}");
        assert!(ratio >= rat(1, 2));
    }
}

#[test]
fn sweep_is_deterministic_apart_from_runtime() {
    let args = [
        "sweep",
        "--kappas",
        "2,4",
        "--trials",
        "5",
        "--seed",
        "9",
        "--algs",
        "greedy,nsw,rr",
    ];
    let strip = |o: Output| -> Vec<String> {
        stdout(&o)
            .lines()
            .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
            .collect()
    };
    let a = strip(run(&args));
    let b = strip(run(&args));
    assert_eq!(a, b);
    assert_eq!(a.len(), 1 + 2 * 5 * 3);
}

#[test]
fn sweep_edge_cases() {
    let out = run(&["sweep", "--trials", "0"]);
    assert_eq!(stdout(&out), format!("{}\n", fairknap::cli::SWEEP_HEADER));
    assert_eq!(run(&["sweep", "--algs", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--kappas", "x"]).status.code(), Some(2));
}

#[test]
fn fixture_rejects_bad_epsilon() {
    assert_eq!(
        run(&["fixture", "--name", "table2", "--epsilon", "1/2"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["fixture", "--name", "table9"]).status.code(), Some(2));
}
