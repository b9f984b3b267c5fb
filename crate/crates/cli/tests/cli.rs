use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_nashimpl");

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/table1.scn")
}

fn nashimpl(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("NASHIMPL_SCENARIO_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nashimpl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const NO_WITNESS: &str = "\
outcomes: a1, a2
profiles: t1, t2
ranking 1 t1: a1 > a2
ranking 2 t1: a2 > a1
ranking 1 t2: a1 > a2
ranking 2 t2: a2 > a1
scr t1: a1
scr t2: a2
utilities: rank-default
";

#[test]
fn check_mu2_prints_witness_and_every_intersection() {
    let f = fixture();
    let o = nashimpl(&["check-mu2", f.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("# nashimpl "));
    assert!(out.contains("sha256="));
    assert!(out.contains("C1(a1,t1) = {a1,a2,a4}"));
    assert!(out.contains("e(a1,t1,a2,t2) = a4"));
    assert_eq!(
        out.lines()
            .filter(|l| l.trim_start().starts_with('['))
            .count(),
        26
    );
    assert!(out.trim_end().ends_with("verdict: satisfied"));
}

#[test]
fn search_finds_a_witness_for_the_fixture() {
    let f = fixture();
    let o = nashimpl(&["check-mu2", f.to_str().unwrap(), "--search"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).trim_end().ends_with("verdict: satisfied"));
}

#[test]
fn violated_condition_exits_five() {
    let p = scratch("violated.scn", NO_WITNESS);
    let o = nashimpl(&["check-mu2", p.to_str().unwrap(), "--search"]);
    assert_eq!(code(&o), 5);
    assert!(stdout(&o).contains("verdict: violated"));
}

#[test]
fn equilibria_match_the_rule() {
    let f = fixture();
    let o = nashimpl(&["equilibria", f.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("profile t1: equilibrium outcomes {a1}"));
    assert!(out.contains("profile t2: equilibrium outcomes {a2}"));
    assert!(out.contains("pairs 576"));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let f = fixture();
    for mech in ["quantum", "algorithmic"] {
        let args = [
            "run",
            f.to_str().unwrap(),
            "--theta",
            "t2",
            "--mech",
            mech,
            "--seed",
            "11",
            "--op1",
            "1.2,0.4",
        ];
        let a = nashimpl(&args);
        let b = nashimpl(&args);
        assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn both_mechanisms_report_the_same_run() {
    let f = fixture();
    let body = |mech: &str| {
        let o = nashimpl(&[
            "run",
            f.to_str().unwrap(),
            "--theta",
            "t2",
            "--mech",
            mech,
            "--seed",
            "5",
            "--json",
        ]);
        assert_eq!(code(&o), 0);
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v
    };
    let (q, a) = (body("quantum"), body("algorithmic"));
    assert_eq!(q["outcome"], a["outcome"]);
    assert_eq!(q["collapse"], a["collapse"]);
}

#[test]
fn algorithmic_mode_rejects_gamma() {
    let f = fixture();
    let o = nashimpl(&[
        "run",
        f.to_str().unwrap(),
        "--theta",
        "t2",
        "--mech",
        "algorithmic",
        "--gamma",
        "pi/4",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_proposition_confirms_the_equilibrium() {
    let f = fixture();
    let o = nashimpl(&[
        "verify-proposition",
        f.to_str().unwrap(),
        "--theta",
        "t2",
        "--grid",
        "21",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("verdict: equilibrium confirmed, outcome a1"));
}

#[test]
fn check_lambda_reports_threshold() {
    let f = fixture();
    let o = nashimpl(&["check-lambda", f.to_str().unwrap(), "--theta", "t2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("threshold: sin2(gamma) = 0.400000000"));
}

#[test]
fn reproduce_paper_matches_every_value() {
    let o = nashimpl(&["reproduce-paper"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("matched 64 of 64"));
    assert!(out.trim_end().ends_with("verdict: reproduced"));
}

#[test]
fn reproduce_paper_flags_a_wrong_expectation() {
    let expected = scratch("wrong.expected", "mu2.verdict = violated\n");
    let o = nashimpl(&["reproduce-paper", "--expected", expected.to_str().unwrap()]);
    assert_eq!(code(&o), 6);
    assert!(stdout(&o).contains("MISMATCH mu2.verdict"));
}

#[test]
fn convert_round_trips() {
    let f = fixture();
    let json = nashimpl(&["convert", f.to_str().unwrap(), "--to", "json"]);
    assert_eq!(code(&json), 0);
    let json_path = scratch("table1.json", &stdout(&json));
    let scn = nashimpl(&["convert", json_path.to_str().unwrap(), "--to", "scn"]);
    assert_eq!(code(&scn), 0);
    let scn_path = scratch("table1-back.scn", &stdout(&scn));
    let again = nashimpl(&["convert", scn_path.to_str().unwrap(), "--to", "json"]);
    assert_eq!(json.stdout, again.stdout);
    let o = nashimpl(&["check-mu2", json_path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
}

#[test]
fn exit_codes() {
    let f = fixture();
    let f = f.to_str().unwrap();
    assert_eq!(code(&nashimpl(&["no-such-command"])), 2);
    assert_eq!(code(&nashimpl(&["check-mu2", "/nonexistent/x.scn"])), 1);
    let bad = scratch("syntax.scn", "outcomes: a1\nranking one t1 a1\n");
    assert_eq!(code(&nashimpl(&["check-mu2", bad.to_str().unwrap()])), 3);
    assert_eq!(
        code(&nashimpl(&["verify-proposition", f, "--theta", "t9"])),
        4
    );
    let missing = scratch("no-witness.scn", NO_WITNESS);
    assert_eq!(
        code(&nashimpl(&["equilibria", missing.to_str().unwrap()])),
        5
    );
}

#[test]
fn syntax_errors_carry_a_position() {
    let bad = scratch("position.scn", "outcomes: a1\nranking one t1 a1\n");
    let o = nashimpl(&["check-mu2", bad.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn scenario_directory_variable_is_searched() {
    let dir = fixture().parent().unwrap().to_path_buf();
    let o = Command::new(BIN)
        .args(["check-mu2", "table1.scn"])
        .env("NASHIMPL_SCENARIO_DIR", &dir)
        .current_dir(std::env::temp_dir())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(code(&nashimpl(&["check-mu2", "definitely-missing.scn"])), 1);
}
