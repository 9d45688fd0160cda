use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn tsmr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsmr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn first_line(o: &Output) -> String {
    stdout(o).lines().next().unwrap_or("").to_string()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = tsmr(&all);
    let v = serde_json::from_str(stdout(&o).trim()).expect("one JSON object");
    (v, code(&o))
}

#[test]
fn winner_of_example1() {
    let o = tsmr(&["winner", "--rule", "tsmr", &fixture("example1.elec")]);
    assert_eq!(code(&o), 0);
    assert_eq!(first_line(&o), "a");
}

#[test]
fn ccdc_with_zero_budget_keeps_the_winner() {
    let o = tsmr(&[
        "control",
        "--variant",
        "ccdc",
        "--target",
        "a",
        "-k",
        "0",
        &fixture("example1.elec"),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(first_line(&o), "feasible");
    assert!(stdout(&o).contains("# witness: no changes"));
    let (v, c) = json(&[
        "control",
        "--variant",
        "ccdc",
        "--target",
        "a",
        "-k",
        "0",
        &fixture("example1.elec"),
    ]);
    assert_eq!(c, 0);
    assert_eq!(v["witness"], Value::Array(vec![]));
}

#[test]
fn missing_agenda_is_a_usage_error() {
    let o = tsmr(&["winner", "--rule", "tsmr", &fixture("missing-agenda.elec")]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("agenda required"), "{}", stderr(&o));
}

#[test]
fn parse_errors_name_file_and_line() {
    let o = tsmr(&["winner", &fixture("malformed.elec")]);
    assert_eq!(code(&o), 2);
    assert!(
        stderr(&o).contains("malformed.elec:3: unknown candidate"),
        "{}",
        stderr(&o)
    );
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn unknown_flag_and_value_are_usage_errors() {
    assert_eq!(
        code(&tsmr(&["winner", "--bogus", &fixture("example1.elec")])),
        2
    );
    assert_eq!(
        code(&tsmr(&[
            "winner",
            "--rule",
            "plurality",
            &fixture("example1.elec")
        ])),
        2
    );
    assert_eq!(code(&tsmr(&["frobnicate"])), 2);
}

#[test]
fn all_agendas_cap_and_override() {
    let o = tsmr(&["winner", "--all-agendas", &fixture("nine.elec")]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("exceeds cap"));

    let o = tsmr(&["winner", "--all-agendas", &fixture("example1.elec")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("agendas: 24"));
    assert!(stdout(&o).contains("agenda a b c d: a"));

    let o = tsmr(&[
        "--cap",
        "30",
        "winner",
        "--all-agendas",
        &fixture("example1.elec"),
    ]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"));
    let o = tsmr(&[
        "--cap",
        "10",
        "winner",
        "--all-agendas",
        &fixture("example1.elec"),
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn agenda_control_and_manipulation_verdicts() {
    let o = tsmr(&["agenda-control", "--target", "c", &fixture("example1.elec")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("agenda: "));

    let o = tsmr(&[
        "manipulate",
        "--target",
        "b",
        "-k",
        "1",
        &fixture("example1.elec"),
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("ballot: b > a > c > d"));
    assert!(stdout(&o).contains("vote 1: b > a > c > d"));

    // unanimous 0 > 1 > 2: the bottom candidate can never win
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("unanimous.elec");
    std::fs::write(
        &path,
        "candidates: x y z\nagenda: x y z\nvote 3: x > y > z\n",
    )
    .unwrap();
    let path = path.to_str().unwrap();
    let o = tsmr(&["agenda-control", "--target", "z", path]);
    assert_eq!(code(&o), 1);
    assert_eq!(first_line(&o), "infeasible");
    let o = tsmr(&["manipulate", "--target", "z", "-k", "1", path]);
    assert_eq!(code(&o), 1);
}

#[test]
fn control_variants_from_files() {
    let o = tsmr(&["control", "--variant", "ccav", &fixture("ccav.elec")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("add_vote 1: p > q > r"));

    let o = tsmr(&[
        "control",
        "--variant",
        "ccav",
        "-k",
        "0",
        &fixture("ccav.elec"),
    ]);
    assert_eq!(code(&o), 1);

    // p is last, so adding candidates never helps
    let o = tsmr(&["control", "--variant", "ccac", &fixture("ccac.elec")]);
    assert_eq!(code(&o), 1);

    let poly = tsmr(&[
        "control",
        "--variant",
        "dcdc",
        "--target",
        "a",
        "-k",
        "1",
        &fixture("example1.elec"),
    ]);
    let exact = tsmr(&[
        "control",
        "--variant",
        "dcdc",
        "--target",
        "a",
        "-k",
        "1",
        "--exact",
        &fixture("example1.elec"),
    ]);
    assert_eq!(code(&poly), code(&exact));
    assert!(stdout(&poly).contains("method: polynomial"));
    assert!(stdout(&exact).contains("method: exact"));
}

#[test]
fn budget_beyond_supply_is_rejected() {
    let o = tsmr(&[
        "control",
        "--variant",
        "ccav",
        "-k",
        "9",
        &fixture("ccav.elec"),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn partial_information_verdicts() {
    let o = tsmr(&["possible", &fixture("partial.elec")]);
    assert_eq!(code(&o), 0);
    let o = tsmr(&["necessary", &fixture("partial.elec")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("# witness"));

    let o = tsmr(&["possible", &fixture("p-last.elec")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("method: p-last"));

    let o = tsmr(&["possible", "--budget", "3", &fixture("partial.elec")]);
    assert_eq!(code(&o), 3);
}

#[test]
fn necessary_winner_on_a_complete_election() {
    let o = tsmr(&["necessary", "--target", "a", &fixture("example1.elec")]);
    assert_eq!(code(&o), 0);
    let o = tsmr(&["necessary", "--target", "b", &fixture("example1.elec")]);
    assert_eq!(code(&o), 1);
}

#[test]
fn json_and_text_agree() {
    let cases: Vec<Vec<String>> = vec![
        vec!["winner".into(), fixture("example1.elec")],
        vec![
            "agenda-control".into(),
            "--target".into(),
            "d".into(),
            fixture("example1.elec"),
        ],
        vec![
            "control".into(),
            "--variant".into(),
            "ccav".into(),
            fixture("ccav.elec"),
        ],
        vec![
            "control".into(),
            "--variant".into(),
            "ccac".into(),
            fixture("ccac.elec"),
        ],
        vec!["possible".into(), fixture("partial.elec")],
        vec!["necessary".into(), fixture("partial.elec")],
        vec!["lint".into(), fixture("tie.elec")],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let plain = tsmr(&args);
        let (v, c) = json(&args);
        assert_eq!(code(&plain), c, "{args:?}");
        assert_eq!(
            v["verdict"].as_str().unwrap(),
            first_line(&plain),
            "{args:?}"
        );
        assert_eq!(v["exit_code"].as_i64().unwrap(), i64::from(c));
    }
}

#[test]
fn reduce_writes_a_parseable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ccav.elec");
    let out = out.to_str().unwrap();
    let o = tsmr(&[
        "reduce",
        "--theorem",
        "ccav-first",
        &fixture("star.rbds"),
        "-o",
        out,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let lint = tsmr(&["lint", out]);
    assert_eq!(code(&lint), 0);
    assert!(stdout(&lint).contains("kind: control"));
    // star.rbds is a yes-instance (b2 covers every red vertex)
    let o = tsmr(&["control", "--variant", "ccav", out]);
    assert_eq!(code(&o), 0);

    let o = tsmr(&["reduce", "--theorem", "pw-first", &fixture("star.rbds")]);
    assert_eq!(code(&o), 2);
    let o = tsmr(&[
        "reduce",
        "--theorem",
        "pw-first",
        "--normalize",
        &fixture("star.rbds"),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("pvote"));
}

#[test]
fn verify_reduction_report() {
    let o = tsmr(&[
        "verify-reduction",
        "--theorem",
        "dcav-nonlast",
        "--max-red",
        "2",
        "--max-blue",
        "2",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(first_line(&o), "pass");
    assert!(stdout(&o).contains("discrepancies: 0"));
    let o = tsmr(&[
        "verify-reduction",
        "--theorem",
        "ccav-first",
        "--max-red",
        "5",
        "--max-blue",
        "5",
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn lint_reports_ties_and_canonical_text() {
    let o = tsmr(&["lint", &fixture("tie.elec")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("tied_pairs: a=b"));
    let o = tsmr(&["lint", "--canonical", &fixture("partial.elec")]);
    assert!(stdout(&o).contains("pagenda: a > b"));
    let o = tsmr(&["lint", &fixture("star.rbds")]);
    assert!(stdout(&o).contains("kind: rbds"));
}

#[test]
fn sequential_thread_setting() {
    let o = Command::new(env!("CARGO_BIN_EXE_tsmr"))
        .args(["possible", &fixture("partial.elec")])
        .env("TSMR_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}
