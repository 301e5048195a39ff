use propcalc::cli::{emit, parse_report, run, Format, Status, Suite, SuiteConfig, SHIPPED};
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_propcalc"))
}

fn fixture(name: &str) -> String {
    SHIPPED.iter().find(|(n, _)| *n == name).unwrap().1.to_string()
}

fn write_tmp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("propcalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn light() -> SuiteConfig {
    SuiteConfig { suites: vec![Suite::CobarD2, Suite::Filtration, Suite::McCorrespondence], max_weight: 2, ..Default::default() }
}

#[test]
fn identical_configs_give_identical_reports() {
    let a = run(&light()).unwrap().without_timing();
    let b = run(&light()).unwrap().without_timing();
    assert_eq!(emit(&a, Format::Json), emit(&b, Format::Json));
    assert_eq!(emit(&a, Format::Text), emit(&b, Format::Text));
}

#[test]
fn json_report_round_trips() {
    let r = run(&light()).unwrap();
    assert_eq!(parse_report(&emit(&r, Format::Json)).unwrap(), r);
    let names: Vec<_> = r.checks.iter().map(|c| (c.suite, c.name.clone())).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn full_suite_is_the_union_of_single_suites() {
    let mut cfg = light();
    let all = run(&cfg).unwrap().without_timing();
    let mut parts = Vec::new();
    for s in cfg.suites.clone() {
        cfg.suites = vec![s];
        parts.extend(run(&cfg).unwrap().without_timing().checks);
    }
    parts.sort_by(|a, b| (a.suite, &a.name).cmp(&(b.suite, &b.name)));
    assert_eq!(all.checks.len(), parts.len());
    assert!(all.checks.iter().zip(&parts).all(|(a, b)| a.name == b.name && a.status == b.status));
}

#[test]
fn corrupted_brackets_fail_with_a_reproducer() {
    let cfg = SuiteConfig {
        suites: vec![Suite::Linf],
        negative_control: true,
        max_weight: 2,
        bracket_arity: 3,
        ..Default::default()
    };
    let r = run(&cfg).unwrap();
    assert!(!r.passed());
    let bad = r.checks.iter().find(|c| c.status == Status::Fail).unwrap();
    let ce = bad.counterexample.as_ref().unwrap();
    assert!(!ce.inputs.is_empty());
    assert_eq!(ce.inputs.len(), ce.arity);
}

#[test]
fn trivial_coproperad_from_a_file() {
    let p = write_tmp("trivial.cop", &fixture("trivial"));
    let out = bin().args(["--suite", "cobar-d2", "--coproperad"]).arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS cobar-d2/trivial/cobar cases=0"));
    assert!(text.contains("0 generators"));
}

#[test]
fn exit_codes() {
    let ok = bin().args(["--suite", "maps", "--format", "json"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(parse_report(&String::from_utf8(ok.stdout).unwrap()).unwrap().passed());

    let failing = bin().args(["--suite", "jacobi", "--negative-control", "--bracket-arity", "2", "--max-weight", "2"]).output().unwrap();
    assert_eq!(failing.status.code(), Some(1));
    assert!(String::from_utf8(failing.stdout).unwrap().contains("counterexample"));

    for args in [&["--suite", "nope"][..], &["--max-arity", "3"], &["--max-weight", "0"]] {
        assert_eq!(bin().args(args).output().unwrap().status.code(), Some(2), "{args:?}");
    }

    let garbage = write_tmp("garbage.cop", "[generators]\nx 1 2\n");
    let out = bin().arg("--coproperad").arg(&garbage).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2"));

    let broken = fixture("ainfty").replacen("c3 -> -1 *", "c3 -> 1 *", 1);
    let out = bin().arg("--coproperad").arg(write_tmp("broken.cop", &broken)).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
