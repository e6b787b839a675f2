mod common;

use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::io::Write;

use common::golden;

fn golden_path(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name).display().to_string()
}

fn deflog(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_deflog"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const DD: &str = "r1: => p.\nr2: => ~p.\nr1 > r2.\nr2 > r1.\n";

#[test]
fn conclusions_of_platypus() {
    let o = deflog(&["conclusions", &golden_path("platypus.dfl"), "--ground"], "");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("platypus.conclusions"));
    assert!(stdout(&o).lines().any(|l| l == "+d mammal(platypus)"));
}

#[test]
fn schema_without_ground_flag_is_a_precondition_error() {
    let o = deflog(&["conclusions", &golden_path("platypus.dfl")], "");
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn empty_theory_with_declared_atom() {
    let o = deflog(&["conclusions", "--atoms", "p"], "");
    assert_eq!(stdout(&o), "-D p\n-D ~p\n-d p\n-d ~p\n");
}

#[test]
fn reserved_symbol_is_a_parse_error() {
    let o = deflog(&["conclusions", "-"], "r: => $p(a).\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:7"));
}

#[test]
fn reduced_mode_precondition_exit_code() {
    let o = deflog(&["conclusions", "--mode", "reduced"], "a.\n");
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("reduced mode precondition"));
}

#[test]
fn transform_normal_output_parses_back_to_listing() {
    let o = deflog(&["transform", &golden_path("facts_and_strict.dfl"), "--stage", "normal"], "");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(common::generated(&stdout(&o)), common::generated(&golden("facts_and_strict.normal.dfl")));
}

#[test]
fn transform_elim_sup_and_elim_dft_listings() {
    let o = deflog(&["transform", &golden_path("penguin.dfl"), "--stage", "elim-sup"], "");
    assert_eq!(common::generated(&stdout(&o)), common::generated(&golden("penguin.elim_sup.dfl")));
    let o = deflog(&["transform", &golden_path("penguin.dfl"), "--stage", "elim-dft"], "");
    assert_eq!(common::generated(&stdout(&o)), common::generated(&golden("penguin.elim_dft.dfl")));
}

#[test]
fn transform_report_keeps_output_parseable() {
    let o = deflog(&["transform", "--stage", "pipeline", "--report"], "a.\nr: a -> b.\n");
    let text = stdout(&o);
    assert!(text.contains("% growth factor:"));
    let t = common::generated(&text);
    assert_eq!(t.fact_count(), 0);
}

#[test]
fn elim_sup_on_theory_with_fact_exits_3() {
    let o = deflog(&["transform", "--stage", "elim-sup"], "a.\n");
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("elim_sup requires normal form"));
}

#[test]
fn check_well_formed_on_dd() {
    let o = deflog(&["check", "-", "--what", "well-formed"], DD);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("cyclic superiority"));
}

#[test]
fn check_normal() {
    let o = deflog(&["check", "-", "--what", "normal"], "a.\n");
    assert_eq!(o.status.code(), Some(1));
    let o = deflog(&["check", "-", "--what", "normal"], "r: => a.\n");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn check_equivalence() {
    let dir = tempfile::tempdir().unwrap();
    let normal = dir.path().join("normal.dfl");
    std::fs::write(&normal, golden("facts_and_strict.normal.dfl")).unwrap();
    let normal = normal.display().to_string();
    let args = ["check", &golden_path("facts_and_strict.dfl"), &normal, "--what", "equiv", "--sigma", "e,a,b,c,d"];
    assert_eq!(deflog(&args, "").status.code(), Some(0));
    assert_eq!(deflog(&args[..5], "").status.code(), Some(0));

    // a -> b with -> a, against normal(a -> b) with -> a.
    let united = dir.path().join("united.dfl");
    std::fs::write(&united, "r1: a -> b.\nr2: -> a.\n").unwrap();
    let mixed = dir.path().join("mixed.dfl");
    std::fs::write(&mixed, "r1$p: $p(a) -> $p(b).\nr1: a => b.\n$b(b): $p(b) -> b.\nr2: -> a.\n").unwrap();
    let o = deflog(&["check", &united.display().to_string(), &mixed.display().to_string(), "--what", "equiv"], "");
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not equivalent"));
}

#[test]
fn classify_lines() {
    for (src, line) in [
        ("r: p -> p.\n", "p: A  ~p: F  pair: Poss\n"),
        (DD, "p: D  ~p: D  pair: NP3\n"),
        ("r: => p.\n", "p: D  ~p: F  pair: Poss\n"),
    ] {
        let o = deflog(&["classify", "--atom", "p"], src);
        assert_eq!(stdout(&o), line, "{src}");
    }
    assert_eq!(deflog(&["classify", "--atom", "q"], "r: => p.\n").status.code(), Some(3));
}

#[test]
fn gen_is_deterministic_and_checks_properties() {
    let a = deflog(&["gen", "--seed", "5", "--count", "3"], "");
    let b = deflog(&["gen", "--seed", "5", "--count", "3"], "");
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
    let o = deflog(&["gen", "--count", "50", "--well-formed", "--check", "pipeline"], "");
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(deflog(&["gen", "--atoms", "0"], "").status.code(), Some(3));
}

#[test]
fn failing_property_dumps_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    // Cyclic theories fail the acyclic-table property.
    let o = deflog(&["gen", "--count", "30", "--sup", "0.9", "--check", "table", "--fail-dir", &d], "");
    assert_eq!(o.status.code(), Some(1));
    let dumped: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert!(!dumped.is_empty());
    let path = dumped[0].as_ref().unwrap().path();
    assert_eq!(path.extension().unwrap(), "dfl");
    common::generated(&std::fs::read_to_string(path).unwrap());
}

#[test]
fn fail_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_deflog"))
        .args(["gen", "--count", "30", "--sup", "0.9", "--check", "table"])
        .env("DEFLOG_FAIL_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_some());
}

#[test]
fn in_process_entry_point_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = deflog::cli::run(["deflog", "classify", "--atom", "p"], &mut DD.as_bytes(), &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(out, deflog(&["classify", "--atom", "p"], DD).stdout);
    assert_eq!(deflog::cli::run(["deflog", "bogus"], &mut &b""[..], &mut out, &mut err), 2);
}
