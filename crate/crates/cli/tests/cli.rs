use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        Files { dir: tempfile::tempdir().unwrap() }
    }

    fn put(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn monitors(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_monitors"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn run_reports_rejection() {
    let f = Files::new();
    let m = f.put("m.mon", "a.yes + b.no\n");
    let o = monitors(&["run", "-m", m.to_str().unwrap(), "-t", "b"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "REJECTED at prefix 1\n");
}

#[test]
fn equivalence_exit_codes() {
    let f = Files::new();
    let no = f.put("no.mon", "no");
    let sum = f.put("sum_no.mon", "a.no + b.no");
    let args = ["equiv", "--m1", no.to_str().unwrap(), "--m2", sum.to_str().unwrap()];
    let o = monitors(&args, None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("trace ε"), "{}", stdout(&o));
    let o = monitors(&[&args[..], &["--omega"]].concat(), None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "EQUIVALENT\n");
}

#[test]
fn gap_bench_prints_table() {
    let o = monitors(&["bench", "gap", "--family", "A", "--l", "1"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("label\tparallel_size"));
    assert!(lines[1].starts_with("A:l=1\t"));
}

#[test]
fn input_errors_exit_two() {
    let o = monitors(&["parse"], Some("a.yes +"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[input]: syntax error"), "{}", stderr(&o));
    let o = monitors(&["run", "-t", "c"], Some("a.yes"));
    assert_eq!(o.status.code(), Some(2));
    let o = monitors(&["eval", "--lasso", "a:"], Some("[a]ff"));
    assert_eq!(o.status.code(), Some(2));
    let o = monitors(&["frobnicate"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[usage]"));
}

#[test]
fn resource_guard_exits_three() {
    let o = monitors(&["transform", "--to", "dfa", "--max-states", "3"], Some("a.b.a.yes + b.a.b.yes + end"));
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stderr(&o).starts_with("error[resource]"));
}

#[test]
fn documents_round_trip_through_parse() {
    for text in ["rec x.(a.x + b.no) & (a.yes + end)", "(a.yes + b.end) | no"] {
        let doc = monitors(&["parse", "--format", "doc"], Some(text));
        assert_eq!(doc.status.code(), Some(0));
        let back = monitors(&["parse"], Some(&stdout(&doc)));
        let direct = monitors(&["parse"], Some(text));
        assert_eq!(stdout(&back), stdout(&direct));
    }
    let doc = monitors(&["parse", "--formula", "--format", "doc"], Some("max X.([a]X && [b]ff)"));
    let back = monitors(&["parse", "--formula"], Some(&stdout(&doc)));
    assert_eq!(stdout(&back), "max X.([a]X && [b]ff)\n");
}

#[test]
fn transform_and_synth() {
    let o = monitors(&["transform", "--to", "regular", "--emit", "sizes"], Some("(a.yes + end) & (a.yes + b.end)"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.lines().last().unwrap().starts_with("sizes: input 13"), "{out}");
    let o = monitors(&["transform", "--to", "regular"], Some("(a.yes + a.no) & b.yes"));
    assert_eq!(o.status.code(), Some(2));
    let o = monitors(&["transform", "--to", "deterministic", "--pad"], Some("a.yes + a.no"));
    assert_eq!(o.status.code(), Some(2), "inconsistent input");
    let o = monitors(&["synth"], Some("[a]ff"));
    assert_eq!(stdout(&o), "a.no + end\n");
    let o = monitors(&["synth", "--alphabet", "a,b"], Some("[a]ff"));
    assert_eq!(stdout(&o), "@alphabet a, b\na.no + end\n");
}

#[test]
fn eval_answers_with_exit_status() {
    let o = monitors(&["eval", "--lasso", ":a"], Some("max X.([a]X && [b]ff)"));
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "true\n".to_string()));
    let o = monitors(&["eval", "--lasso", ":ab"], Some("max X.([a]X && [b]ff)"));
    assert_eq!((o.status.code(), stdout(&o)), (Some(1), "false\n".to_string()));
}

#[test]
fn output_is_deterministic() {
    let args = ["export", "--automaton", "nfa", "--dot"];
    let input = "rec x.(a.x + b.yes) & (a.b.yes + b.end) | no";
    let first = stdout(&monitors(&args, Some(input)));
    assert!(first.starts_with("digraph nfa"));
    for _ in 0..3 {
        assert_eq!(stdout(&monitors(&args, Some(input))), first);
    }
}
