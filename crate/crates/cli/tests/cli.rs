mod common;

use std::fs;

use common::{fixture, ok, parse_args, run, stderr, stdout, tree};

fn parsed(dir: &std::path::Path, header: &str) {
    ok(dir, &parse_args(&[fixture(header)], "g.asg", &[]));
}

#[test]
fn parse_and_query_members() {
    let dir = tempfile::tempdir().unwrap();
    parsed(dir.path(), "basic/binomial.h");
    let out = ok(dir.path(), &["query", "class ::BinomialDistribution", "--show", "members", "--asg", "g.asg"]);
    let text = stdout(&out);
    assert!(text.starts_with("class\tclass ::BinomialDistribution\n"), "{text}");
    assert!(text.lines().skip(1).all(|l| l.starts_with("  ")));
    assert!(text.contains("::BinomialDistribution::pmf(unsigned int) const"), "{text}");
}

#[test]
fn missing_header_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["parse", "nope.h", "--asg", "g.asg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("bindforge: "));
    assert!(!dir.path().join("g.asg").exists());
}

#[test]
fn controllers_by_name() {
    let dir = tempfile::tempdir().unwrap();
    parsed(dir.path(), "basic/binomial.h");
    ok(dir.path(), &["control", "default", "--clean=false", "--asg", "g.asg"]);
    ok(dir.path(), &["control", "default", "--asg", "g.asg"]);
    let out = run(dir.path(), &["control", "nosuch", "--asg", "g.asg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("nosuch"));
}

#[test]
fn empty_selection_writes_no_export_files() {
    let dir = tempfile::tempdir().unwrap();
    parsed(dir.path(), "basic/binomial.h");
    ok(dir.path(), &["control", "default", "--asg", "g.asg"]);
    let out = ok(dir.path(), &["generate", "--selector", "pattern", "--pattern", "^nothing$", "--out-dir", "out", "--asg", "g.asg"]);
    let files = tree(&dir.path().join("out"));
    assert_eq!(files.keys().collect::<Vec<_>>(), ["module.cpp", "module.manifest"]);
    let module = String::from_utf8(files["module.cpp"].clone()).unwrap();
    assert!(!module.contains("export_"), "{module}");
    assert_eq!(stdout(&out), "module.cpp\t\n");
    ok(dir.path(), &["generate", "--selector", "pattern", "--pattern", ".*", "--out-dir", "all", "--asg", "g.asg"]);
    assert!(tree(&dir.path().join("all")).len() > 1);
}

#[test]
fn query_filters_and_unknown_nodes() {
    let dir = tempfile::tempdir().unwrap();
    parsed(dir.path(), "counts/counts.h");
    let out = ok(dir.path(), &["query", "--kind", "enumeration", "--asg", "g.asg"]);
    assert!(stdout(&out).lines().all(|l| l.starts_with("enumeration\t")), "{}", stdout(&out));
    assert!(!stdout(&out).is_empty());
    let out = run(dir.path(), &["query", "class ::Nowhere", "--asg", "g.asg"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn merge_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    parsed(dir.path(), "counts/counts.h");
    let before = fs::read(dir.path().join("g.asg")).unwrap();
    ok(dir.path(), &["merge", "g.asg", "--asg", "g.asg"]);
    assert_eq!(fs::read(dir.path().join("g.asg")).unwrap(), before);
    ok(dir.path(), &["merge", "g.asg", "--asg", "empty.asg"]);
    assert_eq!(run(dir.path(), &["asg-diff", "g.asg", "empty.asg"]).status.code(), Some(0));
}

#[test]
fn wrap_matches_separate_steps() {
    let dir = tempfile::tempdir().unwrap();
    let header = fixture("basic/binomial.h");
    parsed(dir.path(), "basic/binomial.h");
    ok(dir.path(), &["control", "default", "--asg", "g.asg"]);
    ok(dir.path(), &["generate", "--decorator", "__init__.py", "--out-dir", "steps", "--asg", "g.asg"]);

    let mut args = vec!["wrap".to_string(), header.display().to_string()];
    args.extend(["--decorator", "__init__.py", "--out-dir", "one", "--asg", "w.asg", "--"].map(String::from));
    args.extend(common::cxx_flags());
    ok(dir.path(), &args);

    assert_eq!(tree(&dir.path().join("steps")), tree(&dir.path().join("one")));
    assert_eq!(fs::read(dir.path().join("g.asg")).unwrap(), fs::read(dir.path().join("w.asg")).unwrap());
}

#[test]
fn deny_lints_fails_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    parsed(dir.path(), "overload/overload.h");
    ok(dir.path(), &["control", "default", "--asg", "g.asg"]);
    let out = run(dir.path(), &["generate", "--deny-lints", "--out-dir", "out", "--asg", "g.asg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("out").exists());
    let out = ok(dir.path(), &["generate", "--out-dir", "out", "--asg", "g.asg"]);
    assert!(stderr(&out).lines().any(|l| l.starts_with("LINT ")));
}

#[test]
fn log_sidecar_is_append_only() {
    let dir = tempfile::tempdir().unwrap();
    parsed(dir.path(), "basic/binomial.h");
    let first = fs::read_to_string(dir.path().join("g.asg.log")).unwrap();
    ok(dir.path(), &["control", "default", "--asg", "g.asg"]);
    let second = fs::read_to_string(dir.path().join("g.asg.log")).unwrap();
    assert!(second.starts_with(&first) && second.len() > first.len());
    assert!(second.lines().last().unwrap().contains("control"));
}

#[test]
fn asg_diff_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    parsed(dir.path(), "basic/binomial.h");
    ok(dir.path(), &parse_args(&[fixture("counts/counts.h")], "h.asg", &[]));
    assert_eq!(run(dir.path(), &["asg-diff", "g.asg", "g.asg"]).status.code(), Some(0));
    let out = run(dir.path(), &["asg-diff", "g.asg", "h.asg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!stdout(&out).is_empty());
    assert_eq!(run(dir.path(), &["asg-diff", "g.asg", "missing.asg"]).status.code(), Some(2));
}

#[test]
fn doc_convert_reads_stdin() {
    use std::io::Write;
    use std::process::{Command, Stdio};
    let mut child = Command::new(env!("CARGO_BIN_EXE_bindforge"))
        .args(["doc-convert"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"\\brief Adds \\p x.").unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "Adds ``x``.\n");
}
