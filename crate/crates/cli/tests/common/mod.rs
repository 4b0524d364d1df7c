#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(rel)
}

/// Compiler flags every fixture needs.
pub fn cxx_flags() -> Vec<String> {
    vec!["-x".into(), "c++".into(), "-std=c++11".into(), "-I".into(), fixture("stdlib").display().to_string()]
}

/// Runs the binary in `dir`.
pub fn run<S: AsRef<str>>(dir: &Path, args: &[S]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bindforge"))
        .current_dir(dir)
        .args(args.iter().map(AsRef::as_ref))
        .output()
        .expect("binary runs")
}

/// Runs and requires exit status 0.
pub fn ok<S: AsRef<str>>(dir: &Path, args: &[S]) -> Output {
    let out = run(dir, args);
    assert!(out.status.success(), "{:?} failed: {}", args.iter().map(AsRef::as_ref).collect::<Vec<_>>(), String::from_utf8_lossy(&out.stderr));
    out
}

/// `parse <header> -- <flags>` into `asg`.
pub fn parse_args(headers: &[PathBuf], asg: &str, extra: &[&str]) -> Vec<String> {
    let mut args = vec!["parse".to_string()];
    args.extend(headers.iter().map(|h| h.display().to_string()));
    args.extend(extra.iter().map(|s| s.to_string()));
    args.extend(["--asg".to_string(), asg.to_string(), "--".to_string()]);
    args.extend(cxx_flags());
    args
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Every regular file under `dir`, keyed by relative path.
pub fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    if dir.exists() {
        walk(dir, dir, &mut out);
    }
    out
}
