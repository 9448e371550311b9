//! End-to-end tests of the `fcw` binary: round-tripping emitted gadgets,
//! the documented command examples, exit codes, and report determinism.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn fcw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcw")).args(args).output().expect("run fcw")
}

fn fcw_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fcw"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn fcw");
    child.stdin.as_mut().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().expect("wait fcw")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).to_string()
}

#[test]
fn emitted_gadgets_reparse_through_check() {
    for (name, m) in [("xi", "3"), ("theta", "1"), ("example54", "2"), ("example54", "0")] {
        let emitted = fcw(&["gadget", name, "--m", m]);
        assert!(emitted.status.success());
        let checked = fcw_with_stdin(&["check", "-"], &stdout(&emitted));
        assert!(
            checked.status.success(),
            "gadget {name} --m {m} failed check: {}",
            String::from_utf8_lossy(&checked.stderr)
        );
    }
}

#[test]
fn reduce_prints_the_relation_image() {
    let dir = tempdir();
    let path = write_gadget(&dir, "xi", "0");
    let out = fcw(&["reduce", "-g", "Xi0", "t0^-1 b t0", "-f", &path]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "c^-1 b c");
}

#[test]
fn member_decides_tail_queries() {
    let dir = tempdir();
    let mut text = String::from_utf8(fcw(&["gadget", "xi", "--m", "3"]).stdout).unwrap();
    text.push_str("sub L = subgroup(Xi3; c^-3 b c^3, t3, tp3)\n");
    let path = format!("{dir}/xi3.fcw");
    std::fs::write(&path, text).unwrap();

    let yes = fcw(&["member", "-g", "Xi3", "-s", "L", "c^-3 b c^3", "-f", &path]);
    assert!(yes.status.success());
    assert_eq!(stdout(&yes).trim(), "Yes");

    let deep = fcw(&["member", "-g", "Xi3", "-s", "L", "c^-11 b c^11", "-f", &path]);
    assert_eq!(stdout(&deep).trim(), "Yes");

    let no = fcw(&["member", "-g", "Xi3", "-s", "L", "c^-2 b c^2", "-f", &path]);
    assert!(no.status.success());
    assert_eq!(stdout(&no).trim(), "No");
}

#[test]
fn member_witness_prints_factors() {
    let dir = tempdir();
    let path = format!("{dir}/free.fcw");
    std::fs::write(&path, "group F = free(b, c)\nsub S = subgroup(F; b, c^2)\n").unwrap();
    let out = fcw(&["member", "-g", "F", "-s", "S", "c^2 b c^-2", "--witness", "-f", &path]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("Yes"));
    assert!(text.contains("(c^2)"), "witness factors listed: {text}");
}

#[test]
fn intersect_prints_a_basis() {
    let dir = tempdir();
    let path = format!("{dir}/free.fcw");
    std::fs::write(
        &path,
        "group F = free(b, c)\nsub S = subgroup(F; b, c^2)\nsub T = subgroup(F; c)\n",
    )
    .unwrap();
    let out = fcw(&["intersect", "-s", "S", "-s", "T", "-f", &path]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "c^2");
}

#[test]
fn dot_export_is_byte_stable() {
    let dir = tempdir();
    let path = format!("{dir}/free.fcw");
    std::fs::write(&path, "group F = free(b, c)\nsub S = subgroup(F; b, c^2)\n").unwrap();
    let a = fcw(&["dot", "-s", "S", "-f", &path]);
    let b = fcw(&["dot", "-s", "S", "-f", &path]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("doublecircle"));
}

#[test]
fn verify_exit_codes_and_determinism() {
    let ok = fcw(&["verify", "lemma43", "--r", "2", "--samples", "40", "--seed", "42",
        "--stable-output"]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));

    // byte-identical output regardless of --jobs
    let par = fcw(&["verify", "lemma43", "--r", "2", "--samples", "40", "--seed", "42",
        "--jobs", "4", "--stable-output"]);
    assert_eq!(stdout(&ok), stdout(&par));

    // corrupted constructions exit 3
    let bad = fcw(&["verify", "lemma43", "--r", "2", "--samples", "40", "--seed", "42",
        "--corrupt", "--stable-output"]);
    assert_eq!(bad.status.code(), Some(3));

    // unknown suite is a usage error
    let nope = fcw(&["verify", "lemma99"]);
    assert_eq!(nope.status.code(), Some(1));
}

#[test]
fn check_reports_parse_errors_with_lines() {
    let out = fcw_with_stdin(&["check", "-"], "group F = free(b)\nsub A = subgroup(F; z)\n");
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("2:"), "line number in diagnostics: {err}");
}

fn tempdir() -> String {
    let dir = std::env::temp_dir().join(format!("fcw-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.to_string_lossy().to_string()
}

fn write_gadget(dir: &str, name: &str, m: &str) -> String {
    let out = fcw(&["gadget", name, "--m", m]);
    assert!(out.status.success());
    let path = format!("{dir}/{name}{m}.fcw");
    std::fs::write(&path, stdout(&out)).unwrap();
    path
}
