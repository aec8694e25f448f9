mod common;

use std::process::Command;

use common::fixture;

fn status(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_termcheck")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn terminating_is_zero() {
    let (code, stdout, _) = status(&[&path("p2"), "--query", "p"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("terminating w.r.t. all 1 queries\n"), "{stdout}");
}

#[test]
fn detection_is_one() {
    let (code, stdout, _) = status(&[&path("p1"), "--query", "p(a)"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("* N4: <- p(f(f(a)))"), "{stdout}");
}

#[test]
fn depth_bound_changes_the_verdict() {
    let p7 = path("p7");
    assert_eq!(status(&[&p7, "--query", "p([a],100)"]).0, 1);
    assert_eq!(status(&[&p7, "--query", "p([a],100)", "--depth-bound", "99"]).0, 1);
    assert_eq!(status(&[&p7, "--query", "p([a],100)", "--depth-bound", "100"]).0, 0);
}

#[test]
fn faults_are_two() {
    let dir = std::env::temp_dir().join(format!("termcheck-exit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("flounder.pl");
    std::fs::write(&file, "p :- \\+ q(X).\nq(a).\n").unwrap();
    let (code, stdout, _) = status(&[file.to_str().unwrap(), "--query", "p"]);
    assert_eq!(code, 2);
    assert!(stdout.contains("floundering at N1: \\+q(V1)"), "{stdout}");
    let (code, stdout, _) =
        status(&[&path("p7"), "--query", "p([a],100)", "--depth-bound", "500", "--max-nodes", "10"]);
    assert_eq!(code, 2);
    assert!(stdout.starts_with("fault[resource-limit]"), "{stdout}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_and_parse_errors_are_three() {
    let p2 = path("p2");
    for args in [
        vec![p2.as_str()],
        vec![p2.as_str(), "--query", "p", "--depth-bound", "1"],
        vec![p2.as_str(), "--query", "p", "--format", "xml"],
        vec![p2.as_str(), "--query", "p", "--occurs-check", "maybe"],
        vec![p2.as_str(), "--query", "\\+ p"],
        vec![p2.as_str(), "--query", "p("],
        vec!["/nonexistent/program.pl", "--query", "p"],
    ] {
        let (code, stdout, stderr) = status(&args);
        assert_eq!(code, 3, "{args:?}");
        assert!(stdout.is_empty());
        assert!(!stderr.is_empty());
    }
}

#[test]
fn help_is_zero() {
    let (code, stdout, _) = status(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("--depth-bound"));
}
