//! Output snapshots. Set `UPDATE_GOLDEN=1` to rewrite them.

mod common;

use std::path::PathBuf;

use common::run_fixture;

fn golden(name: &str, fixture: &str, args: &[&str], code: i32) {
    let out = run_fixture(fixture, args);
    assert_eq!(out.code, code, "{name}: {}", out.stderr);
    let file = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&file, &out.stdout).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&file).unwrap_or_else(|_| panic!("missing {}", file.display()));
    assert_eq!(out.stdout, want, "{name} differs");
}

#[test]
fn text_outputs() {
    golden("p1.txt", "p1", &["--query", "p(a)"], 1);
    golden("p2-p.txt", "p2", &["--query", "p"], 0);
    golden("p2-q.txt", "p2", &["--query", "q"], 1);
    golden("p3-q7.txt", "p3", &["--query", "append([X|Y],Y,[Z|Y])"], 1);
    golden("p5.txt", "p5", &["--query", "win(a)", "--query", "win(X)"], 0);
    golden("p7-budget.txt", "p7", &["--query", "p([a],100)", "--depth-bound", "500", "--max-nodes", "60"], 2);
}

#[test]
fn json_outputs() {
    golden("p5.json", "p5", &["--query", "win(a)", "--query", "win(X)", "--format", "json"], 0);
    golden("p3-q7.json", "p3", &["--query", "append([X|Y],Y,[Z|Y])", "--format", "json"], 1);
    golden("p4.json", "p4", &["--query", "p([a,b])", "--format", "json"], 1);
    golden(
        "p7-budget.json",
        "p7",
        &["--query", "p([a],100)", "--depth-bound", "500", "--max-nodes", "6", "--format", "json"],
        2,
    );
}

#[test]
fn dot_outputs() {
    golden("p1.dot", "p1", &["--query", "p(a)", "--format", "dot"], 1);
    golden("p2-p.dot", "p2", &["--query", "p", "--format", "dot"], 0);
    golden("p2-unknown.dot", "p2", &["--query", "r", "--format", "dot"], 0);
}

#[test]
fn earlier_queries_are_summarized_before_a_detection() {
    let out = run_fixture("p2", &["--query", "p", "--query", "q", "--query", "p"]);
    assert_eq!(out.code, 1);
    let lines: Vec<&str> = out.stdout.lines().take(4).collect();
    assert_eq!(
        lines,
        [
            "most-likely non-terminating at query 2",
            "  query 1: p  terminating, 5 nodes",
            "  query 2: q  most-likely-non-terminating, 5 nodes",
            "  query 3: p  not-run",
        ]
    );
}
