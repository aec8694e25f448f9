#![allow(dead_code)]

use std::path::PathBuf;

pub const P6_EDGES: &str = "[[a,b],[b,c],[c,a]]";

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.pl"))
}

/// Fixture name and query for every fixture run.
pub fn fixture_queries() -> Vec<(&'static str, String)> {
    let mut out: Vec<(&'static str, String)> = [
        ("p1", "p(a)"),
        ("p2", "p"),
        ("p2", "q"),
        ("p3", "append([1,2],[3],L)"),
        ("p3", "append([1,2],[3],[4])"),
        ("p3", "append(L1,L2,[1,2])"),
        ("p3", "append(L1,[1,2],L3)"),
        ("p3", "append(L1,L2,L3)"),
        ("p3", "append([X|Y],[],Y)"),
        ("p3", "append([X|Y],Y,[Z|Y])"),
        ("p4", "p([a,b])"),
        ("p5", "win(a)"),
        ("p5", "win(X)"),
        ("p7", "p([a],100)"),
    ]
    .into_iter()
    .map(|(n, q)| (n, q.to_string()))
    .collect();
    for q in [format!("r(a,c,{P6_EDGES},[a])"), format!("r(a,Y,{P6_EDGES},[a])"), format!("r(X,Y,{P6_EDGES},[X])")] {
        out.push(("p6", q));
    }
    out
}

/// Runs the command line in-process with the fixture path filled in.
pub fn run_fixture(name: &str, extra: &[&str]) -> termcheck::Output {
    let path = fixture(name);
    let mut argv: Vec<String> = vec!["termcheck".into(), path.to_string_lossy().into_owned()];
    argv.extend(extra.iter().map(|s| s.to_string()));
    termcheck::run(argv)
}
