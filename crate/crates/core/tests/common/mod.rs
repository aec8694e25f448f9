#![allow(dead_code)]

pub mod gen;
pub mod oracle;

use std::path::PathBuf;

use termcheck_core::{
    parse_program, parse_query, test_sequential, DetectorConfig, EngineConfig, GrowthRule, Program, TestConfig, Tree,
    Verdict,
};

pub const P6_EDGES: &str = "[[a,b],[b,c],[c,a]]";

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.pl"))
}

pub fn fixture(name: &str) -> Program {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture file");
    parse_program(&text).expect("fixture parses")
}

pub fn config(depth: usize) -> TestConfig {
    TestConfig {
        engine: EngineConfig { record_tree: true, ..EngineConfig::default() },
        detector: DetectorConfig { depth, growth: GrowthRule::Subterm },
    }
}

pub fn check(name: &str, query: &str, depth: usize) -> Verdict {
    let program = fixture(name);
    let q = parse_query(query).expect("query parses");
    test_sequential(&program, &[q], &config(depth))
}

/// Every fixture query used across the suites.
pub fn fixture_queries() -> Vec<(&'static str, String)> {
    let mut out: Vec<(&'static str, String)> = vec![
        ("p1", "p(a)".into()),
        ("p2", "p".into()),
        ("p2", "q".into()),
        ("p3", "append([1,2],[3],L)".into()),
        ("p3", "append([1,2],[3],[4])".into()),
        ("p3", "append(L1,L2,[1,2])".into()),
        ("p3", "append(L1,[1,2],L3)".into()),
        ("p3", "append(L1,L2,L3)".into()),
        ("p3", "append([X|Y],[],Y)".into()),
        ("p3", "append([X|Y],Y,[Z|Y])".into()),
        ("p4", "p([a,b])".into()),
        ("p5", "win(a)".into()),
        ("p5", "win(X)".into()),
        ("p7", "p([a],100)".into()),
    ];
    for q in [format!("r(a,c,{P6_EDGES},[a])"), format!("r(a,Y,{P6_EDGES},[a])"), format!("r(X,Y,{P6_EDGES},[X])")] {
        out.push(("p6", q));
    }
    out
}

/// Checks the ancestor-list nesting invariant on every node of `tree`: each
/// listed ancestor is above the node, selected that positive atom, and
/// carried exactly the rest of the list itself.
pub fn check_nesting(tree: &Tree) -> Result<(), String> {
    for node in &tree.nodes {
        let mut upward = Vec::new();
        let mut cur = Some(node.id);
        while let Some(n) = cur {
            upward.push(n);
            cur = tree.node(n).parent;
        }
        for entry in node.goal.iter() {
            for (anc, atom) in entry.ancestors.iter() {
                if !upward.contains(&anc) {
                    return Err(format!("{anc} is not above {}", node.id));
                }
                let Some(sel) = tree.node(anc).selected() else {
                    return Err(format!("{anc} selects nothing"));
                };
                if !sel.literal.positive || &sel.literal.atom != atom {
                    return Err(format!("{anc} did not select {atom}"));
                }
                let below = entry.ancestors.suffix_from(anc).expect("listed node");
                if !below.iter().skip(1).eq(sel.ancestors.iter()) {
                    return Err(format!("list at {} breaks nesting at {anc}", node.id));
                }
            }
        }
    }
    Ok(())
}
