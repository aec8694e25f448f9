mod common;

use common::{check_nesting, config, fixture, fixture_queries};
use termcheck_core::{parse_query, run_query, EdgeLabel, NodeId, NodeStatus, QueryResult, Tree, TreeMode};

fn tree_of(name: &str, query: &str) -> Tree {
    let program = fixture(name);
    let q = parse_query(query).unwrap();
    match run_query(&program, 0, &q, &config(2), &|| false) {
        QueryResult::Completed(run) => run.tree.unwrap(),
        QueryResult::Detected(d) => d.tree.unwrap(),
        QueryResult::Fault(f) => panic!("{name} {query}: {}", f.fault),
    }
}

#[test]
fn ids_follow_creation_order() {
    for (name, q) in fixture_queries() {
        let tree = tree_of(name, &q);
        for (i, node) in tree.nodes.iter().enumerate() {
            assert_eq!(node.id.0 as usize, i);
            if let Some(p) = node.parent {
                assert!(p < node.id, "{name} {q}: parent after child at {}", node.id);
                // only a negation entry crosses into a new tree
                let crosses = tree.node(p).tree != node.tree;
                assert_eq!(crosses, node.edge == Some(EdgeLabel::NegationEntry), "{name} {q}: {}", node.id);
            }
        }
    }
}

#[test]
fn ancestor_lists_nest() {
    for (name, q) in fixture_queries() {
        if let Err(e) = check_nesting(&tree_of(name, &q)) {
            panic!("{name} {q}: {e}");
        }
    }
}

#[test]
fn subsidiary_trees_stop_at_first_success() {
    for (name, q) in fixture_queries() {
        let tree = tree_of(name, &q);
        for ctx in tree.trees.iter().filter(|t| t.mode == TreeMode::Subsidiary) {
            let ids: Vec<NodeId> = tree.nodes.iter().filter(|n| n.tree == ctx.id).map(|n| n.id).collect();
            let successes: Vec<&NodeId> = ids.iter().filter(|id| tree.node(**id).is_success_leaf()).collect();
            assert!(successes.len() <= 1, "{name} {q}: several successes in a subsidiary tree");
            if let Some(s) = successes.first() {
                assert_eq!(Some(*s), ids.last(), "{name} {q}: nodes after the first success");
            }
            // a subsidiary tree hangs off a node selecting a negative literal
            let source = tree.node(ctx.source.unwrap());
            assert!(!source.selected().unwrap().literal.positive);
        }
    }
}

#[test]
fn statuses_match_node_shapes() {
    for (name, q) in fixture_queries() {
        let tree = tree_of(name, &q);
        for node in &tree.nodes {
            let has_children = tree.children(node.id).next().is_some();
            match tree.status(node.id) {
                NodeStatus::SuccessLeaf => assert!(node.is_success_leaf() && !has_children),
                NodeStatus::FailureLeaf => assert!(node.is_failure_leaf() && !has_children),
                NodeStatus::Interior => assert!(has_children || node.selected().is_some()),
                NodeStatus::Open => {}
            }
            if node.edge == Some(EdgeLabel::NegationEntry) {
                let ctx = &tree.trees[node.tree.0 as usize];
                assert_eq!(ctx.mode, TreeMode::Subsidiary);
                assert_eq!(ctx.source, node.parent, "{name} {q}: entry not from its source");
            }
        }
    }
}

#[test]
fn runs_are_deterministic() {
    for (name, q) in fixture_queries() {
        assert_eq!(tree_of(name, &q), tree_of(name, &q), "{name} {q}");
    }
}
