//! Text, JSON and DOT renderings of a verdict.
//!
//! Variables are shown as `V1, V2, …` in order of first appearance, so the
//! output does not depend on internal variable numbering. Derivations are
//! numbered `N0..Nk` along the derivation; DOT output shows whole trees and
//! keeps creation-order ids.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;
use std::sync::Arc;

use serde::Serialize;
use termcheck_core::{ChainReport, Detection, EdgeLabel, Fault, Node, NodeId, QueryFault, Term, Tree, Var, Verdict};

/// Hands out `V1, V2, …` in first-use order.
#[derive(Default)]
pub struct Namer {
    names: RefCell<HashMap<Var, usize>>,
}

impl Namer {
    pub fn name(&self, v: Var) -> String {
        let mut names = self.names.borrow_mut();
        let next = names.len() + 1;
        format!("V{}", names.entry(v).or_insert(next))
    }

    pub fn term(&self, t: &Term) -> String {
        let f = |v| self.name(v);
        termcheck_core::term::TermWriter::new(t, &f).goal_position().to_string()
    }

    pub fn goal(&self, node: &Node) -> String {
        if node.is_failure_leaf() {
            return "□f".into();
        }
        if node.goal.is_empty() {
            return "□t".into();
        }
        let f = |v| self.name(v);
        let parts: Vec<String> = node.goal.iter().map(|e| e.literal.display_with(&f).to_string()).collect();
        parts.join(", ")
    }
}

fn result_name(verdict: &Verdict) -> &'static str {
    match verdict {
        Verdict::Terminating { .. } => "terminating",
        Verdict::MostLikelyNonTerminating { .. } => "most-likely-non-terminating",
        Verdict::Fault { .. } => "fault",
    }
}

/// Per query: outcome name and node count, `None` when it never ran.
fn query_rows(verdict: &Verdict, count: usize) -> Vec<(&'static str, Option<usize>)> {
    let mut rows = vec![("not-run", None); count];
    for (row, run) in rows.iter_mut().zip(verdict.runs()) {
        *row = ("terminating", Some(run.stats.nodes));
    }
    match verdict {
        Verdict::MostLikelyNonTerminating { detection, .. } => {
            rows[detection.query_index] = ("most-likely-non-terminating", Some(detection.stats.nodes));
        }
        Verdict::Fault { fault, .. } => rows[fault.query_index] = ("fault", Some(fault.stats.nodes)),
        Verdict::Terminating { .. } => {}
    }
    rows
}

fn total_nodes(verdict: &Verdict, count: usize) -> usize {
    query_rows(verdict, count).iter().filter_map(|r| r.1).sum()
}

fn local_index(path: &[Arc<Node>], id: NodeId) -> Option<usize> {
    path.iter().position(|n| n.id == id)
}

/// Fault description with path-local node numbers.
fn fault_message(fault: &QueryFault, namer: &Namer) -> String {
    let at = |id: NodeId| match local_index(&fault.path, id) {
        Some(k) => format!("N{k}"),
        None => id.to_string(),
    };
    match &fault.fault {
        Fault::Floundering { node, literal } => {
            let f = |v| namer.name(v);
            format!("floundering at {}: {}", at(*node), literal.display_with(&f))
        }
        Fault::Instantiation { node, message } => format!("instantiation error at {}: {message}", at(*node)),
        Fault::Type { node, message } => format!("type error at {}: {message}", at(*node)),
        other => other.to_string(),
    }
}

fn fault_node(fault: &QueryFault) -> Option<usize> {
    match &fault.fault {
        Fault::Floundering { node, .. } | Fault::Instantiation { node, .. } | Fault::Type { node, .. } => {
            local_index(&fault.path, *node)
        }
        Fault::ResourceLimit { .. } | Fault::Cancelled => None,
    }
}

fn chain_locals(d: &Detection) -> Vec<usize> {
    d.chain.links.iter().map(|l| local_index(&d.derivation, l.node).expect("chain node on the derivation")).collect()
}

fn clause_set_text(chain: &ChainReport) -> String {
    let ids: Vec<String> = chain.clause_set.iter().map(|c| c.to_string()).collect();
    format!("{{{}}}", ids.join(", "))
}

fn write_lines(out: &mut String, path: &[Arc<Node>], range: std::ops::Range<usize>, marked: &[usize], namer: &Namer) {
    for k in range {
        let mark = if marked.contains(&k) { '*' } else { ' ' };
        let _ = write!(out, "{mark} N{k}: <- {}", namer.goal(&path[k]));
        if let Some(edge) = path.get(k + 1).and_then(|next| next.edge) {
            let _ = write!(out, "  --{edge}-->");
        }
        out.push('\n');
    }
}

fn write_derivation(out: &mut String, path: &[Arc<Node>], marked: &[usize], namer: &Namer) {
    write_lines(out, path, 0..path.len(), marked, namer);
}

/// Fault paths can be as long as the node budget; show both ends.
const FAULT_PATH_KEEP: usize = 10;

fn write_fault_path(out: &mut String, path: &[Arc<Node>], namer: &Namer) {
    let n = path.len();
    if n <= 4 * FAULT_PATH_KEEP {
        write_derivation(out, path, &[], namer);
        return;
    }
    write_lines(out, path, 0..FAULT_PATH_KEEP, &[], namer);
    let _ = writeln!(out, "  ... {} more nodes ...", n - 2 * FAULT_PATH_KEEP);
    write_lines(out, path, n - FAULT_PATH_KEEP..n, &[], namer);
}

pub fn text(verdict: &Verdict, queries: &[String]) -> String {
    let namer = Namer::default();
    let mut out = String::new();
    match verdict {
        Verdict::Terminating { .. } => {
            let _ = writeln!(out, "terminating w.r.t. all {} queries", queries.len());
        }
        Verdict::MostLikelyNonTerminating { detection, .. } => {
            let _ = writeln!(out, "most-likely non-terminating at query {}", detection.query_index + 1);
        }
        Verdict::Fault { fault, .. } => {
            let _ = writeln!(out, "fault[{}] at query {}", fault.fault.code(), fault.query_index + 1);
        }
    }
    for (i, (q, (outcome, nodes))) in queries.iter().zip(query_rows(verdict, queries.len())).enumerate() {
        match nodes {
            Some(n) => {
                let _ = writeln!(out, "  query {}: {q}  {outcome}, {n} nodes", i + 1);
            }
            None => {
                let _ = writeln!(out, "  query {}: {q}  {outcome}", i + 1);
            }
        }
    }
    match verdict {
        Verdict::Terminating { .. } => {}
        Verdict::MostLikelyNonTerminating { detection, .. } => {
            let marked = chain_locals(detection);
            out.push_str("derivation:\n");
            write_derivation(&mut out, &detection.derivation, &marked, &namer);
            let nodes: Vec<String> = marked.iter().map(|k| format!("N{k}")).collect();
            let _ = writeln!(out, "chain: {}", nodes.join(", "));
            let _ = writeln!(out, "regime: {}", detection.chain.regime);
            let _ = writeln!(out, "clause set: {}", clause_set_text(&detection.chain));
        }
        Verdict::Fault { fault, .. } => {
            let _ = writeln!(out, "{}", fault_message(fault, &namer));
            if !fault.path.is_empty() {
                out.push_str("derivation:\n");
                write_fault_path(&mut out, &fault.path, &namer);
            }
        }
    }
    out
}

#[derive(Serialize)]
struct JsonReport {
    result: &'static str,
    queries: Vec<JsonQuery>,
    derivation: Vec<JsonStep>,
    chain: Option<JsonChain>,
    stats: JsonStats,
    fault: Option<JsonFault>,
}

#[derive(Serialize)]
struct JsonQuery {
    query: String,
    outcome: &'static str,
    nodes: Option<usize>,
}

#[derive(Serialize)]
struct JsonStep {
    node: usize,
    goal: String,
    edge: Option<JsonEdge>,
}

#[derive(Serialize)]
struct JsonEdge {
    kind: &'static str,
    clause: Option<u32>,
}

#[derive(Serialize)]
struct JsonChain {
    nodes: Vec<JsonChainNode>,
    regime: &'static str,
    clause_set: Vec<u32>,
}

#[derive(Serialize)]
struct JsonChainNode {
    node: usize,
    atom: String,
}

#[derive(Serialize)]
struct JsonStats {
    nodes: usize,
}

#[derive(Serialize)]
struct JsonFault {
    code: &'static str,
    message: String,
    node: Option<usize>,
}

fn json_edge(edge: EdgeLabel) -> JsonEdge {
    let kind = match edge {
        EdgeLabel::Clause(_) => "clause",
        EdgeLabel::NegationEntry => "neg",
        EdgeLabel::NegationExit => "neg-exit",
        EdgeLabel::Builtin => "builtin",
        EdgeLabel::Failure => "fail",
    };
    JsonEdge { kind, clause: edge.clause().map(|c| c.0) }
}

fn json_steps(path: &[Arc<Node>], namer: &Namer) -> Vec<JsonStep> {
    path.iter()
        .enumerate()
        .map(|(k, node)| JsonStep {
            node: k,
            goal: namer.goal(node),
            edge: if k == 0 { None } else { node.edge.map(json_edge) },
        })
        .collect()
}

pub fn json(verdict: &Verdict, queries: &[String]) -> String {
    let namer = Namer::default();
    let rows = query_rows(verdict, queries.len());
    let mut report = JsonReport {
        result: result_name(verdict),
        queries: queries
            .iter()
            .zip(&rows)
            .map(|(q, (outcome, nodes))| JsonQuery { query: q.clone(), outcome, nodes: *nodes })
            .collect(),
        derivation: Vec::new(),
        chain: None,
        stats: JsonStats { nodes: total_nodes(verdict, queries.len()) },
        fault: None,
    };
    match verdict {
        Verdict::Terminating { .. } => {}
        Verdict::MostLikelyNonTerminating { detection, .. } => {
            report.derivation = json_steps(&detection.derivation, &namer);
            let chain = &detection.chain;
            report.chain = Some(JsonChain {
                nodes: chain_locals(detection)
                    .into_iter()
                    .zip(&chain.links)
                    .map(|(node, link)| JsonChainNode { node, atom: namer.term(&link.atom) })
                    .collect(),
                regime: chain.regime.name(),
                clause_set: chain.clause_set.iter().map(|c| c.0).collect(),
            });
        }
        Verdict::Fault { fault, .. } => {
            report.derivation = json_steps(&fault.path, &namer);
            report.fault = Some(JsonFault {
                code: fault.fault.code(),
                message: fault_message(fault, &namer),
                node: fault_node(fault),
            });
        }
    }
    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
    s.push('\n');
    s
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Writes `nodes` (ascending ids, parents before children) as one cluster
/// per tree.
fn dot_nodes(out: &mut String, prefix: &str, title: &str, nodes: &[&Node], chain: &[NodeId]) {
    let namer = Namer::default();
    let mut clusters: BTreeMap<u32, Vec<&Node>> = BTreeMap::new();
    for n in nodes {
        clusters.entry(n.tree.0).or_default().push(n);
    }
    for (tree, members) in &clusters {
        let first = members[0];
        let label = match (first.edge, first.parent) {
            (Some(EdgeLabel::NegationEntry), Some(src)) => format!("subsidiary tree of {src}"),
            _ => title.to_string(),
        };
        let _ = writeln!(out, "  subgraph cluster_{prefix}t{tree} {{");
        let _ = writeln!(out, "    label=\"{}\";", dot_escape(&label));
        for n in members {
            let goal = namer.goal(n);
            let label = if n.goal.is_empty() || n.is_failure_leaf() {
                format!("{}: {goal}", n.id)
            } else {
                format!("{}: <- {goal}", n.id)
            };
            let shape = if chain.contains(&n.id) { ", shape=doublecircle" } else { "" };
            let _ = writeln!(out, "    {prefix}n{} [label=\"{}\"{shape}];", n.id.0, dot_escape(&label));
        }
        out.push_str("  }\n");
    }
    for n in nodes {
        let (Some(parent), Some(edge)) = (n.parent, n.edge) else {
            continue;
        };
        let style = if edge == EdgeLabel::NegationEntry { ", style=dashed" } else { "" };
        let _ = writeln!(out, "  {prefix}n{} -> {prefix}n{} [label=\"{edge}\"{style}];", parent.0, n.id.0);
    }
}

fn tree_nodes(tree: &Tree) -> Vec<&Node> {
    tree.nodes.iter().map(|n| &**n).collect()
}

pub fn dot(verdict: &Verdict, queries: &[String]) -> String {
    let mut out = String::from("digraph termcheck {\n  node [shape=box, fontname=\"monospace\"];\n");
    let title = |i: usize| format!("query {}: {}", i + 1, queries[i]);
    for (i, run) in verdict.runs().iter().enumerate() {
        if let Some(tree) = &run.tree {
            dot_nodes(&mut out, &format!("q{}", i + 1), &title(i), &tree_nodes(tree), &[]);
        }
    }
    match verdict {
        Verdict::Terminating { .. } => {}
        Verdict::MostLikelyNonTerminating { detection, .. } => {
            let i = detection.query_index;
            let chain: Vec<NodeId> = detection.chain.links.iter().map(|l| l.node).collect();
            let nodes = match &detection.tree {
                Some(tree) => tree_nodes(tree),
                None => detection.derivation.iter().map(|n| &**n).collect(),
            };
            dot_nodes(&mut out, &format!("q{}", i + 1), &title(i), &nodes, &chain);
        }
        Verdict::Fault { fault, .. } => {
            let i = fault.query_index;
            let nodes: Vec<&Node> = fault.path.iter().map(|n| &**n).collect();
            dot_nodes(&mut out, &format!("q{}", i + 1), &title(i), &nodes, &[]);
        }
    }
    out.push_str("}\n");
    out
}
