//! Depth-first, left-most construction of generalized SLDNF-trees.
//!
//! The top tree is explored completely. A ground negative subgoal opens a
//! subsidiary tree for its atom, explored until its first success leaf; every
//! goal entry carries the list of ancestor subgoals it was derived from.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::parser::{ClauseId, Literal, Program};
use crate::term::{Substitution, Term, VarGen};
use crate::unify::mgu;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeLabel {
    Clause(ClauseId),
    /// Into the root of a subsidiary tree.
    NegationEntry,
    /// The negative subgoal's subsidiary tree failed finitely.
    NegationExit,
    Builtin,
    /// Into a failure leaf.
    Failure,
}

impl EdgeLabel {
    pub fn clause(&self) -> Option<ClauseId> {
        match self {
            EdgeLabel::Clause(id) => Some(*id),
            _ => None,
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Clause(id) => write!(f, "{id}"),
            EdgeLabel::NegationEntry => f.write_str("neg"),
            EdgeLabel::NegationExit => f.write_str("neg-exit"),
            EdgeLabel::Builtin => f.write_str("builtin"),
            EdgeLabel::Failure => f.write_str("fail"),
        }
    }
}

/// Persistent list of `(node, atom)` ancestor pairs, newest first.
#[derive(Debug, Clone, Default)]
pub struct Ancestors(Option<Arc<AncestorCell>>);

#[derive(Debug)]
struct AncestorCell {
    node: NodeId,
    atom: Term,
    len: usize,
    next: Ancestors,
}

impl Ancestors {
    pub fn empty() -> Self {
        Ancestors(None)
    }

    pub fn push(&self, node: NodeId, atom: Term) -> Self {
        Ancestors(Some(Arc::new(AncestorCell { node, atom, len: self.len() + 1, next: self.clone() })))
    }

    pub fn len(&self) -> usize {
        self.0.as_ref().map_or(0, |c| c.len)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    /// Newest first.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &Term)> {
        let mut cur = self.0.as_deref();
        std::iter::from_fn(move || {
            let cell = cur?;
            cur = cell.next.0.as_deref();
            Some((cell.node, &cell.atom))
        })
    }

    /// Oldest first.
    pub fn to_vec(&self) -> Vec<(NodeId, Term)> {
        let mut v: Vec<(NodeId, Term)> = self.iter().map(|(n, a)| (n, a.clone())).collect();
        v.reverse();
        v
    }

    /// The list as it was when `node` was pushed, if `node` is on it.
    pub fn suffix_from(&self, node: NodeId) -> Option<Ancestors> {
        let mut cur = self.clone();
        while let Some(cell) = cur.0.clone() {
            if cell.node == node {
                return Some(cur);
            }
            cur = cell.next.clone();
        }
        None
    }

    pub fn ptr_eq(&self, other: &Ancestors) -> bool {
        match (&self.0, &other.0) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl PartialEq for Ancestors {
    fn eq(&self, other: &Self) -> bool {
        self.ptr_eq(other) || self.iter().eq(other.iter())
    }
}

impl Eq for Ancestors {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalEntry {
    pub literal: Literal,
    pub ancestors: Ancestors,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    pub edge: Option<EdgeLabel>,
    pub tree: TreeId,
    pub goal: Arc<[GoalEntry]>,
}

impl Node {
    pub fn selected(&self) -> Option<&GoalEntry> {
        if self.is_failure_leaf() {
            return None;
        }
        self.goal.first()
    }

    pub fn is_failure_leaf(&self) -> bool {
        self.edge == Some(EdgeLabel::Failure)
    }

    pub fn is_success_leaf(&self) -> bool {
        self.goal.is_empty() && !self.is_failure_leaf()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeStatus {
    Open,
    Interior,
    SuccessLeaf,
    FailureLeaf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeMode {
    Top,
    /// Stops at its first success leaf.
    Subsidiary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeContext {
    pub id: TreeId,
    pub mode: TreeMode,
    /// Node whose negative subgoal opened this tree.
    pub source: Option<NodeId>,
}

/// Every node created during one run, indexed by node id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tree {
    pub nodes: Vec<Arc<Node>>,
    pub status: Vec<NodeStatus>,
    pub trees: Vec<TreeContext>,
}

impl Tree {
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0 as usize]
    }

    pub fn status(&self, id: NodeId) -> NodeStatus {
        self.status[id.0 as usize]
    }

    pub fn children(&self, id: NodeId) -> impl Iterator<Item = &Arc<Node>> {
        self.nodes.iter().filter(move |n| n.parent == Some(id))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub occurs_check: bool,
    pub max_nodes: usize,
    /// Keep every node so the whole tree can be inspected afterwards.
    pub record_tree: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { occurs_check: true, max_nodes: 1_000_000, record_tree: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Stats {
    pub nodes: usize,
    pub trees: usize,
    pub max_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Fault {
    #[error("floundering at {node}: {literal}")]
    Floundering { node: NodeId, literal: Literal },
    #[error("instantiation error at {node}: {message}")]
    Instantiation { node: NodeId, message: String },
    #[error("type error at {node}: {message}")]
    Type { node: NodeId, message: String },
    #[error("node budget of {limit} exceeded")]
    ResourceLimit { limit: usize },
    #[error("cancelled")]
    Cancelled,
}

impl Fault {
    pub fn code(&self) -> &'static str {
        match self {
            Fault::Floundering { .. } => "floundering",
            Fault::Instantiation { .. } => "instantiation-error",
            Fault::Type { .. } => "type-error",
            Fault::ResourceLimit { .. } => "resource-limit",
            Fault::Cancelled => "cancelled",
        }
    }
}

/// A fault together with the derivation that led to it.
#[derive(Debug, Clone)]
pub struct RunFault {
    pub fault: Fault,
    pub stats: Stats,
    pub path: Vec<Arc<Node>>,
}

#[derive(Debug, Clone)]
pub enum Outcome<R> {
    Completed {
        stats: Stats,
        tree: Option<Tree>,
    },
    Detected {
        report: R,
        /// Root-to-current path ending at the node that triggered the hook.
        derivation: Vec<Arc<Node>>,
        stats: Stats,
        tree: Option<Tree>,
    },
}

/// Read-only view of the current derivation, root first.
#[derive(Debug, Clone, Copy)]
pub struct Path<'a> {
    nodes: &'a [Arc<Node>],
}

impl<'a> Path<'a> {
    pub fn new(nodes: &'a [Arc<Node>]) -> Self {
        Path { nodes }
    }

    pub fn nodes(&self) -> &'a [Arc<Node>] {
        self.nodes
    }

    pub fn current(&self) -> &'a Node {
        self.nodes.last().expect("non-empty path")
    }

    /// Index of `id` on the path. Ids increase from root to leaf.
    pub fn position(&self, id: NodeId) -> Option<usize> {
        self.nodes.binary_search_by_key(&id, |n| n.id).ok()
    }
}

/// Called at every node creation; returning a report stops the run.
pub trait NodeHook {
    type Report;
    fn on_node(&mut self, path: &Path<'_>) -> Option<Self::Report>;
}

/// Hook that never stops the run.
pub struct NoHook;

impl NodeHook for NoHook {
    type Report = ();
    fn on_node(&mut self, _path: &Path<'_>) -> Option<()> {
        None
    }
}

const CANCEL_INTERVAL: usize = 4096;

/// Builds the generalized tree for `query`, calling `hook` at each node.
pub fn build_tree<H: NodeHook>(
    program: &Program,
    query: &Literal,
    config: &EngineConfig,
    hook: &mut H,
    cancel: &dyn Fn() -> bool,
) -> Result<Outcome<H::Report>, RunFault> {
    let first_var = query.atom.max_var().map_or(0, |m| m + 1);
    let mut engine = Engine {
        program,
        config,
        hook,
        cancel,
        vars: VarGen::starting_at(first_var),
        frames: Vec::new(),
        path: Vec::new(),
        contexts: Vec::new(),
        record: config.record_tree.then(Tree::default),
        stats: Stats::default(),
    };
    engine.run(query)
}

enum NegState {
    Start,
    Waiting,
    Succeeded,
    Done,
}

enum Frame {
    Leaf,
    Resolve { next: usize, produced: bool },
    Negation(NegState),
    Builtin { done: bool },
}

enum Step<R> {
    Continue,
    Stop(R),
}

struct Engine<'a, H: NodeHook> {
    program: &'a Program,
    config: &'a EngineConfig,
    hook: &'a mut H,
    cancel: &'a dyn Fn() -> bool,
    vars: VarGen,
    frames: Vec<Frame>,
    path: Vec<Arc<Node>>,
    contexts: Vec<TreeContext>,
    record: Option<Tree>,
    stats: Stats,
}

impl<H: NodeHook> Engine<'_, H> {
    fn run(&mut self, query: &Literal) -> Result<Outcome<H::Report>, RunFault> {
        let top = self.open_tree(TreeMode::Top, None);
        let root = vec![GoalEntry { literal: query.clone(), ancestors: Ancestors::empty() }];
        if let Step::Stop(report) = self.create(None, None, top, root)? {
            return Ok(self.detected(report));
        }
        while !self.frames.is_empty() {
            if let Step::Stop(report) = self.step()? {
                return Ok(self.detected(report));
            }
        }
        Ok(Outcome::Completed { stats: self.stats, tree: self.finish_tree() })
    }

    fn detected(&mut self, report: H::Report) -> Outcome<H::Report> {
        Outcome::Detected { report, derivation: self.path.clone(), stats: self.stats, tree: self.finish_tree() }
    }

    fn finish_tree(&mut self) -> Option<Tree> {
        let mut tree = self.record.take()?;
        tree.trees = self.contexts.clone();
        Some(tree)
    }

    fn fault(&self, fault: Fault) -> RunFault {
        RunFault { fault, stats: self.stats, path: self.path.clone() }
    }

    fn open_tree(&mut self, mode: TreeMode, source: Option<NodeId>) -> TreeId {
        let id = TreeId(self.contexts.len() as u32);
        self.contexts.push(TreeContext { id, mode, source });
        self.stats.trees += 1;
        id
    }

    fn create(
        &mut self,
        parent: Option<NodeId>,
        edge: Option<EdgeLabel>,
        tree: TreeId,
        goal: Vec<GoalEntry>,
    ) -> Result<Step<H::Report>, RunFault> {
        if self.stats.nodes >= self.config.max_nodes {
            return Err(self.fault(Fault::ResourceLimit { limit: self.config.max_nodes }));
        }
        if self.stats.nodes % CANCEL_INTERVAL == CANCEL_INTERVAL - 1 && (self.cancel)() {
            return Err(self.fault(Fault::Cancelled));
        }
        let node = Arc::new(Node { id: NodeId(self.stats.nodes as u32), parent, edge, tree, goal: goal.into() });
        self.stats.nodes += 1;
        let frame = if node.is_failure_leaf() || node.goal.is_empty() {
            Frame::Leaf
        } else {
            let sel = &node.goal[0].literal;
            if !sel.positive {
                Frame::Negation(NegState::Start)
            } else if sel.is_builtin() {
                Frame::Builtin { done: false }
            } else {
                Frame::Resolve { next: 0, produced: false }
            }
        };
        if let Some(rec) = &mut self.record {
            if let Some(p) = parent {
                rec.status[p.0 as usize] = NodeStatus::Interior;
            }
            rec.status.push(if node.is_failure_leaf() {
                NodeStatus::FailureLeaf
            } else if node.goal.is_empty() {
                NodeStatus::SuccessLeaf
            } else {
                NodeStatus::Open
            });
            rec.nodes.push(node.clone());
        }
        self.frames.push(frame);
        self.path.push(node);
        self.stats.max_depth = self.stats.max_depth.max(self.path.len());
        Ok(match self.hook.on_node(&Path::new(&self.path)) {
            Some(report) => Step::Stop(report),
            None => Step::Continue,
        })
    }

    fn pop(&mut self) {
        self.frames.pop();
        self.path.pop();
    }

    fn step(&mut self) -> Result<Step<H::Report>, RunFault> {
        let node = self.path.last().expect("frame without node").clone();
        let frame = self.frames.last_mut().expect("frame");
        match frame {
            Frame::Leaf => {
                let ctx = &self.contexts[node.tree.0 as usize];
                match (node.is_success_leaf(), ctx.mode, ctx.source) {
                    (true, TreeMode::Subsidiary, Some(source)) => {
                        // first success: prune the rest of the subsidiary tree
                        let at = Path::new(&self.path).position(source).expect("negation source on path");
                        self.frames.truncate(at + 1);
                        self.path.truncate(at + 1);
                        self.frames[at] = Frame::Negation(NegState::Succeeded);
                    }
                    _ => self.pop(),
                }
                Ok(Step::Continue)
            }
            Frame::Resolve { next, produced } => {
                let sel = &node.goal[0];
                let candidates = self.program.candidates(&sel.literal.atom);
                let base = self.vars.peek();
                while *next < candidates.len() {
                    let clause = &self.program.clauses[candidates[*next]];
                    *next += 1;
                    let head = clause.head.shift_vars(base);
                    let Some(theta) = mgu(&sel.literal.atom, &head, self.config.occurs_check) else {
                        continue;
                    };
                    *produced = true;
                    self.vars.reserve(clause.nvars);
                    let inherited = sel.ancestors.push(node.id, sel.literal.atom.clone());
                    let mut goal = Vec::with_capacity(clause.body.len() + node.goal.len() - 1);
                    for lit in &clause.body {
                        goal.push(GoalEntry {
                            literal: Literal { positive: lit.positive, atom: theta.apply(&lit.atom.shift_vars(base)) },
                            ancestors: inherited.clone(),
                        });
                    }
                    goal.extend(rest(&node.goal, &theta));
                    let edge = EdgeLabel::Clause(clause.id);
                    return self.create(Some(node.id), Some(edge), node.tree, goal);
                }
                if !*produced {
                    *produced = true;
                    return self.create(Some(node.id), Some(EdgeLabel::Failure), node.tree, Vec::new());
                }
                self.pop();
                Ok(Step::Continue)
            }
            Frame::Negation(state) => match state {
                NegState::Start => {
                    let sel = &node.goal[0];
                    if !sel.literal.atom.is_ground() {
                        return Err(self.fault(Fault::Floundering { node: node.id, literal: sel.literal.clone() }));
                    }
                    *state = NegState::Waiting;
                    let entry = GoalEntry {
                        literal: Literal::positive(sel.literal.atom.clone()),
                        ancestors: sel.ancestors.clone(),
                    };
                    let tree = self.open_tree(TreeMode::Subsidiary, Some(node.id));
                    self.create(Some(node.id), Some(EdgeLabel::NegationEntry), tree, vec![entry])
                }
                NegState::Waiting => {
                    *state = NegState::Done;
                    let goal = node.goal[1..].to_vec();
                    self.create(Some(node.id), Some(EdgeLabel::NegationExit), node.tree, goal)
                }
                NegState::Succeeded => {
                    *state = NegState::Done;
                    self.create(Some(node.id), Some(EdgeLabel::Failure), node.tree, Vec::new())
                }
                NegState::Done => {
                    self.pop();
                    Ok(Step::Continue)
                }
            },
            Frame::Builtin { done } => {
                if *done {
                    self.pop();
                    return Ok(Step::Continue);
                }
                *done = true;
                match builtin::solve(&node.goal[0].literal.atom, node.id) {
                    Ok(Some(theta)) => {
                        let goal = rest(&node.goal, &theta);
                        self.create(Some(node.id), Some(EdgeLabel::Builtin), node.tree, goal)
                    }
                    Ok(None) => self.create(Some(node.id), Some(EdgeLabel::Failure), node.tree, Vec::new()),
                    Err(fault) => Err(self.fault(fault)),
                }
            }
        }
    }
}

/// Non-selected entries of `goal` under `theta`; ancestor lists are kept.
fn rest(goal: &[GoalEntry], theta: &Substitution) -> Vec<GoalEntry> {
    goal[1..]
        .iter()
        .map(|e| GoalEntry {
            literal: Literal { positive: e.literal.positive, atom: theta.apply(&e.literal.atom) },
            ancestors: e.ancestors.clone(),
        })
        .collect()
}

mod builtin {
    use super::{Fault, NodeId};
    use crate::term::{Substitution, Term};
    use crate::unify::mgu;

    /// `Ok(Some(θ))` on success, `Ok(None)` on failure.
    pub(super) fn solve(atom: &Term, node: NodeId) -> Result<Option<Substitution>, Fault> {
        let (op, args) = (atom.functor().unwrap_or_default(), atom.args());
        if op == "is" {
            let value = eval(&args[1], node)?;
            return Ok(mgu(&args[0], &Term::Int(value), true));
        }
        let (l, r) = (eval(&args[0], node)?, eval(&args[1], node)?);
        let holds = match op {
            "<" => l < r,
            ">" => l > r,
            "=<" => l <= r,
            ">=" => l >= r,
            "=:=" => l == r,
            "=\\=" => l != r,
            _ => unreachable!("not a builtin: {op}"),
        };
        Ok(holds.then(Substitution::new))
    }

    fn type_error(node: NodeId, message: String) -> Fault {
        Fault::Type { node, message }
    }

    pub(super) fn eval(expr: &Term, node: NodeId) -> Result<i64, Fault> {
        match expr {
            Term::Int(n) => Ok(*n),
            Term::Var(_) => {
                Err(Fault::Instantiation { node, message: format!("unbound variable in arithmetic expression {expr}") })
            }
            Term::App(app) => match (&*app.functor, app.args.as_slice()) {
                ("size", [list]) => {
                    let (items, tail) = list.list_parts();
                    if tail.is_nil() {
                        Ok(items.len() as i64)
                    } else if tail.as_var().is_some() {
                        Err(Fault::Instantiation { node, message: format!("size/1 of a partial list {list}") })
                    } else {
                        Err(type_error(node, format!("size/1 expects a proper list, got {list}")))
                    }
                }
                (op @ ("+" | "-" | "*" | "//"), [a, b]) => {
                    let (x, y) = (eval(a, node)?, eval(b, node)?);
                    let out = match op {
                        "+" => x.checked_add(y),
                        "-" => x.checked_sub(y),
                        "*" => x.checked_mul(y),
                        _ if y == 0 => return Err(type_error(node, format!("division by zero in {expr}"))),
                        _ => x.checked_div(y),
                    };
                    out.ok_or_else(|| type_error(node, format!("integer overflow in {expr}")))
                }
                _ => Err(type_error(node, format!("{expr} is not an arithmetic expression"))),
            },
        }
    }
}
