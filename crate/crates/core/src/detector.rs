//! Detection of most-likely non-terminating derivations.
//!
//! At every node whose selected subgoal is a positive, non-builtin atom, the
//! detector looks for `d` earlier ancestor subgoals `g1 < … < gd` that form,
//! together with the current subgoal, a chain in which
//!
//! 1. each atom is an expanded variant of the one before it,
//! 2. the sizes are all equal or strictly increasing, and
//! 3. every segment between consecutive chain nodes used the same set of
//!    clauses.

use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap as HashMap;

use crate::engine::{build_tree, EngineConfig, Fault, Node, NodeHook, NodeId, Outcome, Path, RunFault, Stats, Tree};
use crate::evariant::{expanded_variant, is_expanded_variant, EvWitness, GrowthRule};
use crate::parser::{ClauseId, Literal, Program};
use crate::term::{is_variant, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectorConfig {
    /// Number of repetitions `d`; at least 2.
    pub depth: usize,
    pub growth: GrowthRule,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig { depth: 2, growth: GrowthRule::Subterm }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    AllEqualSize,
    StrictlyIncreasingSize,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::AllEqualSize => "all-equal-size",
            Regime::StrictlyIncreasingSize => "strictly-increasing-size",
        }
    }

    pub fn admits(&self, earlier: usize, later: usize) -> bool {
        match self {
            Regime::AllEqualSize => earlier == later,
            Regime::StrictlyIncreasingSize => earlier < later,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainLink {
    pub node: NodeId,
    pub atom: Term,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainReport {
    /// `d + 1` links, oldest first; the last one is the detecting node.
    pub links: Vec<ChainLink>,
    pub regime: Regime,
    /// Sorted clause ids shared by every segment.
    pub clause_set: Vec<ClauseId>,
    /// `witnesses[i]` shows `links[i + 1]` expanding `links[i]`.
    pub witnesses: Vec<EvWitness>,
}

/// Clause ids on the edges after `from` up to and including the edge into
/// `to`, sorted and without repetition. `None` unless both nodes lie on the
/// path with `from` not after `to`.
pub fn segment_clause_set(path: &Path<'_>, from: NodeId, to: NodeId) -> Option<Vec<ClauseId>> {
    let (i, j) = (path.position(from)?, path.position(to)?);
    if i > j {
        return None;
    }
    let mut set: Vec<ClauseId> =
        path.nodes()[i + 1..=j].iter().filter_map(|n| n.edge.and_then(|e| e.clause())).collect();
    set.sort();
    set.dedup();
    Some(set)
}

/// Looks for a chain ending at the current node of `path`.
pub fn check_node(path: &Path<'_>, config: &DetectorConfig) -> Option<ChainReport> {
    LoopDetector::new(*config).check(path)
}

const CACHE_LIMIT: usize = 1 << 20;

/// Node hook running [`check_node`] with caches that live for one run.
///
/// Node ids identify atoms and path segments uniquely within a run, so
/// expanded-variant results and clause sets are cached per node pair.
pub struct LoopDetector {
    config: DetectorConfig,
    ev_cache: HashMap<(NodeId, NodeId), bool>,
    seg_cache: HashMap<(NodeId, NodeId), Arc<[ClauseId]>>,
}

/// Node ids, atoms, regime and clause set of the best chain found so far.
type BestChain = (Vec<NodeId>, Vec<Term>, Regime, Arc<[ClauseId]>);

struct Cand<'t> {
    node: NodeId,
    atom: &'t Term,
    size: usize,
}

impl LoopDetector {
    pub fn new(config: DetectorConfig) -> Self {
        assert!(config.depth >= 2, "depth bound must be at least 2");
        LoopDetector { config, ev_cache: HashMap::default(), seg_cache: HashMap::default() }
    }

    fn ev(&mut self, earlier: &Cand<'_>, later: &Cand<'_>) -> bool {
        if self.ev_cache.len() > CACHE_LIMIT {
            self.ev_cache.clear();
        }
        let growth = self.config.growth;
        *self.ev_cache.entry((earlier.node, later.node)).or_insert_with(|| {
            if earlier.size == later.size {
                return is_variant(earlier.atom, later.atom);
            }
            is_expanded_variant(later.atom, earlier.atom, growth)
        })
    }

    fn segment(&mut self, path: &Path<'_>, from: NodeId, to: NodeId) -> Arc<[ClauseId]> {
        if self.seg_cache.len() > CACHE_LIMIT {
            self.seg_cache.clear();
        }
        self.seg_cache
            .entry((from, to))
            .or_insert_with(|| segment_clause_set(path, from, to).expect("ancestor lies on the current path").into())
            .clone()
    }

    pub fn check(&mut self, path: &Path<'_>) -> Option<ChainReport> {
        let node: &Node = path.current();
        let sel = node.selected()?;
        if !sel.literal.positive || sel.literal.is_builtin() {
            return None;
        }
        let d = self.config.depth;
        if sel.ancestors.len() < d {
            return None;
        }
        let atom = &sel.literal.atom;
        let current = Cand { node: node.id, atom, size: atom.size() };
        let mut cands: Vec<Cand<'_>> = sel
            .ancestors
            .iter()
            .filter(|(_, a)| a.indicator() == atom.indicator())
            .map(|(n, a)| Cand { node: n, atom: a, size: a.size() })
            .filter(|c| c.size <= current.size)
            .collect();
        cands.reverse();
        if self.config.growth == GrowthRule::Subterm {
            // every chain member is an expanded variant of the current atom
            let mut kept = Vec::with_capacity(cands.len());
            for c in cands {
                if self.ev(&c, &current) {
                    kept.push(c);
                }
            }
            cands = kept;
        }
        if cands.len() < d {
            return None;
        }

        let mut best: Option<BestChain> = None;
        for regime in [Regime::AllEqualSize, Regime::StrictlyIncreasingSize] {
            let mut nodes: Vec<&Cand<'_>> = cands.iter().filter(|c| regime.admits(c.size, current.size)).collect();
            if nodes.len() < d {
                continue;
            }
            nodes.push(&current);
            let last = nodes.len() - 1;
            let mut sets: Vec<Arc<[ClauseId]>> = Vec::new();
            for j in 0..last {
                if self.ev(nodes[j], nodes[last]) {
                    let s = self.segment(path, nodes[j].node, current.node);
                    if !sets.contains(&s) {
                        sets.push(s);
                    }
                }
            }
            sets.sort();
            for set in sets {
                let Some(idx) = self.first_chain(path, &nodes, regime, &set, d) else {
                    continue;
                };
                let ids: Vec<NodeId> = idx.iter().map(|&i| nodes[i].node).collect();
                if best.as_ref().is_none_or(|(b, ..)| ids < *b) {
                    let atoms = idx.iter().map(|&i| nodes[i].atom.clone()).collect();
                    best = Some((ids, atoms, regime, set));
                }
            }
        }

        let (ids, atoms, regime, set) = best?;
        let witnesses = atoms
            .windows(2)
            .map(|w| expanded_variant(&w[1], &w[0], self.config.growth).expect("chain link is an expanded variant"))
            .collect();
        let links = ids.into_iter().zip(atoms).map(|(node, atom)| ChainLink { node, atom }).collect();
        Some(ChainReport { links, regime, clause_set: set.to_vec(), witnesses })
    }

    /// Lexicographically first chain of `d` links ending at the last entry
    /// of `nodes`, every segment having clause set `set`.
    fn first_chain(
        &mut self,
        path: &Path<'_>,
        nodes: &[&Cand<'_>],
        regime: Regime,
        set: &Arc<[ClauseId]>,
        d: usize,
    ) -> Option<Vec<usize>> {
        let last = nodes.len() - 1;
        let words = d / 64 + 1;
        // reach[j] has bit r when a chain of exactly r links leads from j to the end
        let mut reach = vec![vec![0u64; words]; nodes.len()];
        reach[last][0] = 1;
        let mut link = HashMap::default();
        for j in (0..last).rev() {
            for l in j + 1..=last {
                if reach[l].iter().all(|w| *w == 0) {
                    continue;
                }
                if !self.link(path, nodes, j, l, regime, set, &mut link) {
                    continue;
                }
                let src = reach[l].clone();
                shift_or(&mut reach[j], &src, d);
            }
        }
        let bit = |v: &[u64], r: usize| v[r / 64] >> (r % 64) & 1 == 1;
        let mut chain = Vec::with_capacity(d + 1);
        let mut at = (0..last).find(|&j| bit(&reach[j], d))?;
        chain.push(at);
        for r in (0..d).rev() {
            at = (at + 1..=last)
                .find(|&l| bit(&reach[l], r) && link.get(&(at, l)).copied().unwrap_or(false))
                .expect("reachability implies a next link");
            chain.push(at);
        }
        Some(chain)
    }

    #[allow(clippy::too_many_arguments)]
    fn link(
        &mut self,
        path: &Path<'_>,
        nodes: &[&Cand<'_>],
        j: usize,
        l: usize,
        regime: Regime,
        set: &Arc<[ClauseId]>,
        memo: &mut HashMap<(usize, usize), bool>,
    ) -> bool {
        let ok = regime.admits(nodes[j].size, nodes[l].size)
            && *self.segment(path, nodes[j].node, nodes[l].node) == **set
            && self.ev(nodes[j], nodes[l]);
        memo.insert((j, l), ok);
        ok
    }
}

fn shift_or(dst: &mut [u64], src: &[u64], d: usize) {
    let mut carry = 0;
    for (w, s) in dst.iter_mut().zip(src) {
        *w |= (s << 1) | carry;
        carry = s >> 63;
    }
    // drop bits beyond d
    let words = dst.len();
    let top = d % 64;
    if top < 63 {
        dst[words - 1] &= (1u64 << (top + 1)) - 1;
    }
}

impl NodeHook for LoopDetector {
    type Report = ChainReport;

    fn on_node(&mut self, path: &Path<'_>) -> Option<ChainReport> {
        self.check(path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TestConfig {
    pub engine: EngineConfig,
    pub detector: DetectorConfig,
}

/// A query whose generalized tree was built completely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryRun {
    pub query: Literal,
    pub stats: Stats,
    pub tree: Option<Tree>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detection {
    pub query_index: usize,
    pub query: Literal,
    /// Root-to-detection path; its last node carries the chain's last atom.
    pub derivation: Vec<Arc<Node>>,
    pub chain: ChainReport,
    pub stats: Stats,
    pub tree: Option<Tree>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryFault {
    pub query_index: usize,
    pub query: Literal,
    pub fault: Fault,
    pub stats: Stats,
    /// Derivation leading to the node where the fault arose.
    pub path: Vec<Arc<Node>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Terminating {
        runs: Vec<QueryRun>,
    },
    MostLikelyNonTerminating {
        /// Completed runs of the queries before the offending one.
        runs: Vec<QueryRun>,
        detection: Box<Detection>,
    },
    Fault {
        runs: Vec<QueryRun>,
        fault: Box<QueryFault>,
    },
}

impl Verdict {
    pub fn runs(&self) -> &[QueryRun] {
        match self {
            Verdict::Terminating { runs }
            | Verdict::MostLikelyNonTerminating { runs, .. }
            | Verdict::Fault { runs, .. } => runs,
        }
    }

    pub fn is_terminating(&self) -> bool {
        matches!(self, Verdict::Terminating { .. })
    }
}

/// Result of one query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryResult {
    Completed(QueryRun),
    Detected(Box<Detection>),
    Fault(Box<QueryFault>),
}

/// Builds one query's tree with loop detection.
pub fn run_query(
    program: &Program,
    query_index: usize,
    query: &Literal,
    config: &TestConfig,
    cancel: &dyn Fn() -> bool,
) -> QueryResult {
    let mut hook = LoopDetector::new(config.detector);
    match build_tree(program, query, &config.engine, &mut hook, cancel) {
        Ok(Outcome::Completed { stats, tree }) => {
            QueryResult::Completed(QueryRun { query: query.clone(), stats, tree })
        }
        Ok(Outcome::Detected { report, derivation, stats, tree }) => QueryResult::Detected(Box::new(Detection {
            query_index,
            query: query.clone(),
            derivation,
            chain: report,
            stats,
            tree,
        })),
        Err(RunFault { fault, stats, path }) => {
            QueryResult::Fault(Box::new(QueryFault { query_index, query: query.clone(), fault, stats, path }))
        }
    }
}

/// Folds per-query results in input order; the first non-completed one decides.
fn merge(results: impl IntoIterator<Item = Option<QueryResult>>) -> Verdict {
    let mut runs = Vec::new();
    for r in results {
        match r.expect("queries before the deciding one always run") {
            QueryResult::Completed(run) => runs.push(run),
            QueryResult::Detected(detection) => return Verdict::MostLikelyNonTerminating { runs, detection },
            QueryResult::Fault(fault) => return Verdict::Fault { runs, fault },
        }
    }
    Verdict::Terminating { runs }
}

/// Runs the queries one after another, stopping at the first detection or fault.
pub fn test_sequential(program: &Program, queries: &[Literal], config: &TestConfig) -> Verdict {
    let mut decided = false;
    merge(queries.iter().enumerate().map(|(i, q)| {
        if decided {
            return None;
        }
        let r = run_query(program, i, q, config, &|| false);
        decided = !matches!(r, QueryResult::Completed(_));
        Some(r)
    }))
}

/// Runs the queries on the rayon pool. A query that detects or faults
/// cancels every later query; the verdict equals the sequential one.
#[cfg(feature = "parallel")]
pub fn test_parallel(program: &Program, queries: &[Literal], config: &TestConfig) -> Verdict {
    use rayon::prelude::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    let decided = AtomicUsize::new(usize::MAX);
    let results: Vec<Option<QueryResult>> = queries
        .par_iter()
        .enumerate()
        .map(|(i, q)| {
            if decided.load(Ordering::Relaxed) < i {
                return None;
            }
            let cancel = || decided.load(Ordering::Relaxed) < i;
            let r = run_query(program, i, q, config, &cancel);
            match &r {
                QueryResult::Completed(_) => {}
                QueryResult::Fault(f) if f.fault == Fault::Cancelled => return None,
                _ => {
                    decided.fetch_min(i, Ordering::Relaxed);
                }
            }
            Some(r)
        })
        .collect();
    merge(results)
}

/// Decides the queries, in parallel when the `parallel` feature is on.
pub fn test(program: &Program, queries: &[Literal], config: &TestConfig) -> Verdict {
    #[cfg(feature = "parallel")]
    {
        test_parallel(program, queries, config)
    }
    #[cfg(not(feature = "parallel"))]
    {
        test_sequential(program, queries, config)
    }
}
