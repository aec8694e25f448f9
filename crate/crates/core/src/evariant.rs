//! Expanded variants: `A' ⊒ A` when a renaming of `A'` equals `A` except
//! that some subterms of `A` have grown into compound terms around them.
//!
//! Two growth rules are offered. Under [`GrowthRule::Subterm`] a growing
//! subterm may sit anywhere strictly inside the compound that replaced it,
//! possibly after further growth of its own parts; this makes the relation
//! transitive. [`GrowthRule::DirectArg`] requires the grown compound to carry
//! the original subterm verbatim as one of its direct arguments.

use std::collections::BTreeMap;
use std::fmt;

use rustc_hash::FxHashMap as HashMap;

use crate::term::{Term, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GrowthRule {
    #[default]
    Subterm,
    DirectArg,
}

/// Path of 1-based argument indices into a term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Position(pub Vec<u32>);

impl Position {
    pub fn is_valid_for(&self, t: &Term) -> bool {
        t.subterm(&self.0).is_some()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, step) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{step}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvWitness {
    /// Renaming of every variable of the expanded term. Variables matched
    /// against the smaller term map onto its variables; the rest map to
    /// variables occurring in neither term.
    pub renaming: BTreeMap<Var, Var>,
    /// Positions in the smaller term whose subterms grew, sorted.
    pub growing_positions: Vec<Position>,
}

impl EvWitness {
    pub fn is_variant(&self) -> bool {
        self.growing_positions.is_empty()
    }
}

/// Decides `a_prime ⊒EV a` and returns a witness when it holds.
pub fn expanded_variant(a_prime: &Term, a: &Term, rule: GrowthRule) -> Option<EvWitness> {
    let mut search = Search::new(a_prime, a, rule);
    if !search.run() {
        return None;
    }
    Some(search.witness(a_prime, a))
}

/// Like [`expanded_variant`] without building the witness.
pub fn is_expanded_variant(a_prime: &Term, a: &Term, rule: GrowthRule) -> bool {
    Search::new(a_prime, a, rule).run()
}

/// Term flattened in pre-order with cached sizes and groundness. The
/// children of node `i` start at `i + 1`, each following the previous
/// child's subtree.
struct Arena<'a> {
    nodes: Vec<ArenaNode<'a>>,
    root: usize,
}

struct ArenaNode<'a> {
    term: &'a Term,
    size: usize,
    ground: bool,
}

impl<'a> Arena<'a> {
    fn new(t: &'a Term) -> Self {
        let mut nodes = Vec::new();
        let root = Self::build(t, &mut nodes);
        Arena { nodes, root }
    }

    fn build(t: &'a Term, nodes: &mut Vec<ArenaNode<'a>>) -> usize {
        let i = nodes.len();
        nodes.push(ArenaNode { term: t, size: 1, ground: !matches!(t, Term::Var(_)) });
        for a in t.args() {
            let k = Self::build(a, nodes);
            nodes[i].size += nodes[k].size;
            nodes[i].ground &= nodes[k].ground;
        }
        i
    }

    fn first_kid(&self, i: usize) -> usize {
        i + 1
    }

    fn end(&self, i: usize) -> usize {
        i + self.nodes[i].size
    }

    fn next_sibling(&self, k: usize) -> usize {
        k + self.nodes[k].size
    }

    fn kids(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut k = self.first_kid(i);
        while k < self.end(i) {
            out.push(k);
            k = self.next_sibling(k);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Perm {
    /// The root: must couple, never grows.
    Root,
    /// May couple or grow.
    Free,
    /// Inside a direct-argument growth: must match exactly.
    Exact,
}

struct Task {
    big: usize,
    small: usize,
    pos: Vec<u32>,
    perm: Perm,
}

struct Search<'a> {
    big: Arena<'a>,
    small: Arena<'a>,
    rule: GrowthRule,
    fwd: HashMap<Var, Var>,
    bwd: HashMap<Var, Var>,
    trail: Vec<Var>,
    growth: Vec<Vec<u32>>,
    /// Ground embeddings taken: position in the smaller term, both nodes, mode.
    ground_growth: Vec<(Vec<u32>, usize, usize, Perm)>,
    ground_memo: HashMap<(usize, usize, Perm), bool>,
}

impl<'a> Search<'a> {
    fn new(a_prime: &'a Term, a: &'a Term, rule: GrowthRule) -> Self {
        Search {
            big: Arena::new(a_prime),
            small: Arena::new(a),
            rule,
            fwd: HashMap::default(),
            bwd: HashMap::default(),
            trail: Vec::new(),
            growth: Vec::new(),
            ground_growth: Vec::new(),
            ground_memo: HashMap::default(),
        }
    }

    fn run(&mut self) -> bool {
        let root = Task { big: self.big.root, small: self.small.root, pos: Vec::new(), perm: Perm::Root };
        self.solve(&mut vec![root])
    }

    fn child_perm(&self, perm: Perm) -> Perm {
        if perm == Perm::Exact {
            Perm::Exact
        } else {
            Perm::Free
        }
    }

    fn dive_perm(&self) -> Perm {
        match self.rule {
            GrowthRule::Subterm => Perm::Free,
            GrowthRule::DirectArg => Perm::Exact,
        }
    }

    /// Runs the pending tasks. On failure the stack is left as it was found.
    fn solve(&mut self, stack: &mut Vec<Task>) -> bool {
        let Some(task) = stack.pop() else {
            return true;
        };
        let (b, s) = (&self.big.nodes[task.big], &self.small.nodes[task.small]);
        let fits = if task.perm == Perm::Exact { b.size == s.size } else { b.size >= s.size };
        if fits && !(b.ground && !s.ground) {
            if s.ground {
                if self.ground_embed(task.big, task.small, task.perm) {
                    self.ground_growth.push((task.pos.clone(), task.big, task.small, task.perm));
                    if self.solve(stack) {
                        return true;
                    }
                    self.ground_growth.pop();
                }
            } else {
                if self.try_couple(&task, stack) {
                    return true;
                }
                if task.perm == Perm::Free && self.try_dive(&task, stack) {
                    return true;
                }
            }
        }
        stack.push(task);
        false
    }

    fn try_couple(&mut self, task: &Task, stack: &mut Vec<Task>) -> bool {
        let (b, s) = (&self.big.nodes[task.big], &self.small.nodes[task.small]);
        let height = stack.len();
        let trail_mark = self.trail.len();
        match (b.term, s.term) {
            (Term::Var(y), Term::Var(x)) => {
                let (y, x) = (*y, *x);
                match (self.fwd.get(&y), self.bwd.get(&x)) {
                    (Some(m), _) if *m != x => return false,
                    (None, Some(_)) => return false,
                    (Some(_), _) => {}
                    (None, None) => {
                        self.fwd.insert(y, x);
                        self.bwd.insert(x, y);
                        self.trail.push(y);
                    }
                }
            }
            (Term::App(p), Term::App(q)) => {
                if p.functor != q.functor || p.args.len() != q.args.len() {
                    return false;
                }
                let perm = self.child_perm(task.perm);
                let (bk, sk) = (self.big.kids(task.big), self.small.kids(task.small));
                for (i, (bi, si)) in bk.into_iter().zip(sk).enumerate().rev() {
                    let mut pos = task.pos.clone();
                    pos.push(i as u32 + 1);
                    stack.push(Task { big: bi, small: si, pos, perm });
                }
            }
            _ => return false,
        }
        if self.solve(stack) {
            return true;
        }
        stack.truncate(height);
        self.undo(trail_mark);
        false
    }

    fn try_dive(&mut self, task: &Task, stack: &mut Vec<Task>) -> bool {
        let kids = self.big.kids(task.big);
        let need = self.small.nodes[task.small].size;
        let perm = self.dive_perm();
        for k in kids {
            if self.big.nodes[k].size < need {
                continue;
            }
            self.growth.push(task.pos.clone());
            stack.push(Task { big: k, small: task.small, pos: task.pos.clone(), perm });
            if self.solve(stack) {
                return true;
            }
            stack.pop();
            self.growth.pop();
        }
        false
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let y = self.trail.pop().expect("trail");
            if let Some(x) = self.fwd.remove(&y) {
                self.bwd.remove(&x);
            }
        }
    }

    /// Embedding against a ground subterm involves no renaming, so the
    /// answer depends only on the two subterms and can be memoized. Growing
    /// positions are recovered afterwards by [`Self::ground_positions`].
    fn ground_embed(&mut self, big: usize, small: usize, perm: Perm) -> bool {
        let (b, s) = (&self.big.nodes[big], &self.small.nodes[small]);
        if b.size <= s.size {
            // no room to grow: only an identical ground term embeds
            return b.size == s.size && b.term == s.term;
        }
        if let Some(&hit) = self.ground_memo.get(&(big, small, perm)) {
            return hit;
        }
        let result = self.ground_embed_uncached(big, small, perm);
        self.ground_memo.insert((big, small, perm), result);
        result
    }

    fn ground_couples(&self, big: usize, small: usize) -> bool {
        match (self.big.nodes[big].term, self.small.nodes[small].term) {
            (Term::Int(m), Term::Int(n)) => m == n,
            (Term::App(p), Term::App(q)) => p.functor == q.functor && p.args.len() == q.args.len(),
            _ => false,
        }
    }

    fn ground_embed_uncached(&mut self, big: usize, small: usize, perm: Perm) -> bool {
        let (b, s) = (&self.big.nodes[big], &self.small.nodes[small]);
        if b.size < s.size || (perm == Perm::Exact && b.size != s.size) {
            return false;
        }
        if self.ground_couples(big, small) {
            let child = self.child_perm(perm);
            let (mut bk, mut sk) = (self.big.first_kid(big), self.small.first_kid(small));
            let mut ok = true;
            while ok && bk < self.big.end(big) {
                ok = self.ground_embed(bk, sk, child);
                bk = self.big.next_sibling(bk);
                sk = self.small.next_sibling(sk);
            }
            if ok {
                return true;
            }
        }
        if perm == Perm::Free {
            let dive = self.dive_perm();
            let mut k = self.big.first_kid(big);
            while k < self.big.end(big) {
                if self.ground_embed(k, small, dive) {
                    return true;
                }
                k = self.big.next_sibling(k);
            }
        }
        false
    }

    /// Replays the memoized choices of a successful ground embedding,
    /// collecting growing positions below `pos` in the smaller term.
    fn ground_positions(&mut self, big: usize, small: usize, perm: Perm, pos: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if self.ground_couples(big, small) {
            let child = self.child_perm(perm);
            let pairs: Vec<(usize, usize)> = self.big.kids(big).into_iter().zip(self.small.kids(small)).collect();
            if pairs.iter().all(|&(bk, sk)| self.ground_embed(bk, sk, child)) {
                for (i, (bk, sk)) in pairs.into_iter().enumerate() {
                    pos.push(i as u32 + 1);
                    self.ground_positions(bk, sk, child, pos, out);
                    pos.pop();
                }
                return;
            }
        }
        let dive = self.dive_perm();
        let k = self
            .big
            .kids(big)
            .into_iter()
            .find(|&k| self.ground_embed(k, small, dive))
            .expect("replayed embedding succeeded before");
        out.push(pos.clone());
        self.ground_positions(k, small, dive, pos, out);
    }

    fn witness(&mut self, a_prime: &Term, a: &Term) -> EvWitness {
        let mut next = a_prime.max_var().into_iter().chain(a.max_var()).max().map_or(0, |m| m + 1);
        let mut renaming = BTreeMap::new();
        for v in a_prime.vars() {
            let target = match self.fwd.get(&v) {
                Some(x) => *x,
                None => {
                    let fresh = Var(next);
                    next += 1;
                    fresh
                }
            };
            renaming.insert(v, target);
        }
        let mut positions = self.growth.clone();
        for (pos, big, small, perm) in std::mem::take(&mut self.ground_growth) {
            self.ground_positions(big, small, perm, &mut pos.clone(), &mut positions);
        }
        let mut growing_positions: Vec<Position> = positions.into_iter().map(Position).collect();
        growing_positions.sort();
        growing_positions.dedup();
        EvWitness { renaming, growing_positions }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(name: &str) -> Term {
        Term::atom(name)
    }

    fn f(name: &str, args: Vec<Term>) -> Term {
        Term::app(name, args)
    }

    fn v(id: u32) -> Term {
        Term::var(id)
    }

    fn positions(w: &EvWitness) -> Vec<Vec<u32>> {
        w.growing_positions.iter().map(|p| p.0.clone()).collect()
    }

    #[test]
    fn variants_have_no_growth() {
        let w = expanded_variant(&f("p", vec![v(2), v(3)]), &f("p", vec![v(0), v(1)]), GrowthRule::Subterm).unwrap();
        assert!(w.is_variant());
        assert_eq!(w.renaming.get(&Var(2)), Some(&Var(0)));
    }

    #[test]
    fn constant_grows_into_compound() {
        let w =
            expanded_variant(&f("p", vec![f("f", vec![a("a")])]), &f("p", vec![a("a")]), GrowthRule::Subterm).unwrap();
        assert_eq!(positions(&w), vec![vec![1]]);
        assert!(
            expanded_variant(&f("p", vec![a("a")]), &f("p", vec![f("f", vec![a("a")])]), GrowthRule::Subterm).is_none()
        );
    }

    #[test]
    fn nested_growing_term() {
        // p(Y, g(h(Y))) over p(X, g(X))
        let big = f("p", vec![v(1), f("g", vec![f("h", vec![v(1)])])]);
        let small = f("p", vec![v(0), f("g", vec![v(0)])]);
        let w = expanded_variant(&big, &small, GrowthRule::Subterm).unwrap();
        assert_eq!(positions(&w), vec![vec![2, 1]]);
        assert!(is_expanded_variant(&big, &small, GrowthRule::DirectArg));
    }

    #[test]
    fn list_growth() {
        // p([X1,X2,X3]) over p([X1,X4])
        let big = f("p", vec![Term::proper_list(vec![v(0), v(1), v(2)])]);
        let small = f("p", vec![Term::proper_list(vec![v(0), v(3)])]);
        assert!(is_expanded_variant(&big, &small, GrowthRule::Subterm));
        assert!(is_expanded_variant(&big, &small, GrowthRule::DirectArg));
    }

    #[test]
    fn several_growing_terms() {
        // p(g(a), f(g(h(X)))) over p(a, f(h(Y)))
        let big = f("p", vec![f("g", vec![a("a")]), f("f", vec![f("g", vec![f("h", vec![v(0)])])])]);
        let small = f("p", vec![a("a"), f("f", vec![f("h", vec![v(1)])])]);
        let w = expanded_variant(&big, &small, GrowthRule::Subterm).unwrap();
        assert_eq!(positions(&w), vec![vec![1], vec![2, 1]]);
    }

    #[test]
    fn root_never_grows() {
        assert!(!is_expanded_variant(&f("f", vec![f("p", vec![a("a")])]), &f("p", vec![a("a")]), GrowthRule::Subterm));
        assert!(!is_expanded_variant(&f("q", vec![a("a")]), &f("p", vec![a("a")]), GrowthRule::Subterm));
    }

    #[test]
    fn renaming_is_injective_and_consistent() {
        // p(Y, Y) over p(X, Z): Y cannot stand for both X and Z
        assert!(!is_expanded_variant(&f("p", vec![v(5), v(5)]), &f("p", vec![v(0), v(1)]), GrowthRule::Subterm));
        // p(Y, Z) over p(X, X): X would need two preimages
        assert!(!is_expanded_variant(&f("p", vec![v(5), v(6)]), &f("p", vec![v(0), v(0)]), GrowthRule::Subterm));
        // a variable cannot grow into a constant
        assert!(!is_expanded_variant(&f("p", vec![a("b")]), &f("p", vec![v(0)]), GrowthRule::Subterm));
    }

    #[test]
    fn direct_arg_rejects_nested_growth() {
        let big = f("p", vec![f("f", vec![f("g", vec![a("a")])])]);
        let small = f("p", vec![a("a")]);
        assert!(is_expanded_variant(&big, &small, GrowthRule::Subterm));
        assert!(!is_expanded_variant(&big, &small, GrowthRule::DirectArg));
    }

    #[test]
    fn witness_renames_unmatched_variables_freshly() {
        let big = f("p", vec![f("f", vec![v(7), v(8)])]);
        let small = f("p", vec![v(0)]);
        let w = expanded_variant(&big, &small, GrowthRule::Subterm).unwrap();
        assert_eq!(w.renaming.get(&Var(7)), Some(&Var(0)));
        let other = w.renaming[&Var(8)];
        assert!(other != Var(0) && other != Var(7) && other != Var(8));
    }

    #[test]
    fn integers_are_constants() {
        let big = f("p", vec![f("s", vec![Term::int(1)])]);
        assert!(is_expanded_variant(&big, &f("p", vec![Term::int(1)]), GrowthRule::Subterm));
        assert!(!is_expanded_variant(&f("p", vec![Term::int(2)]), &f("p", vec![Term::int(1)]), GrowthRule::Subterm));
    }

    #[test]
    fn position_display() {
        assert_eq!(Position(vec![2, 1]).to_string(), "[2,1]");
        assert!(Position(vec![2, 1]).is_valid_for(&f("p", vec![a("a"), f("g", vec![a("b")])])));
        assert!(!Position(vec![1, 1]).is_valid_for(&f("p", vec![a("a")])));
    }
}
