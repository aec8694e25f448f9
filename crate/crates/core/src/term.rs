//! First-order terms: variables, integers and compound terms (constants are
//! zero-arity compounds). Lists are built from `'.'/2` and `[]`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

/// Functor used for list cells.
pub const CONS: &str = ".";
/// The empty list constant.
pub const NIL: &str = "[]";

/// A logic variable, identified by a number that is unique within one
/// derivation context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_G{}", self.0)
    }
}

/// Monotonic source of fresh variables.
#[derive(Debug, Clone, Default)]
pub struct VarGen {
    next: u32,
}

impl VarGen {
    pub fn starting_at(next: u32) -> Self {
        VarGen { next }
    }

    pub fn fresh(&mut self) -> Var {
        let v = Var(self.next);
        self.next += 1;
        v
    }

    /// Reserves `n` consecutive variables and returns the first one.
    pub fn reserve(&mut self, n: u32) -> u32 {
        let base = self.next;
        self.next += n;
        base
    }

    pub fn peek(&self) -> u32 {
        self.next
    }
}

/// A compound term `functor(args...)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct App {
    pub functor: Arc<str>,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Int(i64),
    App(Arc<App>),
}

impl Term {
    pub fn var(id: u32) -> Term {
        Term::Var(Var(id))
    }

    pub fn int(value: i64) -> Term {
        Term::Int(value)
    }

    pub fn atom(name: &str) -> Term {
        Term::app(name, Vec::new())
    }

    pub fn app(functor: &str, args: Vec<Term>) -> Term {
        Term::App(Arc::new(App { functor: Arc::from(functor), args }))
    }

    pub(crate) fn app_shared(functor: &Arc<str>, args: Vec<Term>) -> Term {
        Term::App(Arc::new(App { functor: Arc::clone(functor), args }))
    }

    pub fn nil() -> Term {
        Term::atom(NIL)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::app(CONS, vec![head, tail])
    }

    /// Builds `[items... | tail]`.
    pub fn list(items: Vec<Term>, tail: Term) -> Term {
        items.into_iter().rev().fold(tail, |acc, item| Term::cons(item, acc))
    }

    pub fn proper_list(items: Vec<Term>) -> Term {
        Term::list(items, Term::nil())
    }

    pub fn as_var(&self) -> Option<Var> {
        match self {
            Term::Var(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_app(&self) -> Option<&App> {
        match self {
            Term::App(app) => Some(app),
            _ => None,
        }
    }

    pub fn functor(&self) -> Option<&str> {
        self.as_app().map(|a| &*a.functor)
    }

    pub fn arity(&self) -> usize {
        self.as_app().map_or(0, |a| a.args.len())
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(app) => &app.args,
            _ => &[],
        }
    }

    /// `(name, arity)` for compound terms and constants.
    pub fn indicator(&self) -> Option<(&str, usize)> {
        self.as_app().map(|a| (&*a.functor, a.args.len()))
    }

    pub fn is_constant(&self, name: &str) -> bool {
        matches!(self, Term::App(a) if a.args.is_empty() && &*a.functor == name)
    }

    pub fn is_nil(&self) -> bool {
        self.is_constant(NIL)
    }

    pub fn as_cons(&self) -> Option<(&Term, &Term)> {
        match self {
            Term::App(a) if a.args.len() == 2 && &*a.functor == CONS => Some((&a.args[0], &a.args[1])),
            _ => None,
        }
    }

    /// Number of symbol occurrences: functors and constants (including the
    /// predicate symbol of an atom), variables and integers.
    pub fn size(&self) -> usize {
        let mut total = 0;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            total += 1;
            if let Term::App(app) = t {
                stack.extend(app.args.iter());
            }
        }
        total
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Int(_) => true,
            Term::App(app) => app.args.iter().all(Term::is_ground),
        }
    }

    /// Distinct variables in first-occurrence (left-to-right) order.
    pub fn vars(&self) -> Vec<Var> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.collect_vars(&mut seen, &mut out);
        out
    }

    pub(crate) fn collect_vars(&self, seen: &mut HashSet<Var>, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if seen.insert(*v) {
                    out.push(*v);
                }
            }
            Term::Int(_) => {}
            Term::App(app) => app.args.iter().for_each(|a| a.collect_vars(seen, out)),
        }
    }

    pub fn occurs(&self, var: Var) -> bool {
        match self {
            Term::Var(v) => *v == var,
            Term::Int(_) => false,
            Term::App(app) => app.args.iter().any(|a| a.occurs(var)),
        }
    }

    pub fn max_var(&self) -> Option<u32> {
        match self {
            Term::Var(v) => Some(v.0),
            Term::Int(_) => None,
            Term::App(app) => app.args.iter().filter_map(Term::max_var).max(),
        }
    }

    /// Subterm at a 1-based argument path; the empty path is the term itself.
    pub fn subterm(&self, path: &[u32]) -> Option<&Term> {
        let mut t = self;
        for &i in path {
            let idx = (i as usize).checked_sub(1)?;
            t = t.args().get(idx)?;
        }
        Some(t)
    }

    /// Applies a variable-to-variable mapping; unmapped variables stay as they are.
    pub fn rename(&self, mapping: &HashMap<Var, Var>) -> Term {
        self.map_vars(&mut |v| Term::Var(*mapping.get(&v).unwrap_or(&v)))
    }

    /// Adds `offset` to every variable id.
    pub fn shift_vars(&self, offset: u32) -> Term {
        if offset == 0 {
            return self.clone();
        }
        self.map_vars(&mut |v| Term::Var(Var(v.0 + offset)))
    }

    pub(crate) fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Term {
        match self {
            Term::Var(v) => f(*v),
            Term::Int(_) => self.clone(),
            Term::App(app) => {
                if app.args.is_empty() {
                    return self.clone();
                }
                let args = app.args.iter().map(|a| a.map_vars(f)).collect();
                Term::app_shared(&app.functor, args)
            }
        }
    }

    /// Elements of a list term and the tail that terminates it (`[]` for a
    /// proper list).
    pub fn list_parts(&self) -> (Vec<&Term>, &Term) {
        let mut items = Vec::new();
        let mut t = self;
        while let Some((h, rest)) = t.as_cons() {
            items.push(h);
            t = rest;
        }
        (items, t)
    }
}

/// Renames every variable of `t` to a fresh variable not in `used` (nor in
/// `t` itself). Repeated occurrences stay linked.
pub fn rename_apart(t: &Term, used: &HashSet<Var>) -> Term {
    let floor = used.iter().map(|v| v.0).chain(t.max_var()).max().map_or(0, |m| m + 1);
    let mut gen = VarGen::starting_at(floor);
    let mut mapping = HashMap::new();
    for v in t.vars() {
        mapping.insert(v, gen.fresh());
    }
    t.rename(&mapping)
}

/// True iff a bijective variable renaming makes `a` and `b` identical.
pub fn is_variant(a: &Term, b: &Term) -> bool {
    fn walk(a: &Term, b: &Term, fwd: &mut HashMap<Var, Var>, bwd: &mut HashMap<Var, Var>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                let f = *fwd.entry(*x).or_insert(*y);
                let g = *bwd.entry(*y).or_insert(*x);
                f == *y && g == *x
            }
            (Term::Int(m), Term::Int(n)) => m == n,
            (Term::App(p), Term::App(q)) => {
                p.functor == q.functor
                    && p.args.len() == q.args.len()
                    && p.args.iter().zip(&q.args).all(|(s, t)| walk(s, t, fwd, bwd))
            }
            _ => false,
        }
    }
    walk(a, b, &mut HashMap::new(), &mut HashMap::new())
}

/// A mapping from variables to terms.
///
/// Substitutions produced by [`crate::unify::mgu`] are idempotent: no bound
/// variable occurs in any binding.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: HashMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, var: Var) -> Option<&Term> {
        self.map.get(&var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    /// Records `var ↦ term` without normalizing. Self-bindings are dropped.
    pub fn insert(&mut self, var: Var, term: Term) {
        if term != Term::Var(var) {
            self.map.insert(var, term);
        }
    }

    /// Replaces bound variables by their fully resolved bindings.
    ///
    /// A variable met again while its own binding is being expanded is left
    /// in place, so cyclic bindings (only possible without the occurs check)
    /// still produce a finite term.
    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        let mut active = Vec::new();
        self.apply_inner(t, &mut active)
    }

    fn apply_inner(&self, t: &Term, active: &mut Vec<Var>) -> Term {
        match t {
            Term::Var(v) => match self.map.get(v) {
                Some(bound) if !active.contains(v) => {
                    active.push(*v);
                    let out = self.apply_inner(bound, active);
                    active.pop();
                    out
                }
                _ => t.clone(),
            },
            Term::Int(_) => t.clone(),
            Term::App(app) => {
                if app.args.is_empty() {
                    return t.clone();
                }
                let args = app.args.iter().map(|a| self.apply_inner(a, active)).collect();
                Term::app_shared(&app.functor, args)
            }
        }
    }

    /// Rewrites every binding to its resolved form, making the substitution
    /// idempotent when it is acyclic.
    pub fn normalize(&mut self) {
        let resolved: Vec<(Var, Term)> = self
            .map
            .iter()
            .map(|(v, t)| {
                let mut active = vec![*v];
                (*v, self.apply_inner(t, &mut active))
            })
            .collect();
        self.map.clear();
        for (v, t) in resolved {
            self.insert(v, t);
        }
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (v, t) in iter {
            s.insert(v, t);
        }
        s
    }
}

fn arith_precedence(t: &Term) -> Option<u32> {
    match t.indicator() {
        Some(("+", 2)) | Some(("-", 2)) => Some(500),
        Some(("*", 2)) | Some(("//", 2)) => Some(400),
        _ => None,
    }
}

pub(crate) fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn plain_atom(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase()) && chars.all(is_symbol_char)
}

/// Writes terms in the surface syntax accepted by the parser, with a
/// caller-supplied spelling for variables.
pub struct TermWriter<'a, F: Fn(Var) -> String> {
    term: &'a Term,
    names: &'a F,
    bare: bool,
}

impl<'a, F: Fn(Var) -> String> TermWriter<'a, F> {
    pub fn new(term: &'a Term, names: &'a F) -> Self {
        TermWriter { term, names, bare: false }
    }

    /// Writes a comparison at the root without enclosing parentheses, as it
    /// appears in a goal.
    pub fn goal_position(mut self) -> Self {
        self.bare = true;
        self
    }

    fn write(&self, t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match t {
            Term::Var(v) => f.write_str(&(self.names)(*v)),
            Term::Int(n) => write!(f, "{n}"),
            Term::App(app) => {
                if t.as_cons().is_some() {
                    return self.write_list(t, f);
                }
                if let Some(prec) = arith_precedence(t) {
                    let (l, r) = (&app.args[0], &app.args[1]);
                    self.write_operand(l, arith_precedence(l).is_some_and(|p| p > prec), f)?;
                    f.write_str(&app.functor)?;
                    let wrap_right =
                        arith_precedence(r).is_some_and(|p| p >= prec) || matches!(r, Term::Int(n) if *n < 0);
                    return self.write_operand(r, wrap_right, f);
                }
                if is_comparison(&app.functor) && app.args.len() == 2 {
                    f.write_str("(")?;
                    self.write(&app.args[0], f)?;
                    if &*app.functor == "is" {
                        f.write_str(" is ")?;
                    } else {
                        f.write_str(&app.functor)?;
                    }
                    self.write(&app.args[1], f)?;
                    return f.write_str(")");
                }
                self.write_functor(&app.functor, f)?;
                if !app.args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in app.args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        self.write(a, f)?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }

    fn write_functor(&self, name: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if plain_atom(name) || name == NIL {
            f.write_str(name)
        } else {
            write!(f, "'{}'", name.replace('\\', "\\\\").replace('\'', "\\'"))
        }
    }

    fn write_operand(&self, t: &Term, wrap: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if wrap {
            f.write_str("(")?;
            self.write(t, f)?;
            f.write_str(")")
        } else {
            self.write(t, f)
        }
    }

    fn write_list(&self, t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (items, tail) = t.list_parts();
        f.write_str("[")?;
        for (i, item) in items.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            self.write(item, f)?;
        }
        if !tail.is_nil() {
            f.write_str("|")?;
            self.write(tail, f)?;
        }
        f.write_str("]")
    }
}

impl<F: Fn(Var) -> String> fmt::Display for TermWriter<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term.as_app() {
            Some(app) if self.bare && is_comparison(&app.functor) && app.args.len() == 2 => {
                self.write(&app.args[0], f)?;
                let op = &*app.functor;
                if op == "is" {
                    f.write_str(" is ")?;
                } else {
                    f.write_str(op)?;
                }
                self.write(&app.args[1], f)
            }
            _ => self.write(self.term, f),
        }
    }
}

/// Comparison and evaluation predicates handled by the engine itself.
pub fn is_comparison(name: &str) -> bool {
    matches!(name, "<" | ">" | "=<" | ">=" | "=:=" | "=\\=" | "is")
}

/// True for atoms whose predicate is a builtin.
pub fn is_builtin(atom: &Term) -> bool {
    matches!(atom.indicator(), Some((name, 2)) if is_comparison(name))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |v: Var| v.to_string();
        TermWriter::new(self, &names).fmt(f)
    }
}
