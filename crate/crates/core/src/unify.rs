//! Most general unifiers.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::term::{Substitution, Term, Var};

type Bindings = HashMap<Var, Term>;

fn walk<'a>(mut t: &'a Term, bindings: &'a Bindings) -> &'a Term {
    while let Term::Var(v) = t {
        match bindings.get(v) {
            Some(next) => t = next,
            None => break,
        }
    }
    t
}

fn occurs_in(var: Var, t: &Term, bindings: &Bindings) -> bool {
    let mut stack = vec![t];
    while let Some(t) = stack.pop() {
        match walk(t, bindings) {
            Term::Var(v) if *v == var => return true,
            Term::App(app) => stack.extend(app.args.iter()),
            _ => {}
        }
    }
    false
}

/// Computes a most general unifier of `a` and `b`.
///
/// Returns `None` when the terms do not unify. With `occurs_check` set, a
/// binding of a variable to a term containing it counts as a clash. The
/// result is idempotent whenever it is acyclic, which the occurs check
/// guarantees.
pub fn mgu(a: &Term, b: &Term, occurs_check: bool) -> Option<Substitution> {
    let mut bindings = Bindings::new();
    let mut work = vec![(a.clone(), b.clone())];
    // Without the occurs check, bindings may be cyclic; pairs of compounds
    // already being unified are assumed equal so the loop stays finite.
    let mut seen = HashSet::new();
    while let Some((x, y)) = work.pop() {
        let x = walk(&x, &bindings).clone();
        let y = walk(&y, &bindings).clone();
        match (&x, &y) {
            (Term::Var(v), Term::Var(w)) if v == w => {}
            (Term::Var(v), other) | (other, Term::Var(v)) => {
                if occurs_check && occurs_in(*v, other, &bindings) {
                    return None;
                }
                bindings.insert(*v, other.clone());
            }
            (Term::Int(m), Term::Int(n)) if m == n => {}
            (Term::App(p), Term::App(q)) => {
                if p.functor != q.functor || p.args.len() != q.args.len() {
                    return None;
                }
                if !occurs_check && !seen.insert((Arc::as_ptr(p), Arc::as_ptr(q))) {
                    continue;
                }
                work.extend(p.args.iter().cloned().zip(q.args.iter().cloned()).rev());
            }
            _ => return None,
        }
    }
    let mut sub: Substitution = bindings.into_iter().collect();
    sub.normalize();
    Some(sub)
}
