//! Brute-force reference for the expanded-variant relation.
//!
//! Enumerates every injective renaming of the larger term's variables into
//! the smaller term's variables plus fresh ones, applies it, and checks
//! whether the renamed term equals the smaller one up to growth: at every
//! position either both sides agree on the symbol and recurse, or the
//! smaller side's subterm is found strictly inside the larger side's
//! compound (recursively, with the same rule). No backtracking state is
//! shared between choices.

use std::collections::HashMap;

use termcheck_core::{Term, Var};

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Subterm,
    DirectArg,
}

pub fn ev_oracle(a_prime: &Term, a: &Term, rule: Rule) -> bool {
    let big_vars = a_prime.vars();
    let small_vars = a.vars();
    assert!(big_vars.len() <= 8 && a.size() <= 64 && a_prime.size() <= 64, "oracle bounds");
    let fresh_base = a_prime.max_var().into_iter().chain(a.max_var()).max().map_or(0, |m| m + 1);
    let mut targets: Vec<Var> = small_vars.clone();
    for i in 0..big_vars.len() as u32 {
        targets.push(Var(fresh_base + i));
    }
    let mut assignment = Vec::new();
    let mut used = vec![false; targets.len()];
    enumerate(&big_vars, &targets, &mut assignment, &mut used, &mut |renaming| {
        let b = a_prime.rename(renaming);
        grows_from(&b, a, true, rule)
    })
}

fn enumerate(
    vars: &[Var],
    targets: &[Var],
    assignment: &mut Vec<Var>,
    used: &mut [bool],
    found: &mut dyn FnMut(&HashMap<Var, Var>) -> bool,
) -> bool {
    if assignment.len() == vars.len() {
        let m: HashMap<Var, Var> = vars.iter().copied().zip(assignment.iter().copied()).collect();
        return found(&m);
    }
    for (i, t) in targets.iter().enumerate() {
        if used[i] {
            continue;
        }
        used[i] = true;
        assignment.push(*t);
        if enumerate(vars, targets, assignment, used, found) {
            return true;
        }
        assignment.pop();
        used[i] = false;
    }
    false
}

/// `b` equals `a` except where `a`'s subterms grew into compounds of `b`.
fn grows_from(b: &Term, a: &Term, root: bool, rule: Rule) -> bool {
    if same_head(b, a) && b.args().iter().zip(a.args()).all(|(x, y)| grows_from(x, y, false, rule)) {
        return true;
    }
    if root {
        return false;
    }
    // growth: a occurs strictly inside b
    b.args().iter().any(|arg| match rule {
        Rule::Subterm => grows_from(arg, a, false, rule),
        Rule::DirectArg => arg == a,
    })
}

fn same_head(b: &Term, a: &Term) -> bool {
    match (b, a) {
        (Term::Var(x), Term::Var(y)) => x == y,
        (Term::Int(m), Term::Int(n)) => m == n,
        (Term::App(p), Term::App(q)) => p.functor == q.functor && p.args.len() == q.args.len(),
        _ => false,
    }
}
