//! Shared proptest strategies.

use std::collections::HashMap;

use proptest::prelude::*;
use termcheck_core::{Term, Var};

pub fn leaf(max_var: u32) -> impl Strategy<Value = Term> {
    prop_oneof![
        (0..max_var).prop_map(Term::var),
        Just(Term::atom("a")),
        Just(Term::atom("b")),
        (0i64..2).prop_map(Term::int),
    ]
}

pub fn term(max_var: u32) -> impl Strategy<Value = Term> {
    leaf(max_var).prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("f", vec![t])),
            (inner.clone(), inner).prop_map(|(x, y)| Term::app("g", vec![x, y])),
        ]
    })
}

pub fn atom(max_var: u32) -> impl Strategy<Value = Term> {
    prop::collection::vec(term(max_var), 1..=3).prop_map(|args| Term::app("p", args))
}

/// Wraps randomly chosen argument subterms of `t` in `f(_)` or `g(b, _)`.
pub fn grow(t: &Term, choices: &mut impl Iterator<Item = u8>, root: bool) -> Term {
    let inner = match t {
        Term::App(app) => Term::app(&app.functor, app.args.iter().map(|a| grow(a, choices, false)).collect()),
        other => other.clone(),
    };
    if root {
        return inner;
    }
    match choices.next().unwrap_or(0) % 4 {
        1 => Term::app("f", vec![inner]),
        2 => Term::app("g", vec![Term::atom("b"), inner]),
        _ => inner,
    }
}

/// Renames the variables of `t` injectively by a shifted permutation.
pub fn permute(t: &Term, shift: u32) -> Term {
    let m: HashMap<Var, Var> = t.vars().into_iter().map(|v| (v, Var((v.0 + shift) % 4 + 10))).collect();
    t.rename(&m)
}

/// Pairs where the larger term is built from the smaller one, so the
/// relation holds often enough to exercise both outcomes.
pub fn related_pair() -> impl Strategy<Value = (Term, Term)> {
    (atom(4), prop::collection::vec(any::<u8>(), 16), 0u32..4).prop_map(|(a, choices, shift)| {
        let big = grow(&a, &mut choices.into_iter(), true);
        (permute(&big, shift), a)
    })
}

pub fn pair() -> impl Strategy<Value = (Term, Term)> {
    prop_oneof![related_pair(), (atom(4), atom(4))]
}

/// Three atoms, each grown from the previous one.
pub fn growth_chain() -> impl Strategy<Value = (Term, Term, Term)> {
    (atom(3), prop::collection::vec(any::<u8>(), 16), prop::collection::vec(any::<u8>(), 16)).prop_map(|(a, c1, c2)| {
        let b = grow(&a, &mut c1.into_iter(), true);
        let c = grow(&b, &mut c2.into_iter(), true);
        (a, b, c)
    })
}

// Random programs over p/1, q/1, r/1 with constants, f/1 and ground negation.

fn arg() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["X", "a", "b", "f(X)", "f(f(X))", "Y"])
}

fn pred() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["p", "q", "r"])
}

fn literal() -> impl Strategy<Value = String> {
    prop_oneof![
        3 => (pred(), arg()).prop_map(|(p, a)| format!("{p}({a})")),
        1 => (pred(), prop::sample::select(vec!["a", "b", "f(a)"])).prop_map(|(p, a)| format!("\\+ {p}({a})")),
    ]
}

fn clause() -> impl Strategy<Value = String> {
    ((pred(), arg()), prop::collection::vec(literal(), 0..=2)).prop_map(|((p, a), body)| {
        if body.is_empty() {
            format!("{p}({a}).")
        } else {
            format!("{p}({a}) :- {}.", body.join(", "))
        }
    })
}

pub fn program() -> impl Strategy<Value = String> {
    prop::collection::vec(clause(), 1..=5).prop_map(|cs| cs.join("\n"))
}

pub const PROGRAM_QUERIES: [&str; 4] = ["p(a)", "q(X)", "r(f(b))", "p(Y)"];
