//! Reader for programs, queries and goals in a small Prolog subset.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::term::{is_builtin, is_comparison, is_symbol_char, Term, TermWriter, Var};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub positive: bool,
    pub atom: Term,
}

impl Literal {
    pub fn positive(atom: Term) -> Self {
        Literal { positive: true, atom }
    }

    pub fn negative(atom: Term) -> Self {
        Literal { positive: false, atom }
    }

    pub fn is_builtin(&self) -> bool {
        is_builtin(&self.atom)
    }

    /// Writes the literal with a caller-supplied spelling for variables.
    pub fn display_with<'a, F: Fn(Var) -> String>(&'a self, names: &'a F) -> impl fmt::Display + 'a {
        LiteralWriter { lit: self, names }
    }
}

struct LiteralWriter<'a, F: Fn(Var) -> String> {
    lit: &'a Literal,
    names: &'a F,
}

impl<F: Fn(Var) -> String> fmt::Display for LiteralWriter<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lit.positive {
            write!(f, "{}", TermWriter::new(&self.lit.atom, self.names).goal_position())
        } else {
            write!(f, "\\+{}", TermWriter::new(&self.lit.atom, self.names))
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |v: Var| v.to_string();
        let out = self.display_with(&names).fmt(f);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClauseId(pub u32);

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.0)
    }
}

/// A program clause. Its variables are numbered `0..nvars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub id: ClauseId,
    pub head: Term,
    pub body: Vec<Literal>,
    pub nvars: u32,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, lit) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{lit}")?;
        }
        f.write_str(".")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub clauses: Vec<Clause>,
    index: HashMap<(Arc<str>, usize), Vec<usize>>,
}

impl Program {
    pub fn new(clauses: Vec<Clause>) -> Self {
        let mut index: HashMap<(Arc<str>, usize), Vec<usize>> = HashMap::new();
        for (i, c) in clauses.iter().enumerate() {
            if let Some(app) = c.head.as_app() {
                index.entry((app.functor.clone(), app.args.len())).or_default().push(i);
            }
        }
        Program { clauses, index }
    }

    /// Indices of clauses whose head has the atom's predicate, in source order.
    pub fn candidates(&self, atom: &Term) -> &[usize] {
        match atom.as_app() {
            Some(app) => self.index.get(&(app.functor.clone(), app.args.len())).map_or(&[], Vec::as_slice),
            None => &[],
        }
    }

    pub fn clause(&self, id: ClauseId) -> Option<&Clause> {
        self.clauses.get((id.0 as usize).checked_sub(1)?)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(text)?;
    let mut clauses = Vec::new();
    while !p.at_end() {
        let id = ClauseId(clauses.len() as u32 + 1);
        clauses.push(p.clause(id)?);
    }
    Ok(Program::new(clauses))
}

/// Parses a top goal: a single positive atom, optionally followed by `.`.
pub fn parse_query(text: &str) -> Result<Literal, ParseError> {
    let mut p = Parser::new(text)?;
    let start = p.peek_pos();
    let lit = p.literal()?;
    if !lit.positive || p.check(&Tok::Comma) {
        return Err(ParseError {
            line: start.0,
            column: start.1,
            message: "a query must be a single positive atom".into(),
        });
    }
    p.eat(&Tok::Dot);
    p.expect_end()?;
    Ok(lit)
}

/// Parses a conjunction of literals sharing one variable scope.
pub fn parse_goal(text: &str) -> Result<Vec<Literal>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut lits = vec![p.literal()?];
    while p.eat(&Tok::Comma) {
        lits.push(p.literal()?);
    }
    p.eat(&Tok::Dot);
    p.expect_end()?;
    Ok(lits)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Var(String),
    Name(String),
    Quoted(String),
    Int(i64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Bar,
    Comma,
    Dot,
    Neck,
    Not,
    Op(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Var(s) | Tok::Name(s) => write!(f, "`{s}`"),
            Tok::Quoted(s) => write!(f, "`'{s}'`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Neck => f.write_str("`:-`"),
            Tok::Not => f.write_str("`\\+`"),
            Tok::Op(op) => write!(f, "`{op}`"),
        }
    }
}

const PUNCT: &[(&str, Option<Tok>)] = &[
    (":-", Some(Tok::Neck)),
    ("\\+", Some(Tok::Not)),
    ("=:=", None),
    ("=\\=", None),
    ("=<", None),
    (">=", None),
    ("//", None),
    ("<", None),
    (">", None),
    ("+", None),
    ("-", None),
    ("*", None),
    ("(", Some(Tok::LParen)),
    (")", Some(Tok::RParen)),
    ("[", Some(Tok::LBracket)),
    ("]", Some(Tok::RBracket)),
    ("|", Some(Tok::Bar)),
    (",", Some(Tok::Comma)),
    (".", Some(Tok::Dot)),
];

struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, column, message: String| ParseError { line, column, message };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        let begin = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[begin..i].iter().collect();
            let n = digits.parse().map_err(|_| err(line, col, format!("integer literal {digits} out of range")))?;
            Tok::Int(n)
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && is_symbol_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[begin..i].iter().collect();
            if c.is_ascii_uppercase() || c == '_' {
                Tok::Var(word)
            } else {
                Tok::Name(word)
            }
        } else if c == '\'' {
            i += 1;
            let mut name = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(err(line, col, "unterminated quoted atom".into())),
                    Some('\'') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        match chars.get(i + 1) {
                            Some(&e @ ('\\' | '\'')) => name.push(e),
                            _ => return Err(err(line, col + (i - begin), "bad escape in quoted atom".into())),
                        }
                        i += 2;
                    }
                    Some(&ch) => {
                        name.push(ch);
                        i += 1;
                    }
                }
            }
            Tok::Quoted(name)
        } else {
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let Some((text, tok)) = PUNCT.iter().find(|(p, _)| rest.starts_with(p)) else {
                return Err(err(line, col, format!("unexpected character `{c}`")));
            };
            i += text.chars().count();
            tok.clone().unwrap_or(Tok::Op(text))
        };
        col += i - begin;
        out.push(Token { tok, line: start_line, column: start_col });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    end: (usize, usize),
    vars: HashMap<String, Var>,
    next_var: u32,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        let toks = tokenize(text)?;
        let line = text.lines().count().max(1);
        let column = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
        Ok(Parser { toks, at: 0, end: (line, column), vars: HashMap::new(), next_var: 0 })
    }

    fn at_end(&self) -> bool {
        self.at >= self.toks.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    fn peek_pos(&self) -> (usize, usize) {
        self.toks.get(self.at).map_or(self.end, |t| (t.line, t.column))
    }

    fn check(&self, tok: &Tok) -> bool {
        self.peek() == Some(tok)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.check(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, column) = self.peek_pos();
        Err(ParseError { line, column, message: message.into() })
    }

    fn found(&self) -> String {
        self.peek().map_or("end of input".to_string(), |t| t.to_string())
    }

    fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.error(format!("expected {tok}, found {}", self.found()))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            self.error(format!("unexpected {} after the end of the goal", self.found()))
        }
    }

    fn clause(&mut self, id: ClauseId) -> Result<Clause, ParseError> {
        self.vars.clear();
        self.next_var = 0;
        let head_pos = self.peek_pos();
        let head_lit = self.literal()?;
        let head_err = |message: &str| ParseError { line: head_pos.0, column: head_pos.1, message: message.into() };
        if !head_lit.positive {
            return Err(head_err("a clause head must be a positive atom"));
        }
        let head = head_lit.atom;
        if head.as_app().is_none() {
            return Err(head_err("a clause head must be an atom"));
        }
        if is_builtin(&head) {
            return Err(head_err(&format!(
                "builtin predicate {}/2 cannot be defined",
                head.functor().unwrap_or_default()
            )));
        }
        let mut body = Vec::new();
        if self.eat(&Tok::Neck) {
            body.push(self.literal()?);
            while self.eat(&Tok::Comma) {
                body.push(self.literal()?);
            }
        }
        if !self.eat(&Tok::Dot) {
            return self.error(format!("expected `,` or `.`, found {}", self.found()));
        }
        Ok(Clause { id, head, body, nvars: self.next_var })
    }

    /// `not(...)` with exactly one argument.
    fn is_not_call(&self) -> bool {
        let mut depth = 0usize;
        let mut commas = 0;
        for t in &self.toks[self.at + 1..] {
            match t.tok {
                Tok::LParen | Tok::LBracket => depth += 1,
                Tok::RParen | Tok::RBracket => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                Tok::Comma if depth == 1 => commas += 1,
                _ => {}
            }
        }
        commas == 0
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        if self.eat(&Tok::Not) {
            let atom = self.goal_term()?;
            return Ok(Literal::negative(atom));
        }
        if self.check(&Tok::Name("not".into()))
            && self.toks.get(self.at + 1).is_some_and(|t| t.tok == Tok::LParen)
            && self.is_not_call()
        {
            self.at += 2;
            let atom = self.goal_term()?;
            self.expect(&Tok::RParen)?;
            return Ok(Literal::negative(atom));
        }
        Ok(Literal::positive(self.goal_term()?))
    }

    /// A callable term, possibly an infix comparison.
    fn goal_term(&mut self) -> Result<Term, ParseError> {
        let pos = self.peek_pos();
        let t = self.comparison()?;
        match t {
            Term::App(_) => Ok(t),
            _ => Err(ParseError { line: pos.0, column: pos.1, message: format!("expected an atom, found {t}") }),
        }
    }

    fn comparison_op(&self) -> Option<&'static str> {
        match self.peek()? {
            Tok::Op(op) if is_comparison(op) => Some(op),
            Tok::Name(n) if n == "is" => Some("is"),
            _ => None,
        }
    }

    fn comparison(&mut self) -> Result<Term, ParseError> {
        let left = self.expr()?;
        match self.comparison_op() {
            Some(op) => {
                self.at += 1;
                let right = self.expr()?;
                Ok(Term::app(op, vec![left, right]))
            }
            None => Ok(left),
        }
    }

    fn expr(&mut self) -> Result<Term, ParseError> {
        let mut left = self.product()?;
        while let Some(Tok::Op(op @ ("+" | "-"))) = self.peek() {
            let op = *op;
            self.at += 1;
            let right = self.product()?;
            left = Term::app(op, vec![left, right]);
        }
        Ok(left)
    }

    fn product(&mut self) -> Result<Term, ParseError> {
        let mut left = self.primary()?;
        while let Some(Tok::Op(op @ ("*" | "//"))) = self.peek() {
            let op = *op;
            self.at += 1;
            let right = self.primary()?;
            left = Term::app(op, vec![left, right]);
        }
        Ok(left)
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return self.error("unexpected end of input");
        };
        match tok {
            Tok::Var(name) => {
                self.at += 1;
                Ok(Term::Var(self.variable(&name)))
            }
            Tok::Int(n) => {
                self.at += 1;
                Ok(Term::Int(n))
            }
            Tok::Op("-") if matches!(self.toks.get(self.at + 1), Some(Token { tok: Tok::Int(_), .. })) => {
                self.at += 1;
                let Some(Tok::Int(n)) = self.peek().cloned() else { unreachable!() };
                self.at += 1;
                Ok(Term::Int(-n))
            }
            Tok::Name(name) | Tok::Quoted(name) => {
                self.at += 1;
                let args = if self.eat(&Tok::LParen) {
                    let args = self.arguments()?;
                    self.expect(&Tok::RParen)?;
                    args
                } else {
                    Vec::new()
                };
                Ok(Term::app(&name, args))
            }
            Tok::LBracket => {
                self.at += 1;
                if self.eat(&Tok::RBracket) {
                    return Ok(Term::nil());
                }
                let items = self.arguments()?;
                let tail = if self.eat(&Tok::Bar) { self.comparison()? } else { Term::nil() };
                self.expect(&Tok::RBracket)?;
                Ok(Term::list(items, tail))
            }
            Tok::LParen => {
                self.at += 1;
                let t = self.comparison()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            other => self.error(format!("expected a term, found {other}")),
        }
    }

    fn arguments(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = vec![self.comparison()?];
        while self.eat(&Tok::Comma) {
            args.push(self.comparison()?);
        }
        Ok(args)
    }

    fn variable(&mut self, name: &str) -> Var {
        if name == "_" {
            let v = Var(self.next_var);
            self.next_var += 1;
            return v;
        }
        if let Some(v) = self.vars.get(name) {
            return *v;
        }
        let v = Var(self.next_var);
        self.next_var += 1;
        self.vars.insert(name.to_string(), v);
        v
    }
}
