//! λ-TRSs: scope symbols with defining rules `@(f(x1..xk), y) -> F[x1..xk, y]`,
//! lambda-lifting, and the expansion into λ-term representations.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::expand::{expand_with, Selection};
use crate::lambda::{Kind, Name, Term};
use crate::losim::LosimTerm;
use crate::lrep::{self, Rep};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(s: &str) -> Symbol {
        Symbol(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtrsError {
    #[error("unknown scope symbol `{0}`")]
    UnknownSymbol(Symbol),
    #[error("scope symbol `{symbol}` has arity {expected}, used with {found} arguments")]
    ArityMismatch {
        symbol: Symbol,
        expected: usize,
        found: usize,
    },
    #[error("scope symbol `{0}` is defined twice")]
    DuplicateSymbol(Symbol),
    #[error("hole {hole} out of range in the context of `{symbol}`")]
    HoleOutOfRange { symbol: Symbol, hole: u32 },
    #[error("term is not closed (free variable `{0}`)")]
    NotClosed(Name),
    #[error("the λ-TRS is not finitely nested (cycle through `{0}`)")]
    NotFinitelyNested(Symbol),
    #[error("the λ-TRS has no scope symbols")]
    EmptySignature,
    #[error("expansion exceeded the budget of {limit} nodes")]
    ExpansionBudgetExceeded { limit: usize },
    #[error("syntax error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

/// A first-order context over `@`, scope symbols and variable constants,
/// with numbered holes `□1..□m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ctx {
    /// 1-based.
    Hole(u32),
    Var(u32),
    App(Box<Ctx>, Box<Ctx>),
    Scope(Symbol, Vec<Ctx>),
}

impl Ctx {
    pub fn app(f: Ctx, a: Ctx) -> Ctx {
        Ctx::App(Box::new(f), Box::new(a))
    }

    /// Fills `□1..□k` with `args` and `□k+1` with `last`.
    pub fn instantiate(&self, args: &[LosimTerm], last: &LosimTerm) -> LosimTerm {
        self.fill(&|h| {
            let h = h as usize;
            if h <= args.len() {
                args[h - 1].clone()
            } else {
                last.clone()
            }
        })
    }

    /// Fills hole `h` with `fill(h)`.
    pub fn fill(&self, fill: &dyn Fn(u32) -> LosimTerm) -> LosimTerm {
        match self {
            Ctx::Hole(h) => fill(*h),
            Ctx::Var(j) => LosimTerm::var(*j),
            Ctx::App(a, b) => LosimTerm::app(a.fill(fill), b.fill(fill)),
            Ctx::Scope(g, cs) => LosimTerm::scope(g.clone(), cs.iter().map(|c| c.fill(fill)).collect()),
        }
    }

    /// Scope symbols occurring in the context, in first-occurrence order.
    pub fn symbols(&self) -> Vec<Symbol> {
        fn go(c: &Ctx, out: &mut Vec<Symbol>) {
            match c {
                Ctx::Hole(_) | Ctx::Var(_) => {}
                Ctx::App(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Ctx::Scope(g, cs) => {
                    if !out.contains(g) {
                        out.push(g.clone());
                    }
                    cs.iter().for_each(|c| go(c, out));
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn max_hole(&self) -> u32 {
        match self {
            Ctx::Hole(h) => *h,
            Ctx::Var(_) => 0,
            Ctx::App(a, b) => a.max_hole().max(b.max_hole()),
            Ctx::Scope(_, cs) => cs.iter().map(Ctx::max_hole).max().unwrap_or(0),
        }
    }

    fn has_var_constants(&self) -> bool {
        match self {
            Ctx::Var(_) => true,
            Ctx::Hole(_) => false,
            Ctx::App(a, b) => a.has_var_constants() || b.has_var_constants(),
            Ctx::Scope(_, cs) => cs.iter().any(Ctx::has_var_constants),
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, names: &[String]) -> fmt::Result {
        match self {
            Ctx::Hole(h) => f.write_str(&names[*h as usize - 1]),
            Ctx::Var(j) => write!(f, "x{j}"),
            Ctx::App(a, b) => {
                f.write_str("@(")?;
                a.write(f, names)?;
                f.write_str(",")?;
                b.write(f, names)?;
                f.write_str(")")
            }
            Ctx::Scope(g, cs) => {
                write!(f, "{g}")?;
                if !cs.is_empty() {
                    f.write_str("(")?;
                    for (k, c) in cs.iter().enumerate() {
                        if k > 0 {
                            f.write_str(",")?;
                        }
                        c.write(f, names)?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// Arity `k` and scope context `F` (with `k + 1` holes) of a scope symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScopeDef {
    pub arity: usize,
    pub ctx: Ctx,
}

/// A λ-TRS, given by the defining rules of its scope symbols in
/// declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LTrs {
    scopes: IndexMap<Symbol, ScopeDef>,
}

impl LTrs {
    pub fn new() -> LTrs {
        LTrs::default()
    }

    /// Adds the rule `@(f(x1..xk), y) -> ctx`. Symbols used in `ctx` are
    /// checked by [`LTrs::validate`], so rules may be added in any order.
    pub fn insert(&mut self, f: Symbol, arity: usize, ctx: Ctx) -> Result<(), LtrsError> {
        if self.scopes.contains_key(&f) {
            return Err(LtrsError::DuplicateSymbol(f));
        }
        let m = ctx.max_hole();
        if m as usize > arity + 1 || contains_hole_zero(&ctx) {
            return Err(LtrsError::HoleOutOfRange { symbol: f, hole: m });
        }
        self.scopes.insert(f, ScopeDef { arity, ctx });
        Ok(())
    }

    pub fn get(&self, f: &Symbol) -> Option<&ScopeDef> {
        self.scopes.get(f)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.scopes.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &ScopeDef)> {
        self.scopes.iter()
    }

    pub fn len(&self) -> usize {
        self.scopes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scopes.is_empty()
    }

    /// Every symbol used in a context is declared, with matching arity.
    pub fn validate(&self) -> Result<(), LtrsError> {
        for def in self.scopes.values() {
            check_ctx(self, &def.ctx)?;
        }
        Ok(())
    }

    /// Scope symbols of `t` are declared with matching arity.
    pub fn check_term(&self, t: &LTrsTerm) -> Result<(), LtrsError> {
        match t {
            LTrsTerm::Var(_) => Ok(()),
            LTrsTerm::App(a, b) => {
                self.check_term(a)?;
                self.check_term(b)
            }
            LTrsTerm::Scope(f, args) => {
                self.check_arity(f, args.len())?;
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    fn check_arity(&self, f: &Symbol, found: usize) -> Result<(), LtrsError> {
        let def = self.get(f).ok_or_else(|| LtrsError::UnknownSymbol(f.clone()))?;
        if def.arity != found {
            return Err(LtrsError::ArityMismatch {
                symbol: f.clone(),
                expected: def.arity,
                found,
            });
        }
        Ok(())
    }

    /// SHA-256 of the textual form, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn contains_hole_zero(c: &Ctx) -> bool {
    match c {
        Ctx::Hole(h) => *h == 0,
        Ctx::Var(_) => false,
        Ctx::App(a, b) => contains_hole_zero(a) || contains_hole_zero(b),
        Ctx::Scope(_, cs) => cs.iter().any(contains_hole_zero),
    }
}

fn check_ctx(l: &LTrs, c: &Ctx) -> Result<(), LtrsError> {
    match c {
        Ctx::Hole(_) | Ctx::Var(_) => Ok(()),
        Ctx::App(a, b) => {
            check_ctx(l, a)?;
            check_ctx(l, b)
        }
        Ctx::Scope(g, cs) => {
            l.check_arity(g, cs.len())?;
            cs.iter().try_for_each(|c| check_ctx(l, c))
        }
    }
}

/// Term over `@`, scope symbols and variable constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LTrsTerm {
    Var(u32),
    App(Box<LTrsTerm>, Box<LTrsTerm>),
    Scope(Symbol, Vec<LTrsTerm>),
}

impl LTrsTerm {
    pub fn app(f: LTrsTerm, a: LTrsTerm) -> LTrsTerm {
        LTrsTerm::App(Box::new(f), Box::new(a))
    }

    pub fn scope(f: &str, args: Vec<LTrsTerm>) -> LTrsTerm {
        LTrsTerm::Scope(Symbol::new(f), args)
    }

    pub fn is_closed(&self) -> bool {
        match self {
            LTrsTerm::Var(_) => false,
            LTrsTerm::App(a, b) => a.is_closed() && b.is_closed(),
            LTrsTerm::Scope(_, args) => args.iter().all(LTrsTerm::is_closed),
        }
    }
}

impl fmt::Display for LTrsTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", LosimTerm::from(self))
    }
}

impl FromStr for LTrsTerm {
    type Err = LtrsError;

    /// `x3`, `@(s,t)`, `f(s1,...,sk)`, `g` or `g()`.
    fn from_str(text: &str) -> Result<Self, LtrsError> {
        let mut p = TextParser::new(text, 1)?;
        let c = p.term(&[])?;
        p.expect_end()?;
        ctx_to_term(&c)
    }
}

fn ctx_to_term(c: &Ctx) -> Result<LTrsTerm, LtrsError> {
    Ok(match c {
        Ctx::Var(j) => LTrsTerm::Var(*j),
        Ctx::Hole(_) => unreachable!("start terms have no holes"),
        Ctx::App(a, b) => LTrsTerm::app(ctx_to_term(a)?, ctx_to_term(b)?),
        Ctx::Scope(g, cs) => LTrsTerm::Scope(g.clone(), cs.iter().map(ctx_to_term).collect::<Result<_, _>>()?),
    })
}

/// One rule per line: `@(f(x1,...,xk), y) -> rhs` (`@(f, y)` for nullary
/// symbols). Right-hand sides use the left-hand variable names for holes.
impl fmt::Display for LTrs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (sym, def) in &self.scopes {
            let (param, bound) = if def.ctx.has_var_constants() {
                ("v", "w")
            } else {
                ("x", "y")
            };
            let mut names: Vec<String> = (1..=def.arity).map(|i| format!("{param}{i}")).collect();
            names.push(bound.to_string());
            write!(f, "@({sym}")?;
            if def.arity > 0 {
                write!(f, "({})", names[..def.arity].join(","))?;
            }
            write!(f, ", {bound}) -> ")?;
            def.ctx.write(f, &names)?;
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for LTrs {
    type Err = LtrsError;

    /// Blank lines and `#` comments are ignored.
    fn from_str(text: &str) -> Result<Self, LtrsError> {
        let mut l = LTrs::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let mut p = TextParser::new(line, n + 1)?;
            let (f, params, bound) = p.lhs()?;
            p.expect(&Tok::Arrow)?;
            let mut names = params.clone();
            names.push(bound);
            let ctx = p.term(&names)?;
            p.expect_end()?;
            l.insert(f, params.len(), ctx).map_err(|e| match e {
                LtrsError::DuplicateSymbol(_) | LtrsError::HoleOutOfRange { .. } => LtrsError::Parse {
                    line: n + 1,
                    column: 1,
                    message: e.to_string(),
                },
                e => e,
            })?;
        }
        l.validate()?;
        Ok(l)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    At,
    LParen,
    RParen,
    Comma,
    Arrow,
    End,
}

struct TextParser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl TextParser {
    fn new(text: &str, first_line: usize) -> Result<Self, LtrsError> {
        let mut toks = Vec::new();
        let (mut line, mut col) = (first_line, 0);
        let mut chars = text.chars().peekable();
        while let Some(c) = chars.next() {
            col += 1;
            let at = (line, col);
            let tok = match c {
                '\n' => {
                    line += 1;
                    col = 0;
                    continue;
                }
                c if c.is_whitespace() => continue,
                '@' => Tok::At,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '-' if chars.peek() == Some(&'>') => {
                    chars.next();
                    col += 1;
                    Tok::Arrow
                }
                c if c.is_alphanumeric() || c == '_' => {
                    let mut s = c.to_string();
                    while let Some(&d) = chars.peek() {
                        if d.is_alphanumeric() || d == '_' || d == '\'' {
                            s.push(d);
                            col += 1;
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    Tok::Ident(s)
                }
                other => {
                    return Err(LtrsError::Parse {
                        line: at.0,
                        column: at.1,
                        message: format!("unexpected character {other:?}"),
                    })
                }
            };
            toks.push((tok, at.0, at.1));
        }
        toks.push((Tok::End, line, col + 1));
        Ok(TextParser { toks, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> LtrsError {
        let (_, line, column) = self.toks[self.pos];
        LtrsError::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), LtrsError> {
        if self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {t:?}, found {:?}", self.peek())))
        }
    }

    fn expect_end(&mut self) -> Result<(), LtrsError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error("trailing input"))
        }
    }

    fn ident(&mut self) -> Result<String, LtrsError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected an identifier, found {other:?}"))),
        }
    }

    /// `@(f(x1,...,xk), y)`
    fn lhs(&mut self) -> Result<(Symbol, Vec<String>, String), LtrsError> {
        self.expect(&Tok::At)?;
        self.expect(&Tok::LParen)?;
        let f = Symbol::new(&self.ident()?);
        let mut params = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            if *self.peek() != Tok::RParen {
                loop {
                    params.push(self.ident()?);
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect(&Tok::RParen)?;
        }
        self.expect(&Tok::Comma)?;
        let y = self.ident()?;
        self.expect(&Tok::RParen)?;
        let mut all = params.clone();
        all.push(y.clone());
        for (k, v) in all.iter().enumerate() {
            if all[..k].contains(v) {
                return Err(self.error(format!("variable `{v}` occurs twice on the left-hand side")));
            }
        }
        Ok((f, params, y))
    }

    fn term(&mut self, holes: &[String]) -> Result<Ctx, LtrsError> {
        match self.peek().clone() {
            Tok::At => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let a = self.term(holes)?;
                self.expect(&Tok::Comma)?;
                let b = self.term(holes)?;
                self.expect(&Tok::RParen)?;
                Ok(Ctx::app(a, b))
            }
            Tok::Ident(s) => {
                self.bump();
                if let Some(k) = holes.iter().position(|h| *h == s) {
                    return Ok(Ctx::Hole(k as u32 + 1));
                }
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        loop {
                            args.push(self.term(holes)?);
                            if *self.peek() == Tok::Comma {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(&Tok::RParen)?;
                    return Ok(Ctx::Scope(Symbol::new(&s), args));
                }
                if let Some(j) = lrep::var_index(&Name::new(&s)) {
                    return Ok(Ctx::Var(j));
                }
                Ok(Ctx::Scope(Symbol::new(&s), Vec::new()))
            }
            other => Err(self.error(format!("unexpected token {other:?}"))),
        }
    }
}

/// Scope symbols occurring in the context of `f`.
pub fn depends_on(l: &LTrs, f: &Symbol) -> Result<BTreeSet<Symbol>, LtrsError> {
    let def = l.get(f).ok_or_else(|| LtrsError::UnknownSymbol(f.clone()))?;
    Ok(def.ctx.symbols().into_iter().collect())
}

/// Whether the depends-on graph is acyclic (no infinite nesting chain).
/// Undeclared symbols count as leaves.
pub fn finitely_nested(l: &LTrs) -> bool {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    fn visit(l: &LTrs, f: &Symbol, marks: &mut HashMap<Symbol, Mark>) -> bool {
        match marks.get(f) {
            Some(Mark::Done) => return true,
            Some(Mark::Active) => return false,
            None => {}
        }
        let Some(def) = l.get(f) else { return true };
        marks.insert(f.clone(), Mark::Active);
        for g in def.ctx.symbols() {
            if !visit(l, &g, marks) {
                return false;
            }
        }
        marks.insert(f.clone(), Mark::Done);
        true
    }
    let mut marks = HashMap::new();
    l.symbols().all(|f| visit(l, f, &mut marks))
}

/// Lambda-lifting of a closed λ-term: one scope symbol `f0, f1, ...` per
/// abstraction occurrence (numbered in pre-order), whose parameters are the
/// abstraction's free variables in order of first occurrence.
pub fn lambda_lift(m: &Term) -> Result<(LTrs, LTrsTerm), LtrsError> {
    if let Some(x) = m.free_vars().first() {
        return Err(LtrsError::NotClosed(x.clone()));
    }
    let mut lifter = Lifter { l: LTrs::new(), next: 0 };
    let s = lifter.top(m);
    Ok((lifter.l, s))
}

struct Lifter {
    l: LTrs,
    next: usize,
}

impl Lifter {
    fn top(&mut self, t: &Term) -> LTrsTerm {
        match t.kind() {
            Kind::Var(_) => unreachable!("closed terms have no free variables"),
            Kind::App(a, b) => LTrsTerm::app(self.top(a), self.top(b)),
            Kind::Abs(..) => LTrsTerm::Scope(self.lift(t).0, Vec::new()),
        }
    }

    /// Defines the scope symbol of the abstraction `t`; returns it with its
    /// parameters.
    fn lift(&mut self, t: &Term) -> (Symbol, Vec<Name>) {
        let Kind::Abs(x, body) = t.kind() else {
            unreachable!("only abstractions are lifted")
        };
        let f = Symbol::new(&format!("f{}", self.next));
        self.next += 1;
        let params = t.free_vars_in_order();
        // reserve the slot so symbols are listed in pre-order
        self.l.scopes.insert(
            f.clone(),
            ScopeDef {
                arity: params.len(),
                ctx: Ctx::Hole(1),
            },
        );
        let mut env: HashMap<Name, u32> =
            params.iter().enumerate().map(|(k, v)| (v.clone(), k as u32 + 1)).collect();
        env.insert(x.clone(), params.len() as u32 + 1);
        let ctx = self.body(body, &env);
        self.l.scopes[&f].ctx = ctx;
        (f, params)
    }

    fn body(&mut self, t: &Term, env: &HashMap<Name, u32>) -> Ctx {
        match t.kind() {
            Kind::Var(v) => Ctx::Hole(env[v]),
            Kind::App(a, b) => Ctx::app(self.body(a, env), self.body(b, env)),
            Kind::Abs(..) => {
                let (g, params) = self.lift(t);
                Ctx::Scope(g, params.iter().map(|v| Ctx::Hole(env[v])).collect())
            }
        }
    }
}

/// `⟦s⟧_L`: normal form of `exp_0(s)` in the expansion TRS.
pub fn expand(l: &LTrs, s: &LTrsTerm, max_nodes: usize) -> Result<Rep, LtrsError> {
    l.check_term(s)?;
    expand_with(l, &s.into(), max_nodes, Selection::Outermost)
}

/// The λ-term denoted by `s`.
pub fn denote_ltrs(l: &LTrs, s: &LTrsTerm, max_nodes: usize) -> Result<Term, LtrsError> {
    Ok(lrep::denote(&expand(l, s, max_nodes)?))
}

/// The four-symbol λ-TRS whose term `f(g,h)` denotes
/// `\x.(\y.y)((\z.\w.w z) x)`.
pub fn example_ltrs() -> (LTrs, LTrsTerm) {
    let l: LTrs = EXAMPLE_LTRS.parse().expect("fixture parses");
    let s: LTrsTerm = "f(g,h)".parse().expect("fixture parses");
    (l, s)
}

pub const EXAMPLE_LTRS: &str = "\
@(f(x1,x2), y) -> @(x1,@(x2,y))
@(g, y) -> y
@(h, y) -> i(y)
@(i(x1), y) -> @(y,x1)
";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_lambda;
    use crate::DEFAULT_MAX_NODES;

    fn sym(s: &str) -> Symbol {
        Symbol::new(s)
    }

    fn p(s: &str) -> Term {
        parse_lambda(s).unwrap()
    }

    #[test]
    fn example_dependencies() {
        let (l, _) = example_ltrs();
        assert_eq!(depends_on(&l, &sym("h")).unwrap(), BTreeSet::from([sym("i")]));
        assert!(depends_on(&l, &sym("f")).unwrap().is_empty());
        assert!(depends_on(&l, &sym("g")).unwrap().is_empty());
        assert_eq!(
            depends_on(&l, &sym("nope")),
            Err(LtrsError::UnknownSymbol(sym("nope")))
        );
        assert!(finitely_nested(&l));
    }

    #[test]
    fn cycles_are_not_finitely_nested() {
        let self_loop: LTrs = "@(f, y) -> f".parse().unwrap();
        assert!(!finitely_nested(&self_loop));
        let two: LTrs = "@(f, y) -> @(g, y)\n@(g, y) -> f()".parse().unwrap();
        assert!(!finitely_nested(&two));
    }

    #[test]
    fn example_expansion() {
        let (l, s) = example_ltrs();
        let r = expand(&l, &s, DEFAULT_MAX_NODES).unwrap();
        assert_eq!(r.to_string(), "\\x0. ((\\x1. x1) ((\\x1. \\x2. (x2 x1)) x0))");
        assert_eq!(denote_ltrs(&l, &s, DEFAULT_MAX_NODES).unwrap(), p("\\x.(\\y.y)((\\z.\\w.w z) x)"));
    }

    #[test]
    fn variable_expands_to_itself() {
        let (l, _) = example_ltrs();
        assert_eq!(expand(&l, &LTrsTerm::Var(5), 100).unwrap(), Rep::Var(5));
    }

    #[test]
    fn divergent_expansion_hits_budget() {
        let l: LTrs = "@(f, y) -> f".parse().unwrap();
        assert_eq!(
            expand(&l, &LTrsTerm::scope("f", vec![]), 1000),
            Err(LtrsError::ExpansionBudgetExceeded { limit: 1000 })
        );
    }

    #[test]
    fn lift_identity() {
        let (l, s) = lambda_lift(&p("\\x.x")).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l.get(&sym("f0")).unwrap(), &ScopeDef { arity: 0, ctx: Ctx::Hole(1) });
        assert_eq!(s, LTrsTerm::scope("f0", vec![]));
        assert_eq!(denote_ltrs(&l, &s, 100).unwrap(), p("\\x.x"));
    }

    #[test]
    fn lift_running_example() {
        let m = p("\\x.(\\y.y)((\\z.\\w.w z) x)");
        let (l, s) = lambda_lift(&m).unwrap();
        assert_eq!(
            l.to_string(),
            "@(f0, y) -> @(f1,@(f2,y))\n@(f1, y) -> y\n@(f2, y) -> f3(y)\n@(f3(x1), y) -> @(y,x1)\n"
        );
        assert_eq!(s.to_string(), "f0");
        assert!(finitely_nested(&l));
        assert_eq!(denote_ltrs(&l, &s, 1000).unwrap(), m);
    }

    #[test]
    fn lift_orders_parameters_by_first_occurrence() {
        let m = p("\\a.\\b.\\c.\\x.c x b x a");
        let (l, _) = lambda_lift(&m).unwrap();
        let inner = l.get(&sym("f3")).unwrap();
        assert_eq!(inner.arity, 3);
        // c x b x a with c = □1, b = □2, a = □3, x = □4
        let printed = l.to_string();
        assert!(printed.contains("@(f3(x1,x2,x3), y) -> @(@(@(@(x1,y),x2),y),x3)"), "{printed}");
    }

    #[test]
    fn lift_rejects_open_terms() {
        assert_eq!(lambda_lift(&p("\\x.y")), Err(LtrsError::NotClosed(Name::new("y"))));
    }

    #[test]
    fn text_round_trip() {
        let (l, s) = example_ltrs();
        assert_eq!(l.to_string(), EXAMPLE_LTRS);
        assert_eq!(l.to_string().parse::<LTrs>().unwrap(), l);
        assert_eq!(s.to_string().parse::<LTrsTerm>().unwrap(), s);
        let with_consts: LTrs = "@(k(a), b) -> @(x3,@(a,b))".parse().unwrap();
        assert_eq!(with_consts.to_string(), "@(k(v1), w) -> @(x3,@(v1,w))\n");
        assert_eq!(with_consts.to_string().parse::<LTrs>().unwrap(), with_consts);
    }

    #[test]
    fn loader_validates() {
        assert!(matches!(
            "@(f(x1), y) -> g(y)\n@(g, y) -> y".parse::<LTrs>(),
            Err(LtrsError::ArityMismatch { .. })
        ));
        assert!(matches!("@(f, y) -> q".parse::<LTrs>(), Err(LtrsError::UnknownSymbol(_))));
        assert!(matches!("@(f, y) -> y\n@(f, y) -> y".parse::<LTrs>(), Err(LtrsError::Parse { line: 2, .. })));
        assert!(matches!("@(f, y) => y".parse::<LTrs>(), Err(LtrsError::Parse { line: 1, column: 9, .. })));
    }

    #[test]
    fn hash_is_stable_and_content_sensitive() {
        let (l, _) = example_ltrs();
        assert_eq!(l.hash(), example_ltrs().0.hash());
        assert_eq!(l.hash().len(), 64);
        let other: LTrs = "@(g, y) -> y".parse().unwrap();
        assert_ne!(l.hash(), other.hash());
    }
}
