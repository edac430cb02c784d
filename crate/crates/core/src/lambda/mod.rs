//! Named λ-terms compared modulo α.
//!
//! Terms are immutable and reference counted, so structurally repeated
//! subterms (as produced by substitution) are physically shared. Every node
//! caches its depth, unfolded size, free variables and whether a β-redex
//! occurs below it; all traversals memoize on node identity, which keeps the
//! exponentially large members of the term families cheap to handle.

mod alpha;
mod family;
mod parse;
mod reduce;

use std::fmt;
use std::sync::Arc;

pub use alpha::{alpha_eq, to_de_bruijn};
pub use family::{
    church_two, family_depth_explosion, family_size_closed, family_size_explosion, DepthFamily,
};
pub use parse::{parse_lambda, ParseError};
pub use reduce::{
    lo_redex, lo_reduce, reduce_at, substitute, BetaTrace, LambdaError, Strategy,
};

/// Variable identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The first of `self'`, `self''`, ... rejected by `taken`.
    pub fn primed(&self, taken: impl Fn(&Name) -> bool) -> Name {
        let mut candidate = format!("{}'", self.0);
        loop {
            let name = Name::new(&candidate);
            if !taken(&name) {
                return name;
            }
            candidate.push('\'');
        }
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name(Arc::from(s))
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug)]
pub enum Kind {
    Var(Name),
    App(Term, Term),
    Abs(Name, Term),
}

struct Node {
    kind: Kind,
    depth: u64,
    size: u64,
    apps: u64,
    has_redex: bool,
    free: Arc<[Name]>,
}

/// A λ-term. Equality is α-equivalence.
#[derive(Clone)]
pub struct Term(Arc<Node>);

impl Term {
    pub fn var(name: impl Into<Name>) -> Term {
        let name = name.into();
        Term(Arc::new(Node {
            free: Arc::from(vec![name.clone()]),
            kind: Kind::Var(name),
            depth: 0,
            size: 1,
            apps: 0,
            has_redex: false,
        }))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        let free = merge_free(&fun.0.free, &arg.0.free);
        let has_redex =
            matches!(fun.kind(), Kind::Abs(..)) || fun.0.has_redex || arg.0.has_redex;
        Term(Arc::new(Node {
            depth: 1 + fun.0.depth.max(arg.0.depth),
            size: 1u64.saturating_add(fun.0.size).saturating_add(arg.0.size),
            apps: 1u64.saturating_add(fun.0.apps).saturating_add(arg.0.apps),
            has_redex,
            free,
            kind: Kind::App(fun, arg),
        }))
    }

    pub fn abs(binder: impl Into<Name>, body: Term) -> Term {
        let binder = binder.into();
        let free: Arc<[Name]> = if body.has_free(&binder) {
            body.0.free.iter().filter(|n| **n != binder).cloned().collect()
        } else {
            body.0.free.clone()
        };
        Term(Arc::new(Node {
            depth: 1 + body.0.depth,
            size: 1u64.saturating_add(body.0.size),
            apps: body.0.apps,
            has_redex: body.0.has_redex,
            free,
            kind: Kind::Abs(binder, body),
        }))
    }

    /// `\x1.\x2. ... body`
    pub fn abs_many<N: Into<Name>>(binders: impl IntoIterator<Item = N>, body: Term) -> Term {
        let binders: Vec<Name> = binders.into_iter().map(Into::into).collect();
        binders.into_iter().rev().fold(body, |acc, b| Term::abs(b, acc))
    }

    /// Left-associated application `head a1 a2 ...`.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Longest root-to-leaf path in the syntax tree.
    pub fn depth(&self) -> u64 {
        self.0.depth
    }

    /// Node count of the unfolded syntax tree (saturating).
    pub fn size(&self) -> u64 {
        self.0.size
    }

    /// Number of application nodes of the unfolded syntax tree (saturating).
    pub fn app_count(&self) -> u64 {
        self.0.apps
    }

    pub fn has_redex(&self) -> bool {
        self.0.has_redex
    }

    pub fn is_normal(&self) -> bool {
        !self.0.has_redex
    }

    /// Free variables, sorted.
    pub fn free_vars(&self) -> &[Name] {
        &self.0.free
    }

    pub fn has_free(&self, name: &Name) -> bool {
        self.0.free.binary_search(name).is_ok()
    }

    pub fn is_closed(&self) -> bool {
        self.0.free.is_empty()
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn is_abs(&self) -> bool {
        matches!(self.kind(), Kind::Abs(..))
    }

    /// Free variables in order of first textual occurrence.
    pub fn free_vars_in_order(&self) -> Vec<Name> {
        fn walk(t: &Term, bound: &mut Vec<Name>, out: &mut Vec<Name>) {
            if t.free_vars().iter().all(|n| out.contains(n) || bound.contains(n)) {
                return;
            }
            match t.kind() {
                Kind::Var(x) => {
                    if !bound.contains(x) && !out.contains(x) {
                        out.push(x.clone());
                    }
                }
                Kind::App(f, a) => {
                    walk(f, bound, out);
                    walk(a, bound, out);
                }
                Kind::Abs(x, b) => {
                    bound.push(x.clone());
                    walk(b, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Whether the syntax tree is a complete binary application tree with
    /// the variable `leaf` at every leaf.
    pub fn is_complete_app_tree(&self, leaf: &Name) -> bool {
        fn height(t: &Term, leaf: &Name, memo: &mut std::collections::HashMap<usize, Option<u64>>) -> Option<u64> {
            if let Some(h) = memo.get(&t.addr()) {
                return *h;
            }
            let h = match t.kind() {
                Kind::Var(x) if x == leaf => Some(0),
                Kind::Var(_) | Kind::Abs(..) => None,
                Kind::App(f, a) => match (height(f, leaf, memo), height(a, leaf, memo)) {
                    (Some(l), Some(r)) if l == r => Some(l + 1),
                    _ => None,
                },
            };
            memo.insert(t.addr(), h);
            h
        }
        height(self, leaf, &mut Default::default()).is_some()
    }

    pub fn subterm(&self, pos: &[u32]) -> Option<&Term> {
        let mut t = self;
        for &i in pos {
            t = match (t.kind(), i) {
                (Kind::App(f, _), 0) => f,
                (Kind::App(_, a), 1) => a,
                (Kind::Abs(_, b), 0) => b,
                _ => return None,
            };
        }
        Some(t)
    }

    /// Rebuilds the spine above `pos` with `new` in place of the subterm there.
    pub fn replace_at(&self, pos: &[u32], new: Term) -> Option<Term> {
        let Some((&first, rest)) = pos.split_first() else {
            return Some(new);
        };
        match (self.kind(), first) {
            (Kind::App(f, a), 0) => Some(Term::app(f.replace_at(rest, new)?, a.clone())),
            (Kind::App(f, a), 1) => Some(Term::app(f.clone(), a.replace_at(rest, new)?)),
            (Kind::Abs(x, b), 0) => Some(Term::abs(x.clone(), b.replace_at(rest, new)?)),
            _ => None,
        }
    }
}

fn merge_free(a: &Arc<[Name]>, b: &Arc<[Name]>) -> Arc<[Name]> {
    if b.is_empty() || Arc::ptr_eq(a, b) {
        return a.clone();
    }
    if a.is_empty() {
        return b.clone();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    if out.len() == a.len() {
        return a.clone();
    }
    Arc::from(out)
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        alpha_eq(self, other)
    }
}

impl Eq for Term {}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.size() > 4096 {
            return write!(f, "<term size={} depth={}>", self.size(), self.depth());
        }
        write!(f, "{self}")
    }
}

/// Prints the parser's grammar with minimal parentheses.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, f, true)
    }
}

fn write_term(t: &Term, f: &mut fmt::Formatter<'_>, rightmost: bool) -> fmt::Result {
    match t.kind() {
        Kind::Var(x) => write!(f, "{x}"),
        Kind::Abs(x, b) => {
            if !rightmost {
                f.write_str("(")?;
            }
            write!(f, "\\{x}.")?;
            write_term(b, f, true)?;
            if !rightmost {
                f.write_str(")")?;
            }
            Ok(())
        }
        Kind::App(fun, arg) => {
            write_term(fun, f, false)?;
            f.write_str(" ")?;
            match arg.kind() {
                Kind::App(..) => {
                    f.write_str("(")?;
                    write_term(arg, f, true)?;
                    f.write_str(")")
                }
                _ => write_term(arg, f, rightmost),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Term {
        parse_lambda(s).unwrap()
    }

    #[test]
    fn depth_clauses() {
        assert_eq!(p("x").depth(), 0);
        assert_eq!(p("x x").depth(), 1);
        assert_eq!(p("\\x.x").depth(), 1);
        assert_eq!(p("\\x.(\\y.y)((\\z.\\w.w z) x)").depth(), 6);
    }

    #[test]
    fn free_vars_sorted_and_ordered() {
        let t = p("\\x.z x y z");
        assert_eq!(t.free_vars(), &[Name::new("y"), Name::new("z")]);
        assert_eq!(t.free_vars_in_order(), vec![Name::new("z"), Name::new("y")]);
        assert!(p("\\x.\\y.x").is_closed());
    }

    #[test]
    fn printer_uses_minimal_parentheses() {
        for src in [
            "\\x.x",
            "x y z",
            "x (y z)",
            "(\\x.x) y",
            "x \\y.y",
            "(x \\y.y) z",
            "\\x.(\\y.y) ((\\z.\\w.w z) x)",
        ] {
            let t = p(src);
            let printed = t.to_string();
            assert_eq!(p(&printed), t, "{src} -> {printed}");
        }
        assert_eq!(p("(x) ((y))").to_string(), "x y");
        assert_eq!(p("\\x.\\y.x (x y)").to_string(), "\\x.\\y.x (x y)");
        assert_eq!(p("(x \\y.y) z").to_string(), "x (\\y.y) z");
    }

    #[test]
    fn subterm_and_replace() {
        let t = p("\\x.(\\y.y) x");
        assert_eq!(t.subterm(&[0, 0]).unwrap(), &p("\\y.y"));
        assert!(t.subterm(&[1]).is_none());
        let r = t.replace_at(&[0, 1], p("z")).unwrap();
        assert_eq!(r, p("\\x.(\\y.y) z"));
    }
}
