use std::collections::HashMap;
use std::fmt::Write;

use super::{Kind, Name, Term};

#[derive(Clone, PartialEq, Eq, Hash)]
enum Nameless {
    Bound(u32),
    Free(Name),
    App(u32, u32),
    Abs(u32),
}

/// Hash-consed de Bruijn forms. Conversion of a shared node is memoized on
/// the node together with the binding status of its free variables, which
/// is all the surrounding binder stack can influence.
#[derive(Default)]
struct Interner {
    ids: HashMap<Nameless, u32>,
    nodes: Vec<Nameless>,
    memo: HashMap<(usize, Vec<Option<u32>>), u32>,
}

impl Interner {
    fn intern(&mut self, n: Nameless) -> u32 {
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n.clone());
        self.ids.insert(n, id);
        id
    }

    fn convert(&mut self, t: &Term, env: &mut Vec<Name>) -> u32 {
        let sig: Vec<Option<u32>> = t
            .free_vars()
            .iter()
            .map(|n| env.iter().rev().position(|b| b == n).map(|i| i as u32))
            .collect();
        let key = (t.addr(), sig);
        if let Some(&id) = self.memo.get(&key) {
            return id;
        }
        let id = match t.kind() {
            Kind::Var(x) => {
                let node = match env.iter().rev().position(|b| b == x) {
                    Some(i) => Nameless::Bound(i as u32),
                    None => Nameless::Free(x.clone()),
                };
                self.intern(node)
            }
            Kind::App(f, a) => {
                let f = self.convert(f, env);
                let a = self.convert(a, env);
                self.intern(Nameless::App(f, a))
            }
            Kind::Abs(x, b) => {
                env.push(x.clone());
                let b = self.convert(b, env);
                env.pop();
                self.intern(Nameless::Abs(b))
            }
        };
        self.memo.insert(key, id);
        id
    }

    fn write(&self, id: u32, out: &mut String) {
        match &self.nodes[id as usize] {
            Nameless::Bound(i) => {
                let _ = write!(out, "{i}");
            }
            Nameless::Free(x) => out.push_str(x.as_str()),
            Nameless::App(f, a) => {
                out.push('(');
                self.write(*f, out);
                out.push(' ');
                self.write(*a, out);
                out.push(')');
            }
            Nameless::Abs(b) => {
                out.push('λ');
                self.write(*b, out);
            }
        }
    }
}

/// α-equivalence: identical canonical nameless forms.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    if a.ptr_eq(b) {
        return true;
    }
    if a.depth() != b.depth() || a.size() != b.size() || a.free_vars() != b.free_vars() {
        return false;
    }
    let mut interner = Interner::default();
    let x = interner.convert(a, &mut Vec::new());
    let y = interner.convert(b, &mut Vec::new());
    x == y
}

/// Canonical nameless rendering: bound variables become de Bruijn indices
/// (0 = innermost binder), free variables keep their names.
pub fn to_de_bruijn(t: &Term) -> String {
    let mut interner = Interner::default();
    let id = interner.convert(t, &mut Vec::new());
    let mut out = String::new();
    interner.write(id, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_lambda;

    fn p(s: &str) -> Term {
        parse_lambda(s).unwrap()
    }

    #[test]
    fn renaming_bound_variable() {
        assert!(alpha_eq(&p("\\x.x"), &p("\\y.y")));
    }

    #[test]
    fn distinct_binders_used() {
        assert!(!alpha_eq(&p("\\x.\\y.x"), &p("\\x.\\y.y")));
    }

    #[test]
    fn free_variables_are_kept() {
        // nameless forms λ(0 z) on both sides
        assert_eq!(to_de_bruijn(&p("\\x.x z")), "λ(0 z)");
        assert_eq!(to_de_bruijn(&p("\\y.y z")), "λ(0 z)");
        assert!(alpha_eq(&p("\\x.x z"), &p("\\y.y z")));
        assert!(!alpha_eq(&p("\\x.x z"), &p("\\x.x w")));
        assert!(!alpha_eq(&p("\\x.z"), &p("\\z.z")));
    }

    #[test]
    fn shadowing() {
        assert_eq!(to_de_bruijn(&p("\\x.\\x.x")), "λλ0");
        assert!(alpha_eq(&p("\\x.\\x.x"), &p("\\a.\\b.b")));
    }

    #[test]
    fn shared_node_under_different_binders() {
        let shared = p("x y");
        let a = Term::app(Term::abs("x", shared.clone()), shared.clone());
        assert_eq!(to_de_bruijn(&a), "(λ(0 y) (x y))");
        let b = p("(\\z.z y) (x y)");
        assert!(alpha_eq(&a, &b));
    }
}
