//! First-order λ-term representations over `{x_j, @, λx_j}`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::lambda::{self, Kind, Name, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rep {
    Var(u32),
    App(Box<Rep>, Box<Rep>),
    Abs(u32, Box<Rep>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LrepError {
    #[error("free variable `{0}` is not of the form x<j>")]
    UnrepresentableFree(Name),
    #[error(transparent)]
    Parse(#[from] lambda::ParseError),
}

pub fn var_name(j: u32) -> Name {
    Name::from(format!("x{j}"))
}

/// `j` if `name` is `x<j>`.
pub fn var_index(name: &Name) -> Option<u32> {
    let digits = name.as_str().strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

impl Rep {
    pub fn var(j: u32) -> Rep {
        Rep::Var(j)
    }

    pub fn app(f: Rep, a: Rep) -> Rep {
        Rep::App(Box::new(f), Box::new(a))
    }

    pub fn abs(j: u32, body: Rep) -> Rep {
        Rep::Abs(j, Box::new(body))
    }

    /// First-order tree depth.
    pub fn depth(&self) -> u64 {
        match self {
            Rep::Var(_) => 0,
            Rep::App(f, a) => 1 + f.depth().max(a.depth()),
            Rep::Abs(_, b) => 1 + b.depth(),
        }
    }

    pub fn size(&self) -> u64 {
        match self {
            Rep::Var(_) => 1,
            Rep::App(f, a) => 1 + f.size() + a.size(),
            Rep::Abs(_, b) => 1 + b.size(),
        }
    }

    /// Largest variable index occurring anywhere (bound or free).
    pub fn max_index(&self) -> Option<u32> {
        match self {
            Rep::Var(j) => Some(*j),
            Rep::App(f, a) => f.max_index().max(a.max_index()),
            Rep::Abs(j, b) => Some((*j).max(b.max_index().unwrap_or(0))),
        }
    }

    pub fn free_indices(&self) -> Vec<u32> {
        fn go(t: &Rep, bound: &mut Vec<u32>, out: &mut Vec<u32>) {
            match t {
                Rep::Var(j) => {
                    if !bound.contains(j) && !out.contains(j) {
                        out.push(*j);
                    }
                }
                Rep::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
                Rep::Abs(j, b) => {
                    bound.push(*j);
                    go(b, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out.sort_unstable();
        out
    }

    pub fn has_free(&self, j: u32) -> bool {
        match self {
            Rep::Var(k) => *k == j,
            Rep::App(f, a) => f.has_free(j) || a.has_free(j),
            Rep::Abs(k, b) => *k != j && b.has_free(j),
        }
    }

    /// Every `x_j` occurs below some `λx_j`.
    pub fn is_closed(&self) -> bool {
        self.free_indices().is_empty()
    }

    /// No `λx_j` strictly inside another `λx_j`.
    pub fn has_nested_index_discipline(&self) -> bool {
        fn go(t: &Rep, bound: &mut Vec<u32>) -> bool {
            match t {
                Rep::Var(_) => true,
                Rep::App(f, a) => go(f, bound) && go(a, bound),
                Rep::Abs(j, b) => {
                    if bound.contains(j) {
                        return false;
                    }
                    bound.push(*j);
                    let ok = go(b, bound);
                    bound.pop();
                    ok
                }
            }
        }
        go(self, &mut Vec::new())
    }

    /// Reads a term of the λ grammar whose variables are all `x<j>`.
    pub fn parse(text: &str) -> Result<Rep, LrepError> {
        let t = lambda::parse_lambda(text)?;
        from_named(&t)
    }
}

/// Converts a λ-term whose variable names are all `x<j>` verbatim.
pub fn from_named(t: &Term) -> Result<Rep, LrepError> {
    Ok(match t.kind() {
        Kind::Var(x) => Rep::Var(var_index(x).ok_or_else(|| LrepError::UnrepresentableFree(x.clone()))?),
        Kind::App(f, a) => Rep::app(from_named(f)?, from_named(a)?),
        Kind::Abs(x, b) => Rep::abs(
            var_index(x).ok_or_else(|| LrepError::UnrepresentableFree(x.clone()))?,
            from_named(b)?,
        ),
    })
}

/// `⟦s⟧`: read `λx_j` as an abstraction over `x_j`, and unbound `x_j` as
/// the free variable named `x_j`.
pub fn denote(s: &Rep) -> Term {
    match s {
        Rep::Var(j) => Term::var(var_name(*j)),
        Rep::App(f, a) => Term::app(denote(f), denote(a)),
        Rep::Abs(j, b) => Term::abs(var_name(*j), denote(b)),
    }
}

pub fn depth_rep(s: &Rep) -> u64 {
    s.depth()
}

/// Representation of `m` with binder indices assigned in depth-first
/// pre-order, so nested binders never share an index. Free variables must
/// be named `x<j>`; binder indices skip those.
pub fn rep_of(m: &Term) -> Result<Rep, LrepError> {
    let mut reserved = Vec::new();
    for x in m.free_vars() {
        reserved.push(var_index(x).ok_or_else(|| LrepError::UnrepresentableFree(x.clone()))?);
    }
    let mut next = 0u32;
    let mut env: Vec<(Name, u32)> = Vec::new();
    Ok(rep_go(m, &mut env, &mut next, &reserved))
}

fn rep_go(t: &Term, env: &mut Vec<(Name, u32)>, next: &mut u32, reserved: &[u32]) -> Rep {
    match t.kind() {
        Kind::Var(x) => match env.iter().rev().find(|(n, _)| n == x) {
            Some((_, j)) => Rep::Var(*j),
            None => Rep::Var(var_index(x).expect("free variables were validated")),
        },
        Kind::App(f, a) => {
            let f = rep_go(f, env, next, reserved);
            let a = rep_go(a, env, next, reserved);
            Rep::app(f, a)
        }
        Kind::Abs(x, b) => {
            while reserved.contains(next) {
                *next += 1;
            }
            let j = *next;
            *next += 1;
            env.push((x.clone(), j));
            let body = rep_go(b, env, next, reserved);
            env.pop();
            Rep::abs(j, body)
        }
    }
}

/// Renames binder indices to `0, 1, 2, ...` in pre-order of first binding.
/// Used to compare representations up to index renaming.
pub fn normalize_indices(s: &Rep) -> Rep {
    fn go(t: &Rep, env: &mut Vec<(u32, u32)>, map: &mut HashMap<u32, u32>, next: &mut u32) -> Rep {
        match t {
            Rep::Var(j) => match env.iter().rev().find(|(k, _)| k == j) {
                Some((_, n)) => Rep::Var(*n),
                None => Rep::Var(*j),
            },
            Rep::App(f, a) => {
                let f = go(f, env, map, next);
                let a = go(a, env, map, next);
                Rep::app(f, a)
            }
            Rep::Abs(j, b) => {
                let n = *map.entry(*j).or_insert_with(|| {
                    let n = *next;
                    *next += 1;
                    n
                });
                env.push((*j, n));
                let body = go(b, env, map, next);
                env.pop();
                Rep::abs(n, body)
            }
        }
    }
    go(s, &mut Vec::new(), &mut HashMap::new(), &mut 0)
}

/// `x0`, `(s t)`, `\x0. s`.
impl fmt::Display for Rep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rep::Var(j) => write!(f, "x{j}"),
            Rep::App(a, b) => {
                f.write_str("(")?;
                match **a {
                    Rep::Abs(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " {b})")
            }
            Rep::Abs(j, b) => write!(f, "\\x{j}. {b}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_lambda;

    fn p(s: &str) -> Term {
        parse_lambda(s).unwrap()
    }

    #[test]
    fn denotes_i_k_s() {
        assert_eq!(denote(&Rep::abs(0, Rep::var(0))), p("\\x.x"));
        assert_eq!(denote(&Rep::abs(1, Rep::abs(2, Rep::var(1)))), p("\\x.\\y.x"));
        let s = Rep::abs(
            0,
            Rep::abs(
                1,
                Rep::abs(
                    2,
                    Rep::app(Rep::app(Rep::var(0), Rep::var(2)), Rep::app(Rep::var(1), Rep::var(2))),
                ),
            ),
        );
        assert_eq!(denote(&s), p("\\x.\\y.\\z.(x z)(y z)"));
    }

    #[test]
    fn rep_of_examples() {
        assert_eq!(rep_of(&p("\\x.x")).unwrap(), Rep::abs(0, Rep::var(0)));
        assert_eq!(rep_of(&p("\\x.\\y.x")).unwrap(), Rep::abs(0, Rep::abs(1, Rep::var(0))));
        let m = p("\\x.(\\y.y)((\\z.\\w.w z) x)");
        let s = Rep::abs(
            0,
            Rep::app(
                Rep::abs(1, Rep::var(1)),
                Rep::app(Rep::abs(2, Rep::abs(3, Rep::app(Rep::var(3), Rep::var(2)))), Rep::var(0)),
            ),
        );
        assert_eq!(rep_of(&m).unwrap(), s);
        assert_eq!(depth_rep(&s), 6);
    }

    #[test]
    fn free_variables_need_index_names() {
        assert_eq!(
            rep_of(&p("\\x.x y")),
            Err(LrepError::UnrepresentableFree(Name::new("y")))
        );
        // binder numbering skips the reserved free index 0
        assert_eq!(rep_of(&p("\\y.y x0")).unwrap(), Rep::abs(1, Rep::app(Rep::var(1), Rep::var(0))));
    }

    #[test]
    fn depth_examples() {
        assert_eq!(depth_rep(&Rep::var(3)), 0);
        assert_eq!(depth_rep(&Rep::abs(0, Rep::var(0))), 1);
    }

    #[test]
    fn open_representation_denotes_named_free_variable() {
        assert_eq!(denote(&Rep::abs(0, Rep::var(5))), p("\\a.x5"));
        assert!(!Rep::abs(0, Rep::var(5)).is_closed());
    }

    #[test]
    fn display_and_parse_round_trip() {
        let s = Rep::abs(0, Rep::app(Rep::abs(1, Rep::var(1)), Rep::var(0)));
        assert_eq!(s.to_string(), "\\x0. ((\\x1. x1) x0)");
        assert_eq!(Rep::parse(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn var_index_parsing() {
        assert_eq!(var_index(&Name::new("x12")), Some(12));
        assert_eq!(var_index(&Name::new("x")), None);
        assert_eq!(var_index(&Name::new("x01")), None);
        assert_eq!(var_index(&Name::new("y1")), None);
    }
}
