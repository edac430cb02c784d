//! The naive simulation TRS on λ-term representations (rules search1..7 and
//! contract), with substitution performed as a single meta step.

use std::fmt;

use serde::Serialize;

use crate::lambda::{substitute, Term};
use crate::lrep::{self, var_name, Rep};
use crate::position::Position;
use crate::StepLimitExceeded;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SimTerm {
    Var(u32),
    App(Box<SimTerm>, Box<SimTerm>),
    Abs(u32, Box<SimTerm>),
    Losim(Box<SimTerm>),
    /// `thunk_n(s, b1, ..., bn)`; `args = [s, b1, ..., bn]`.
    Thunk(Vec<SimTerm>),
    /// `unthunk_n(s, b1, ..., bn)` with `n >= 1`.
    Unthunk(Vec<SimTerm>),
    /// `subst(body, x_j, arg)`
    Subst(Box<SimTerm>, u32, Box<SimTerm>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimStepClass {
    /// `search1` .. `search7`.
    Search(u8),
    Contract,
    Subst,
}

impl SimStepClass {
    pub fn class(self) -> &'static str {
        match self {
            SimStepClass::Search(_) => "search",
            SimStepClass::Contract => "contract",
            SimStepClass::Subst => "subst",
        }
    }

    pub fn rule(self) -> String {
        match self {
            SimStepClass::Search(k) => format!("search{k}"),
            SimStepClass::Contract => "contract".into(),
            SimStepClass::Subst => "subst".into(),
        }
    }
}

impl Serialize for SimStepClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.rule())
    }
}

impl From<&Rep> for SimTerm {
    fn from(r: &Rep) -> Self {
        match r {
            Rep::Var(j) => SimTerm::Var(*j),
            Rep::App(f, a) => SimTerm::App(Box::new(f.as_ref().into()), Box::new(a.as_ref().into())),
            Rep::Abs(j, b) => SimTerm::Abs(*j, Box::new(b.as_ref().into())),
        }
    }
}

impl SimTerm {
    pub fn to_rep(&self) -> Option<Rep> {
        Some(match self {
            SimTerm::Var(j) => Rep::Var(*j),
            SimTerm::App(f, a) => Rep::app(f.to_rep()?, a.to_rep()?),
            SimTerm::Abs(j, b) => Rep::abs(*j, b.to_rep()?),
            _ => return None,
        })
    }

    fn children(&self) -> Vec<&SimTerm> {
        match self {
            SimTerm::Var(_) => vec![],
            SimTerm::App(f, a) => vec![f, a],
            SimTerm::Abs(_, b) | SimTerm::Losim(b) => vec![b],
            SimTerm::Thunk(args) | SimTerm::Unthunk(args) => args.iter().collect(),
            SimTerm::Subst(b, _, a) => vec![b, a],
        }
    }

    fn child_mut(&mut self, k: usize) -> &mut SimTerm {
        match (self, k) {
            (SimTerm::App(f, _), 0) | (SimTerm::Subst(f, _, _), 0) => f,
            (SimTerm::App(_, a), 1) | (SimTerm::Subst(_, _, a), 1) => a,
            (SimTerm::Abs(_, b), 0) | (SimTerm::Losim(b), 0) => b,
            (SimTerm::Thunk(args), k) | (SimTerm::Unthunk(args), k) => &mut args[k],
            _ => panic!("no child {k}"),
        }
    }
}

/// Projection to λ-terms: thunks flattened into curried applications,
/// `subst` carried out, `losim` erased.
pub fn denote_sim(t: &SimTerm) -> Term {
    match t {
        SimTerm::Var(j) => Term::var(var_name(*j)),
        SimTerm::App(f, a) => Term::app(denote_sim(f), denote_sim(a)),
        SimTerm::Abs(j, b) => Term::abs(var_name(*j), denote_sim(b)),
        SimTerm::Losim(b) => denote_sim(b),
        SimTerm::Thunk(args) | SimTerm::Unthunk(args) => {
            Term::apps(denote_sim(&args[0]), args[1..].iter().map(denote_sim))
        }
        SimTerm::Subst(b, j, a) => substitute(&denote_sim(b), &var_name(*j), &denote_sim(a)),
    }
}

/// Capture-avoiding `body[x_j := arg]`. A binder `λx_k` above an occurrence
/// of `x_j` is renamed to `1 + ` the largest index in sight when `x_k` is
/// free in `arg`.
pub fn subst_meta(body: &Rep, j: u32, arg: &Rep) -> Rep {
    if !body.has_free(j) {
        return body.clone();
    }
    match body {
        Rep::Var(_) => arg.clone(),
        Rep::App(f, a) => Rep::app(subst_meta(f, j, arg), subst_meta(a, j, arg)),
        Rep::Abs(k, b) => {
            if arg.has_free(*k) {
                let fresh = 1 + body.max_index().max(arg.max_index()).unwrap_or(0).max(j);
                let renamed = subst_meta(b, *k, &Rep::Var(fresh));
                Rep::abs(fresh, subst_meta(&renamed, j, arg))
            } else {
                Rep::abs(*k, subst_meta(b, j, arg))
            }
        }
    }
}

fn rule_at_root(t: &SimTerm) -> Option<(SimTerm, SimStepClass)> {
    use SimTerm::*;
    Some(match t {
        Losim(x) => (Thunk(vec![(**x).clone()]), SimStepClass::Search(1)),
        Thunk(args) => {
            let (head, bs) = args.split_first().expect("thunk has a head");
            match head {
                App(x, y) => {
                    let mut next = vec![(**x).clone(), (**y).clone()];
                    next.extend_from_slice(bs);
                    (Thunk(next), SimStepClass::Search(2))
                }
                Abs(j, x) if bs.is_empty() => (Abs(*j, Box::new(Thunk(vec![(**x).clone()]))), SimStepClass::Search(3)),
                Abs(j, x) => {
                    let mut next = vec![Subst(x.clone(), *j, Box::new(bs[0].clone()))];
                    next.extend_from_slice(&bs[1..]);
                    (Thunk(next), SimStepClass::Contract)
                }
                Var(j) if bs.is_empty() => (Var(*j), SimStepClass::Search(4)),
                Var(_) => (Unthunk(args.clone()), SimStepClass::Search(5)),
                _ => return None,
            }
        }
        Unthunk(args) => {
            let applied = App(Box::new(args[0].clone()), Box::new(Thunk(vec![args[1].clone()])));
            if args.len() == 2 {
                (applied, SimStepClass::Search(6))
            } else {
                let mut next = vec![applied];
                next.extend_from_slice(&args[2..]);
                (Unthunk(next), SimStepClass::Search(7))
            }
        }
        Subst(b, j, a) => {
            let (b, a) = (b.to_rep()?, a.to_rep()?);
            ((&subst_meta(&b, *j, &a)).into(), SimStepClass::Subst)
        }
        _ => return None,
    })
}

/// One leftmost-outermost step: the first pre-order position where a rule
/// (or the substitution meta rule) applies.
pub fn repsim_step(t: &SimTerm) -> Option<(SimTerm, SimStepClass, Position)> {
    fn find(t: &SimTerm, path: &mut Vec<u32>) -> Option<(SimTerm, SimStepClass)> {
        if let Some(hit) = rule_at_root(t) {
            return Some(hit);
        }
        for (k, c) in t.children().into_iter().enumerate() {
            path.push(k as u32);
            if let Some(hit) = find(c, path) {
                return Some(hit);
            }
            path.pop();
        }
        None
    }
    let mut path = Vec::new();
    let (new, class) = find(t, &mut path)?;
    let mut out = t.clone();
    let mut slot = &mut out;
    for &k in &path {
        slot = slot.child_mut(k as usize);
    }
    *slot = new;
    Some((out, class, Position(path)))
}

#[derive(Debug, Clone)]
pub struct RepsimStep {
    pub class: SimStepClass,
    pub position: Position,
    pub term: SimTerm,
}

#[derive(Debug, Clone)]
pub struct RepsimTrace {
    pub start: SimTerm,
    pub steps: Vec<RepsimStep>,
}

impl RepsimTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> &SimTerm {
        self.steps.last().map_or(&self.start, |s| &s.term)
    }

    pub fn contracts(&self) -> usize {
        self.steps.iter().filter(|s| s.class == SimStepClass::Contract).count()
    }
}

/// Runs from `losim(s)` until no rule applies.
pub fn repsim_run(s: &Rep, max_steps: usize) -> Result<RepsimTrace, StepLimitExceeded<RepsimTrace>> {
    let mut trace = RepsimTrace {
        start: SimTerm::Losim(Box::new(s.into())),
        steps: Vec::new(),
    };
    while let Some((term, class, position)) = repsim_step(trace.last()) {
        if trace.len() >= max_steps {
            return Err(StepLimitExceeded {
                limit: max_steps,
                partial: trace,
            });
        }
        trace.steps.push(RepsimStep { class, position, term });
    }
    Ok(trace)
}

/// `x0`, `(s t)`, `\x0. s`, `losim(s)`, `thunk[n](s, b1, ...)`,
/// `subst(s, x1, t)`.
impl fmt::Display for SimTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, args: &[SimTerm]| -> fmt::Result {
            for (k, a) in args.iter().enumerate() {
                if k > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            Ok(())
        };
        match self {
            SimTerm::Var(j) => write!(f, "x{j}"),
            SimTerm::App(a, b) => {
                if matches!(**a, SimTerm::Abs(..)) {
                    write!(f, "(({a}) {b})")
                } else {
                    write!(f, "({a} {b})")
                }
            }
            SimTerm::Abs(j, b) => write!(f, "\\x{j}. {b}"),
            SimTerm::Losim(b) => write!(f, "losim({b})"),
            SimTerm::Thunk(args) => {
                write!(f, "thunk[{}](", args.len() - 1)?;
                list(f, args)?;
                f.write_str(")")
            }
            SimTerm::Unthunk(args) => {
                write!(f, "unthunk[{}](", args.len() - 1)?;
                list(f, args)?;
                f.write_str(")")
            }
            SimTerm::Subst(b, j, a) => write!(f, "subst({b}, x{j}, {a})"),
        }
    }
}

/// The final representation of a finished run.
pub fn final_rep(trace: &RepsimTrace) -> Option<Rep> {
    trace.last().to_rep()
}

/// Depth of the projected λ-term, used as the depth column of exports.
pub fn sim_depth(t: &SimTerm) -> u64 {
    denote_sim(t).depth()
}

pub use lrep::rep_of;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{lo_reduce, parse_lambda};

    fn p(s: &str) -> Term {
        parse_lambda(s).unwrap()
    }

    fn k_rep() -> Rep {
        Rep::abs(0, Rep::abs(1, Rep::var(0)))
    }

    #[test]
    fn first_step_initialises() {
        let s = Rep::abs(0, Rep::var(0));
        let (t, c, pos) = repsim_step(&SimTerm::Losim(Box::new((&s).into()))).unwrap();
        assert_eq!(t, SimTerm::Thunk(vec![(&s).into()]));
        assert_eq!(c, SimStepClass::Search(1));
        assert!(pos.is_root());
    }

    #[test]
    fn contract_introduces_subst() {
        let arg = SimTerm::App(Box::new(SimTerm::Var(2)), Box::new(SimTerm::Var(0)));
        let t = SimTerm::Thunk(vec![SimTerm::Abs(1, Box::new(SimTerm::Var(1))), arg.clone()]);
        let (u, c, _) = repsim_step(&t).unwrap();
        assert_eq!(c, SimStepClass::Contract);
        assert_eq!(
            u,
            SimTerm::Thunk(vec![SimTerm::Subst(Box::new(SimTerm::Var(1)), 1, Box::new(arg))])
        );
    }

    #[test]
    fn normal_representation_has_no_step() {
        assert!(repsim_step(&(&k_rep()).into()).is_none());
    }

    #[test]
    fn subst_examples() {
        assert_eq!(subst_meta(&Rep::var(1), 1, &k_rep()), k_rep());
        let arg = Rep::app(Rep::abs(2, Rep::abs(3, Rep::app(Rep::var(3), Rep::var(2)))), Rep::var(0));
        assert_eq!(subst_meta(&Rep::var(1), 1, &arg), arg);
        let r = subst_meta(&Rep::abs(2, Rep::var(1)), 1, &Rep::var(2));
        match r {
            Rep::Abs(k, b) => {
                assert_ne!(k, 2);
                assert_eq!(*b, Rep::var(2));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn running_example() {
        let m = p("\\x.(\\y.y)((\\z.\\w.w z) x)");
        let tr = repsim_run(&rep_of(&m).unwrap(), 100).unwrap();
        assert_eq!(tr.contracts(), 2);
        let classes: Vec<String> = tr.steps.iter().map(|s| s.class.rule()).collect();
        assert_eq!(
            classes,
            [
                "search1", "search3", "search2", "contract", "subst", "search2", "contract", "subst",
                "search3", "search2", "search5", "search6", "search4"
            ]
        );
        let fin = final_rep(&tr).unwrap();
        assert_eq!(fin, Rep::abs(0, Rep::abs(3, Rep::app(Rep::var(3), Rep::var(0)))));
        assert_eq!(lrep::denote(&fin), p("\\x.\\w.w x"));
    }

    #[test]
    fn identity_needs_no_contract() {
        let s = Rep::abs(0, Rep::var(0));
        let tr = repsim_run(&s, 100).unwrap();
        assert_eq!(tr.contracts(), 0);
        assert_eq!(final_rep(&tr).unwrap(), s);
    }

    #[test]
    fn contracts_match_lo_steps() {
        let m = p("(\\a.\\b.a) ((\\x.x) (\\y.y)) (\\z.z z)");
        let lo = lo_reduce(&m, 100).unwrap();
        assert_eq!(lo.len(), 3);
        let tr = repsim_run(&rep_of(&m).unwrap(), 1000).unwrap();
        assert_eq!(tr.contracts(), 3);
        assert_eq!(lrep::denote(&final_rep(&tr).unwrap()), *lo.last());
    }

    #[test]
    fn search_preserves_projection() {
        let m = p("\\x.(\\y.y)((\\z.\\w.w z) x)");
        let tr = repsim_run(&rep_of(&m).unwrap(), 100).unwrap();
        let mut prev = denote_sim(&tr.start);
        for s in &tr.steps {
            let cur = denote_sim(&s.term);
            if let SimStepClass::Search(_) | SimStepClass::Subst = s.class {
                assert_eq!(cur, prev);
            }
            prev = cur;
        }
    }
}
