use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use super::{Kind, Name, Term};
use crate::position::Position;
use crate::StepLimitExceeded;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LambdaError {
    #[error("no β-redex at position {0}")]
    NotARedex(Position),
    #[error("position {0} does not address a subterm")]
    InvalidPosition(Position),
}

/// Capture-avoiding `body[var := arg]`.
///
/// Binders that would capture a free variable of `arg` are renamed to the
/// first primed variant not free in the body or the argument. Subterms in
/// which `var` is not free are returned physically unchanged.
pub fn substitute(body: &Term, var: &Name, arg: &Term) -> Term {
    if let Kind::Var(y) = arg.kind() {
        if y == var {
            return body.clone();
        }
    }
    Substitution::new(var.clone(), arg.clone()).apply(body)
}

struct Substitution {
    var: Name,
    arg: Term,
    // keyed by node address; the key term is kept alive alongside the result
    memo: HashMap<usize, (Term, Term)>,
}

impl Substitution {
    fn new(var: Name, arg: Term) -> Self {
        Substitution {
            var,
            arg,
            memo: HashMap::new(),
        }
    }

    fn apply(&mut self, t: &Term) -> Term {
        if !t.has_free(&self.var) {
            return t.clone();
        }
        if let Some((_, r)) = self.memo.get(&t.addr()) {
            return r.clone();
        }
        let result = match t.kind() {
            Kind::Var(_) => self.arg.clone(),
            Kind::App(f, a) => {
                let f = self.apply(f);
                let a = self.apply(a);
                Term::app(f, a)
            }
            Kind::Abs(y, b) => {
                if self.arg.has_free(y) {
                    let fresh = y.primed(|n| {
                        b.has_free(n) || self.arg.has_free(n) || *n == self.var
                    });
                    let renamed = Substitution::new(y.clone(), Term::var(fresh.clone())).apply(b);
                    Term::abs(fresh, self.apply(&renamed))
                } else {
                    Term::abs(y.clone(), self.apply(b))
                }
            }
        };
        self.memo.insert(t.addr(), (t.clone(), result.clone()));
        result
    }
}

/// Position of the leftmost-outermost β-redex: the first redex in pre-order
/// (outside-in first, left-to-right second).
pub fn lo_redex(t: &Term) -> Option<Position> {
    fn find(t: &Term, path: &mut Vec<u32>) -> bool {
        if !t.has_redex() {
            return false;
        }
        match t.kind() {
            Kind::App(f, a) => {
                if f.is_abs() {
                    return true;
                }
                path.push(0);
                if find(f, path) {
                    return true;
                }
                path.pop();
                path.push(1);
                if find(a, path) {
                    return true;
                }
                path.pop();
                false
            }
            Kind::Abs(_, b) => {
                path.push(0);
                if find(b, path) {
                    return true;
                }
                path.pop();
                false
            }
            Kind::Var(_) => false,
        }
    }
    let mut path = Vec::new();
    find(t, &mut path).then_some(Position(path))
}

/// Contracts the β-redex at `p`.
pub fn reduce_at(t: &Term, p: &Position) -> Result<Term, LambdaError> {
    let redex = t
        .subterm(p.as_slice())
        .ok_or_else(|| LambdaError::InvalidPosition(p.clone()))?;
    let contractum = match redex.kind() {
        Kind::App(f, a) => match f.kind() {
            Kind::Abs(x, body) => substitute(body, x, a),
            _ => return Err(LambdaError::NotARedex(p.clone())),
        },
        _ => return Err(LambdaError::NotARedex(p.clone())),
    };
    Ok(t.replace_at(p.as_slice(), contractum)
        .expect("position was validated above"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    LeftmostOutermost,
    Scripted,
}

/// `terms[i] →β terms[i+1]` by contracting the redex at `positions[i]`.
#[derive(Debug, Clone)]
pub struct BetaTrace {
    pub terms: Vec<Term>,
    pub positions: Vec<Position>,
    pub strategy: Strategy,
}

impl BetaTrace {
    pub fn new(start: Term, strategy: Strategy) -> Self {
        BetaTrace {
            terms: vec![start],
            positions: Vec::new(),
            strategy,
        }
    }

    /// Number of β-steps.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn start(&self) -> &Term {
        &self.terms[0]
    }

    pub fn last(&self) -> &Term {
        self.terms.last().expect("a trace holds at least its start term")
    }

    pub fn depths(&self) -> Vec<u64> {
        self.terms.iter().map(Term::depth).collect()
    }

    /// Appends the contraction of the redex at `p` of the last term.
    pub fn step(&mut self, p: Position) -> Result<(), LambdaError> {
        let next = reduce_at(self.last(), &p)?;
        self.terms.push(next);
        self.positions.push(p);
        Ok(())
    }

    /// Checks that each step contracts a redex at the recorded position and,
    /// under the lo tag, that the position is the leftmost-outermost one.
    pub fn validate(&self) -> Result<(), String> {
        for (i, p) in self.positions.iter().enumerate() {
            let expected = reduce_at(&self.terms[i], p).map_err(|e| format!("step {i}: {e}"))?;
            if expected != self.terms[i + 1] {
                return Err(format!("step {i}: reduct mismatch"));
            }
            if self.strategy == Strategy::LeftmostOutermost
                && lo_redex(&self.terms[i]).as_ref() != Some(p)
            {
                return Err(format!("step {i}: {p} is not the lo redex"));
            }
        }
        Ok(())
    }
}

/// Leftmost-outermost reduction for at most `max_steps` steps. Hitting the
/// limit on a term that still has a redex yields the partial trace.
pub fn lo_reduce(t: &Term, max_steps: usize) -> Result<BetaTrace, StepLimitExceeded<BetaTrace>> {
    let mut trace = BetaTrace::new(t.clone(), Strategy::LeftmostOutermost);
    while let Some(p) = lo_redex(trace.last()) {
        if trace.len() >= max_steps {
            return Err(StepLimitExceeded {
                limit: max_steps,
                partial: trace,
            });
        }
        trace.step(p).expect("lo_redex returns a redex position");
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{alpha_eq, parse_lambda};

    fn p(s: &str) -> Term {
        parse_lambda(s).unwrap()
    }

    #[test]
    fn substitute_single_occurrence() {
        assert_eq!(substitute(&p("x"), &"x".into(), &p("\\y.y")), p("\\y.y"));
    }

    #[test]
    fn substitute_avoids_capture() {
        let r = substitute(&p("\\y.x"), &"x".into(), &p("y"));
        match r.kind() {
            Kind::Abs(b, body) => {
                assert_ne!(b.as_str(), "y");
                assert!(matches!(body.kind(), Kind::Var(v) if v.as_str() == "y"));
            }
            _ => panic!(),
        }
        assert_eq!(r.to_string(), "\\y'.y");
    }

    #[test]
    fn substitute_respects_shadowing() {
        assert_eq!(substitute(&p("\\x.x"), &"x".into(), &p("z")), p("\\x.x"));
    }

    #[test]
    fn substitute_builds_b1_from_b0() {
        let b0 = p("x x");
        assert_eq!(substitute(&b0, &"x".into(), &b0), p("(x x) (x x)"));
    }

    #[test]
    fn substitute_preserves_sharing_when_var_absent() {
        let t = p("\\y.y z");
        assert!(substitute(&t, &"x".into(), &p("w")).ptr_eq(&t));
    }

    #[test]
    fn lo_redex_examples() {
        assert_eq!(lo_redex(&p("\\x.x")), None);
        let m = p("\\x.(\\y.y)((\\z.\\w.w z) x)");
        assert_eq!(lo_redex(&m), Some(Position(vec![0])));
        assert_eq!(lo_redex(&p("(\\x.x)((\\y.y) z)")), Some(Position::root()));
        assert_eq!(lo_redex(&p("x ((\\y.y) z) ((\\y.y) w)")), Some(Position(vec![0, 1])));
    }

    #[test]
    fn lo_reduce_running_example() {
        let m = p("\\x.(\\y.y)((\\z.\\w.w z) x)");
        let tr = lo_reduce(&m, 100).unwrap();
        assert_eq!(tr.len(), 2);
        assert_eq!(tr.terms[1], p("\\x.(\\z.\\w.w z) x"));
        assert_eq!(tr.last(), &p("\\x.\\w.w x"));
        tr.validate().unwrap();
    }

    #[test]
    fn lo_reduce_normal_form() {
        assert!(lo_reduce(&p("\\x.x"), 10).unwrap().is_empty());
    }

    #[test]
    fn omega_hits_limit() {
        let omega = p("(\\x.x x)(\\x.x x)");
        let err = lo_reduce(&omega, 5).unwrap_err();
        assert_eq!(err.limit, 5);
        assert_eq!(err.partial.len(), 5);
        assert!(err.partial.terms.iter().all(|t| alpha_eq(t, &omega)));
    }

    #[test]
    fn reduce_at_errors() {
        assert_eq!(reduce_at(&p("(\\x.x) y"), &Position::root()).unwrap(), p("y"));
        assert_eq!(
            reduce_at(&p("\\x.x"), &Position::root()),
            Err(LambdaError::NotARedex(Position::root()))
        );
        assert!(matches!(
            reduce_at(&p("x"), &Position(vec![0])),
            Err(LambdaError::InvalidPosition(_))
        ));
    }
}
