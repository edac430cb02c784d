//! The expansion TRS for losim terms: rewrites `exp_0(t)` to the denoted
//! λ-term representation.
//!
//! Pending `exp_i(t)` markers live in slots of a growing output tree; the
//! selection order only decides which marker is rewritten next, so both
//! orders reach the same normal form.

use std::collections::VecDeque;

use crate::losim::{LKind, LosimTerm};
use crate::lrep::Rep;
use crate::ltrs::{LTrs, LtrsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// Oldest pending marker first.
    Outermost,
    /// Newest pending marker first.
    Innermost,
}

enum Slot {
    Pending(u32, LosimTerm),
    Var(u32),
    App(usize, usize),
    Abs(u32, usize),
}

/// `exp_0(t)` normalized, failing once more than `max_nodes` output
/// nodes have been emitted.
pub fn expand_with(
    l: &LTrs,
    t: &LosimTerm,
    max_nodes: usize,
    selection: Selection,
) -> Result<Rep, LtrsError> {
    let mut slots = vec![Slot::Pending(0, t.clone())];
    let mut work: VecDeque<usize> = VecDeque::from([0]);
    let mut emitted = 0usize;
    let over = LtrsError::ExpansionBudgetExceeded { limit: max_nodes };
    while let Some(k) = match selection {
        Selection::Outermost => work.pop_front(),
        Selection::Innermost => work.pop_back(),
    } {
        let Slot::Pending(i, t) = std::mem::replace(&mut slots[k], Slot::Var(0)) else {
            unreachable!("only pending slots are queued")
        };
        let pending = |slots: &mut Vec<Slot>, work: &mut VecDeque<usize>, i: u32, t: LosimTerm| {
            slots.push(Slot::Pending(i, t));
            work.push_back(slots.len() - 1);
            slots.len() - 1
        };
        let done = match t.kind() {
            LKind::Var(j) => Slot::Var(*j),
            LKind::App([a, b]) => {
                let a = pending(&mut slots, &mut work, i, a.clone());
                let b = pending(&mut slots, &mut work, i, b.clone());
                Slot::App(a, b)
            }
            LKind::Scope(f, args) => {
                let def = l.get(f).ok_or_else(|| LtrsError::UnknownSymbol(f.clone()))?;
                let body = def.ctx.instantiate(args, &LosimTerm::var(i));
                Slot::Abs(i, pending(&mut slots, &mut work, i + 1, body))
            }
            LKind::Abs(j, b) => Slot::Abs(*j, pending(&mut slots, &mut work, i.max(*j) + 1, b.clone())),
            LKind::Losim(x) => {
                slots[k] = Slot::Pending(i, x.clone());
                work.push_back(k);
                continue;
            }
            LKind::Thunk(j, args) if args.len() == 1 => {
                slots[k] = Slot::Pending(i.max(*j), args[0].clone());
                work.push_back(k);
                continue;
            }
            LKind::Thunk(j, args) | LKind::Unthunk(j, args) => {
                // left-nested applications, all children at index max(i, j)
                let i2 = i.max(*j);
                let mut head = pending(&mut slots, &mut work, i2, args[0].clone());
                for b in &args[1..args.len() - 1] {
                    let b = pending(&mut slots, &mut work, i2, b.clone());
                    slots.push(Slot::App(head, b));
                    head = slots.len() - 1;
                    emitted += 1;
                }
                let last = pending(&mut slots, &mut work, i2, args[args.len() - 1].clone());
                Slot::App(head, last)
            }
        };
        slots[k] = done;
        emitted += 1;
        if emitted > max_nodes {
            return Err(over);
        }
    }
    Ok(assemble(&slots, 0))
}

fn assemble(slots: &[Slot], k: usize) -> Rep {
    match &slots[k] {
        Slot::Var(j) => Rep::Var(*j),
        Slot::App(a, b) => Rep::app(assemble(slots, *a), assemble(slots, *b)),
        Slot::Abs(j, b) => Rep::abs(*j, assemble(slots, *b)),
        Slot::Pending(..) => unreachable!("all markers are rewritten"),
    }
}

/// Denoted representation of a losim term under `R_exp ∪ R_exp'`.
pub fn expand_losim(l: &LTrs, t: &LosimTerm, max_nodes: usize) -> Result<Rep, LtrsError> {
    crate::losim::check_symbols(l, t)?;
    expand_with(l, t, max_nodes, Selection::Outermost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_lambda;
    use crate::lrep::{denote, Rep};
    use crate::ltrs::{example_ltrs, Symbol};

    fn v(j: u32) -> LosimTerm {
        LosimTerm::var(j)
    }

    #[test]
    fn pure_representations_are_fixed() {
        let (l, _) = example_ltrs();
        let t = LosimTerm::abs(0, LosimTerm::abs(1, LosimTerm::app(v(1), v(0))));
        assert_eq!(
            expand_losim(&l, &t, 100).unwrap(),
            Rep::abs(0, Rep::abs(1, Rep::app(Rep::var(1), Rep::var(0))))
        );
    }

    #[test]
    fn thunk_flattens_to_left_nested_applications() {
        let (l, _) = example_ltrs();
        let t = LosimTerm::thunk(0, vec![v(0), v(1), v(2)]);
        assert_eq!(
            expand_losim(&l, &t, 100).unwrap(),
            Rep::app(Rep::app(Rep::var(0), Rep::var(1)), Rep::var(2))
        );
    }

    #[test]
    fn contract_reduct_of_the_example() {
        // thunk[1,1](g, @(h, x0)) denotes (\y.y)((\z.\w.w z) x0)
        let (l, _) = example_ltrs();
        let h_x0 = LosimTerm::app(LosimTerm::scope(Symbol::new("h"), vec![]), v(0));
        let t = LosimTerm::thunk(1, vec![LosimTerm::scope(Symbol::new("g"), vec![]), h_x0]);
        let r = expand_losim(&l, &t, 100).unwrap();
        assert_eq!(
            r,
            Rep::app(
                Rep::abs(1, Rep::var(1)),
                Rep::app(Rep::abs(1, Rep::abs(2, Rep::app(Rep::var(2), Rep::var(1)))), Rep::var(0))
            )
        );
        assert_eq!(denote(&r), parse_lambda("(\\y.y)((\\z.\\w.w z) x0)").unwrap());
    }

    #[test]
    fn named_abstraction_threads_max_index() {
        // exp_0(\x3. f()) with f = \y.y emits \x3.\x4.x4
        let l: LTrs = "@(f, y) -> y".parse().unwrap();
        let t = LosimTerm::abs(3, LosimTerm::scope(Symbol::new("f"), vec![]));
        assert_eq!(
            expand_losim(&l, &t, 100).unwrap(),
            Rep::abs(3, Rep::abs(4, Rep::var(4)))
        );
    }

    #[test]
    fn both_selections_agree_on_the_example_run() {
        let (l, s) = example_ltrs();
        let tr = crate::losim::losim_run(&l, &s, 100).unwrap();
        for step in &tr.steps {
            let a = expand_with(&l, &step.term, 1000, Selection::Outermost).unwrap();
            let b = expand_with(&l, &step.term, 1000, Selection::Innermost).unwrap();
            assert_eq!(a, b);
        }
    }
}
