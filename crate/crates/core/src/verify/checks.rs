//! Trace-level checks for single λ-terms.

use crate::expand::expand_losim;
use crate::lambda::{
    alpha_eq, family_depth_explosion, family_size_closed, family_size_explosion, lo_reduce, BetaTrace, Term,
};
use crate::losim::{losim_run_bounded, LKind, Ldepth, LosimTerm, LosimTrace, Stop};
use crate::lrep::denote;
use crate::ltrs::{lambda_lift, LTrs};
use crate::{trace_or_partial, DEFAULT_MAX_NODES};

use super::{CheckReport, Failure};

/// Search steps allowed for a losim run before it counts as stuck.
pub const LOSIM_STEP_BUDGET: usize = 2_000_000;

fn beta(m: &Term, max_steps: usize) -> (BetaTrace, bool) {
    trace_or_partial(lo_reduce(m, max_steps))
}

/// Depth bounds on the lo β-trace of `m`:
/// `depth(M_{n+1}) <= depth(M_n) + depth(M_0)` and
/// `depth(M_n) <= (n + 1) depth(M_0)`.
pub fn check_depth_increase(m: &Term, max_steps: usize) -> CheckReport {
    let mut r = CheckReport::new("depth-increase");
    r.instances = 1;
    let (tr, _) = beta(m, max_steps);
    let d = tr.depths();
    for n in 0..d.len() {
        if d[n] > (n as u64 + 1) * d[0] {
            r.fail(Failure::new(m, n, format!("<= {}", (n as u64 + 1) * d[0]), d[n]));
        }
        if n + 1 < d.len() && d[n + 1] > d[n] + d[0] {
            r.fail(Failure::new(m, n + 1, format!("<= {}", d[n] + d[0]), d[n + 1]));
        }
    }
    r
}

/// Losim run over the lift of `m`, allowed as many contracts as the lo
/// β-trace has steps.
struct Lifted {
    l: LTrs,
    beta: BetaTrace,
    beta_complete: bool,
    trace: LosimTrace,
    stop: Stop,
}

fn lift_and_run(m: &Term, max_steps: usize) -> Result<Lifted, String> {
    let (beta, beta_complete) = beta(m, max_steps);
    let (l, s) = lambda_lift(m).map_err(|e| e.to_string())?;
    let (trace, stop) = losim_run_bounded(&l, &s, LOSIM_STEP_BUDGET, beta.len()).map_err(|e| e.to_string())?;
    Ok(Lifted {
        l,
        beta,
        beta_complete,
        trace,
        stop,
    })
}

fn denotation(l: &LTrs, t: &LosimTerm) -> Result<Term, String> {
    expand_losim(l, t, DEFAULT_MAX_NODES)
        .map(|r| denote(&r))
        .map_err(|e| e.to_string())
}

/// Search steps keep the denoted λ-term, the `i`-th contract lands on a
/// term denoting `M_i`, and contracts match the lo β-steps one to one.
pub fn check_projection_and_lifting(m: &Term, max_steps: usize) -> CheckReport {
    let mut r = CheckReport::new("projection-lifting");
    r.instances = 1;
    let run = match lift_and_run(m, max_steps) {
        Ok(run) => run,
        Err(e) => {
            r.fail(Failure::new(m, 0, "a lift and losim run", e));
            return r;
        }
    };
    let mut prev = match denotation(&run.l, &run.trace.start) {
        Ok(d) => d,
        Err(e) => {
            r.fail(Failure::new(m, 0, m.to_string(), e));
            return r;
        }
    };
    if !alpha_eq(&prev, m) {
        r.fail(Failure::new(m, 0, m.to_string(), &prev));
    }
    let mut contracts = 0;
    for step in &run.trace.steps {
        let cur = match denotation(&run.l, &step.term) {
            Ok(d) => d,
            Err(e) => {
                r.fail(Failure::new(m, step.index, "an expandable term", e));
                return r;
            }
        };
        if step.rule.is_contract() {
            contracts += 1;
            let want = &run.beta.terms[contracts];
            if !alpha_eq(&cur, want) {
                r.fail(Failure::new(m, step.index, want.to_string(), &cur));
            }
        } else if !alpha_eq(&cur, &prev) {
            r.fail(Failure::new(m, step.index, prev.to_string(), &cur));
        }
        prev = cur;
    }
    let aligned = match run.stop {
        Stop::NormalForm => run.beta_complete && contracts == run.beta.len(),
        Stop::ContractLimit => !run.beta_complete && contracts == run.beta.len(),
        Stop::StepLimit => false,
    };
    if !aligned {
        r.fail(Failure::new(
            m,
            run.trace.len(),
            format!("{} contracts ({})", run.beta.len(), if run.beta_complete { "normal form" } else { "prefix" }),
            format!("{contracts} contracts ({:?})", run.stop),
        ));
    }
    r
}

/// `a ∸ b`.
pub fn monus(a: u64, b: u64) -> u64 {
    a.saturating_sub(b)
}

/// Depth bookkeeping along the losim run of the lift of `m`: Search steps
/// keep ldepth, a Contract(f) step adds at most `ldepth(f) ∸ 2`, after `n`
/// contracts ldepth is at most `ldepth(s) + (D ∸ 2) n`, `D <= depth(m)`,
/// and the root instance of every contract obeys the signed bound
/// `ldepth(F[as, b]) <= ldepth(@(f(as), b)) + ldepth(f) - 2`.
pub fn check_depth_bounds_losim(m: &Term, max_steps: usize) -> CheckReport {
    depth_bounds(m, max_steps, false)
}

/// Clause-based ldepth against the depth of the expanded representation,
/// on every term of the run.
pub fn check_ldepth_cross(m: &Term, max_steps: usize) -> CheckReport {
    depth_bounds(m, max_steps, true)
}

fn depth_bounds(m: &Term, max_steps: usize, cross: bool) -> CheckReport {
    let mut r = CheckReport::new(if cross { "ldepth-cross-check" } else { "depth-bounds" });
    r.instances = 1;
    let run = match lift_and_run(m, max_steps) {
        Ok(run) => run,
        Err(e) => {
            r.fail(Failure::new(m, 0, "a lift and losim run", e));
            return r;
        }
    };
    let mut ld = Ldepth::new(&run.l).expect("lifts are finitely nested");
    let tr = &run.trace;
    if cross {
        let mut terms = vec![&tr.start];
        terms.extend(tr.steps.iter().map(|s| &s.term));
        for (k, t) in terms.into_iter().enumerate() {
            match expand_losim(&run.l, t, DEFAULT_MAX_NODES) {
                Ok(rep) if rep.depth() == ld.of(t) => {}
                Ok(rep) => r.fail(Failure::new(m, k, rep.depth(), ld.of(t))),
                Err(e) => r.fail(Failure::new(m, k, "an expandable term", e)),
            }
        }
        return r;
    }
    let d_l = tr.d;
    if d_l > m.depth() {
        r.fail(Failure::new(m, 0, format!("D <= {}", m.depth()), d_l));
    }
    if tr.ldepth_start != m.depth() {
        r.fail(Failure::new(m, 0, m.depth(), tr.ldepth_start));
    }
    let mut prev_term = &tr.start;
    let mut prev = tr.ldepth_start;
    let mut n = 0u64;
    for step in &tr.steps {
        let cur = step.ldepth;
        match &step.scope {
            Some(f) if step.rule.is_contract() => {
                n += 1;
                let lf = ld.scope(f).expect("scope of a step is declared");
                if cur > prev + monus(lf, 2) {
                    r.fail(Failure::new(m, step.index, format!("<= {}", prev + monus(lf, 2)), cur));
                }
                if let Some(e) = root_contract_bound(&run.l, &mut ld, prev_term, &step.position) {
                    r.fail(Failure::new(m, step.index, e.0, e.1));
                }
            }
            _ => {
                if cur != prev {
                    r.fail(Failure::new(m, step.index, prev, cur));
                }
            }
        }
        let bound = tr.ldepth_start + monus(d_l, 2) * n;
        if cur > bound {
            r.fail(Failure::new(m, step.index, format!("<= {bound}"), cur));
        }
        prev = cur;
        prev_term = &step.term;
    }
    r
}

/// Contract steps of the losim run over the lift of `m` that raise ldepth
/// by more than the signed `ldepth(f) - 2`. Only possible when
/// `ldepth(f) < 2` and the maximum sits outside the redex.
pub fn signed_contract_excess(m: &Term, max_steps: usize) -> usize {
    let Ok(run) = lift_and_run(m, max_steps) else {
        return 0;
    };
    let ld = Ldepth::new(&run.l).expect("lifts are finitely nested");
    let mut prev = run.trace.ldepth_start as i64;
    let mut count = 0;
    for step in &run.trace.steps {
        let cur = step.ldepth as i64;
        if let (Some(f), true) = (&step.scope, step.rule.is_contract()) {
            let lf = ld.scope(f).expect("scope of a step is declared") as i64;
            count += usize::from(cur > prev + lf - 2);
        }
        prev = cur;
    }
    count
}

/// The contract redex `thunk(f(as), b1, ...)` at `pos` of `t`, checked as
/// the root step `@(f(as), b1) -> F[as, b1]`.
fn root_contract_bound(
    l: &LTrs,
    ld: &mut Ldepth,
    t: &LosimTerm,
    pos: &crate::Position,
) -> Option<(String, String)> {
    let redex = t.subterm(pos.as_slice())?;
    let LKind::Thunk(_, args) = redex.kind() else {
        return Some(("a thunk redex".into(), redex.to_string()));
    };
    let LKind::Scope(f, as_) = args[0].kind() else {
        return Some(("a scope head".into(), redex.to_string()));
    };
    let def = l.get(f)?;
    let before = ld.of(&LosimTerm::app(args[0].clone(), args[1].clone())) as i64;
    let after = ld.of(&def.ctx.instantiate(as_, &args[1])) as i64;
    let lf = ld.scope(f).ok()? as i64;
    (after > before + lf - 2).then(|| (format!("<= {}", before + lf - 2), after.to_string()))
}

/// Laws of the depth-exploding family for `i <= max_i` and of the
/// size-exploding family for `n <= max_i`, plus the depth bound on lo
/// traces from the closed wrappers `\x.A_i`.
pub fn check_families(max_i: u32, max_steps: usize) -> CheckReport {
    let mut r = CheckReport::new("families");
    for i in 0..=max_i {
        r.instances += 1;
        let fam = family_depth_explosion(i);
        let label = format!("A_{i}");
        let want_a = if i == 0 { 1 } else { 3 * (u64::from(i) + 1) };
        if fam.a.depth() != want_a {
            r.fail(Failure::labelled(&label, 0, want_a, fam.a.depth()));
        }
        if fam.b.depth() != 1u64 << i {
            r.fail(Failure::labelled(&format!("B_{i}"), 0, 1u64 << i, fam.b.depth()));
        }
        if fam.inside_out.len() != 4 * i as usize {
            r.fail(Failure::labelled(&label, 0, 4 * i, fam.inside_out.len()));
        }
        if let Err(e) = fam.inside_out.validate() {
            r.fail(Failure::labelled(&label, 0, "a valid β-trace", e));
        }
        if !alpha_eq(fam.inside_out.last(), &fam.b) {
            r.fail(Failure::labelled(&label, fam.inside_out.len(), "B_i", "a different term"));
        }
        let wrapped = Term::abs("x", fam.a.clone());
        for f in check_depth_increase(&wrapped, max_steps).failures {
            r.fail(Failure { term: format!("\\x.{label}"), ..f });
        }

        r.instances += 1;
        let (a, b) = family_size_explosion(i);
        let label = format!("A'_{i}");
        let (tr, complete) = beta(&a, max_steps);
        if !complete || tr.len() != i as usize {
            r.fail(Failure::labelled(&label, tr.len(), i, tr.len()));
        }
        if !alpha_eq(tr.last(), &b) {
            r.fail(Failure::labelled(&label, tr.len(), "B'_n", "a different term"));
        }
        if b.app_count() < 1u64 << i {
            r.fail(Failure::labelled(&format!("B'_{i}"), 0, format!(">= {} applications", 1u64 << i), b.app_count()));
        }
        let closed = family_size_closed(i);
        for f in check_depth_increase(&closed, max_steps).failures {
            r.fail(Failure { term: format!("\\y.\\x.{label}"), ..f });
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_lambda;

    fn p(s: &str) -> Term {
        parse_lambda(s).unwrap()
    }

    const M: &str = "\\x.(\\y.y)((\\z.\\w.w z) x)";

    #[test]
    fn running_example_passes_everything() {
        let m = p(M);
        for r in [
            check_depth_increase(&m, 200),
            check_projection_and_lifting(&m, 200),
            check_depth_bounds_losim(&m, 200),
            check_ldepth_cross(&m, 200),
        ] {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn family_member_a3_satisfies_the_bound() {
        let a3 = Term::abs("x", family_depth_explosion(3).a);
        assert!(check_depth_increase(&a3, 200).passed());
    }

    #[test]
    fn normal_forms_pass_trivially() {
        let i = p("\\x.x");
        assert!(check_depth_increase(&i, 200).passed());
        assert!(check_projection_and_lifting(&i, 200).passed());
        assert!(check_depth_bounds_losim(&i, 200).passed());
    }

    #[test]
    fn identity_scopes_only() {
        // D = 1: every scope has ldepth 1, the contract bound is read as 1 ∸ 2 = 0
        let t = p("(\\a.a)(\\b.b)((\\c.c)(\\d.d))");
        let r = check_depth_bounds_losim(&t, 200);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn divergent_terms_check_prefixes() {
        let omega = p("\\v.(\\x.x x)(\\x.x x)");
        assert!(check_projection_and_lifting(&omega, 30).passed());
        assert!(check_depth_bounds_losim(&omega, 30).passed());
    }

    #[test]
    fn families_up_to_six() {
        let r = check_families(6, 200);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.instances, 14);
    }
}
