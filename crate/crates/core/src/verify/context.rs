//! Random instances of the context lemmas for ldepth.

use rand::Rng;

use crate::losim::{Ldepth, LosimTerm};
use crate::ltrs::{lambda_lift, Ctx, LTrs, Symbol};

use super::gen::{gen_term, rng_for, GenConfig};
use super::{CheckReport, Failure};

/// Largest `k` of the `(k+1)`-ary contexts.
pub const MAX_K: u32 = 3;
/// Node budget of generated terms and contexts.
pub const PIECE_SIZE: usize = 15;

struct Sig {
    symbols: Vec<(Symbol, usize)>,
}

impl Sig {
    fn of(l: &LTrs) -> Sig {
        Sig {
            symbols: l.iter().map(|(f, d)| (f.clone(), d.arity)).collect(),
        }
    }
}

/// Random context over the signature with at most `size` nodes; leaves
/// are variables `x0..x3` or, with probability `hole_p`, one of the holes
/// `1..=holes`.
fn gen_ctx(rng: &mut impl Rng, sig: &Sig, size: usize, holes: u32, hole_p: f64) -> Ctx {
    let leaf = |rng: &mut dyn rand::RngCore| {
        if holes > 0 && rng.gen_bool(hole_p) {
            Ctx::Hole(rng.gen_range(1..=holes))
        } else {
            Ctx::Var(rng.gen_range(0..4))
        }
    };
    if size <= 1 {
        let fits: Vec<_> = sig.symbols.iter().filter(|(_, k)| *k == 0).collect();
        if !fits.is_empty() && rng.gen_bool(0.3) {
            return Ctx::Scope(fits[rng.gen_range(0..fits.len())].0.clone(), vec![]);
        }
        return leaf(rng);
    }
    let fits: Vec<_> = sig.symbols.iter().filter(|(_, k)| *k < size).collect();
    if !fits.is_empty() && rng.gen_bool(0.5) {
        let (f, k) = fits[rng.gen_range(0..fits.len())];
        let share = (size - 1) / (*k).max(1);
        let args = (0..*k)
            .map(|_| {
                let n = rng.gen_range(1..=share.max(1));
                gen_ctx(rng, sig, n, holes, hole_p)
            })
            .collect();
        return Ctx::Scope(f.clone(), args);
    }
    let left = rng.gen_range(1..size);
    let a = gen_ctx(rng, sig, left, holes, hole_p);
    let right = rng.gen_range(1..=(size - left).max(1));
    let b = gen_ctx(rng, sig, right, holes, hole_p);
    Ctx::app(a, b)
}

fn gen_term_over(rng: &mut impl Rng, sig: &Sig) -> LosimTerm {
    let size = rng.gen_range(1..=PIECE_SIZE);
    close(&gen_ctx(rng, sig, size, 0, 0.0))
}

fn close(c: &Ctx) -> LosimTerm {
    c.fill(&|_| unreachable!("no holes"))
}

fn positions(c: &Ctx, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(path.clone());
    let kids: Vec<&Ctx> = match c {
        Ctx::App(a, b) => vec![a, b],
        Ctx::Scope(_, cs) => cs.iter().collect(),
        _ => vec![],
    };
    for (k, c) in kids.into_iter().enumerate() {
        path.push(k);
        positions(c, path, out);
        path.pop();
    }
}

fn replace(c: &Ctx, path: &[usize], new: Ctx) -> Ctx {
    let Some((&k, rest)) = path.split_first() else {
        return new;
    };
    match c {
        Ctx::App(a, b) if k == 0 => Ctx::app(replace(a, rest, new), (**b).clone()),
        Ctx::App(a, b) => Ctx::app((**a).clone(), replace(b, rest, new)),
        Ctx::Scope(f, cs) => {
            let mut cs = cs.clone();
            cs[k] = replace(&cs[k], rest, new);
            Ctx::Scope(f.clone(), cs)
        }
        _ => unreachable!("positions come from the context"),
    }
}

/// Context with exactly one hole.
fn gen_unary(rng: &mut impl Rng, sig: &Sig) -> Ctx {
    let n = rng.gen_range(1..=PIECE_SIZE);
    let c = gen_ctx(rng, sig, n, 0, 0.0);
    let mut ps = Vec::new();
    positions(&c, &mut Vec::new(), &mut ps);
    let p = &ps[rng.gen_range(0..ps.len())];
    replace(&c, p, Ctx::Hole(1))
}

fn mirror(t: &LosimTerm) -> LosimTerm {
    use crate::losim::LKind;
    match t.kind() {
        LKind::App([a, b]) => LosimTerm::app(mirror(b), mirror(a)),
        LKind::Scope(f, args) => LosimTerm::scope(f.clone(), args.iter().map(mirror).collect()),
        _ => t.clone(),
    }
}

/// `instances` random instances of the unary-context lemma (both the
/// inequality and the equality variant) and of the `(k+1)`-ary context
/// inequality, over λ-TRSs lifted from random closed terms.
pub fn check_context_lemmas(cfg: &GenConfig, instances: usize) -> CheckReport {
    let mut r = CheckReport::new("context-lemmas");
    for k in 0..instances {
        let seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add(k as u64);
        r.instances += 1;
        for mut f in context_instance(seed, cfg.max_size) {
            f.seed = Some(seed);
            r.fail(f);
        }
    }
    r
}

fn context_instance(seed: u64, max_size: usize) -> Vec<Failure> {
    let mut rng = rng_for(seed);
    let m = gen_term(&mut rng, max_size, true);
    let (l, _) = lambda_lift(&m).expect("closed terms lift");
    let sig = Sig::of(&l);
    let mut ld = Ldepth::new(&l).expect("lifts are finitely nested");
    let mut out = Vec::new();

    // ldepth(s) <= ldepth(t) + d  =>  ldepth(C[s]) <= ldepth(C[t]) + d
    let c = gen_unary(&mut rng, &sig);
    let s = gen_term_over(&mut rng, &sig);
    let t = gen_term_over(&mut rng, &sig);
    let (ds, dt) = (ld.of(&s), ld.of(&t));
    let d = ds.saturating_sub(dt) + rng.gen_range(0..=2);
    let (cs, ct) = (ld.of(&c.fill(&|_| s.clone())), ld.of(&c.fill(&|_| t.clone())));
    if cs > ct + d {
        out.push(Failure::labelled(
            &format!("C = {}, s = {s}, t = {t}, d = {d}", show(&c)),
            0,
            format!("<= {}", ct + d),
            cs,
        ));
    }

    // ldepth(s) = ldepth(t')  =>  ldepth(C[s]) = ldepth(C[t'])
    let t2 = (0..32)
        .map(|_| gen_term_over(&mut rng, &sig))
        .find(|u| ld.of(u) == ds)
        .unwrap_or_else(|| mirror(&s));
    let ct2 = ld.of(&c.fill(&|_| t2.clone()));
    if ld.of(&t2) != ds {
        out.push(Failure::labelled(&format!("s = {s}, t = {t2}"), 1, ds, ld.of(&t2)));
    } else if cs != ct2 {
        out.push(Failure::labelled(
            &format!("C = {}, s = {s}, t = {t2}", show(&c)),
            1,
            cs,
            ct2,
        ));
    }

    // ldepth(C[s1..sk, t]) <= max(ldepth(C[s1..sk, x]), ldepth(C[x1..xk+1]) + ldepth(t))
    let k = rng.gen_range(0..=MAX_K);
    let n = rng.gen_range(1..=PIECE_SIZE);
    let c = gen_ctx(&mut rng, &sig, n, k + 1, 0.4);
    let ss: Vec<LosimTerm> = (0..k).map(|_| gen_term_over(&mut rng, &sig)).collect();
    let t = gen_term_over(&mut rng, &sig);
    let x = LosimTerm::var(rng.gen_range(0..4));
    let full = ld.of(&c.instantiate(&ss, &t));
    let with_x = ld.of(&c.instantiate(&ss, &x));
    let vars: Vec<LosimTerm> = (0..=k).map(|j| LosimTerm::var(100 + j)).collect();
    let bare = ld.of(&c.fill(&|h| vars[h as usize - 1].clone()));
    let bound = with_x.max(bare + ld.of(&t));
    if full > bound {
        out.push(Failure::labelled(
            &format!("C = {}, s = {ss:?}, t = {t}", show(&c)),
            2,
            format!("<= {bound}"),
            full,
        ));
    }
    out
}

fn show(c: &Ctx) -> String {
    let m = c.max_hole();
    let vars: Vec<LosimTerm> = (1..=m.max(1)).map(|h| LosimTerm::var(1000 + h)).collect();
    c.fill(&|h| vars[h as usize - 1].clone()).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hundred_instances() {
        let r = check_context_lemmas(&GenConfig::new(1), 100);
        assert!(r.passed(), "{:?}", r.failures.first());
        assert_eq!(r.instances, 100);
    }

    #[test]
    fn unary_contexts_have_one_hole() {
        let mut rng = rng_for(9);
        let (l, _) = lambda_lift(&crate::lambda::parse_lambda("\\x.(\\y.y)((\\z.\\w.w z) x)").unwrap()).unwrap();
        let sig = Sig::of(&l);
        for _ in 0..50 {
            let c = gen_unary(&mut rng, &sig);
            let count = std::cell::Cell::new(0);
            c.fill(&|_| {
                count.set(count.get() + 1);
                LosimTerm::var(0)
            });
            assert_eq!(count.get(), 1);
        }
    }
}
