use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lambda::{Name, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    /// Upper bound on syntax-tree nodes. Closed terms need at least 2.
    pub max_size: usize,
    /// Step cap for traces over the generated term.
    pub max_steps: usize,
    pub closed_only: bool,
}

impl GenConfig {
    pub fn new(seed: u64) -> GenConfig {
        GenConfig {
            seed,
            max_size: 25,
            max_steps: 200,
            closed_only: true,
        }
    }
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random term of `cfg.max_size` nodes or fewer, a pure function of the
/// seed. Open terms use the free variables `x0`, `x1`, `x2`.
pub fn gen_closed_term(cfg: &GenConfig) -> Term {
    let mut rng = rng_for(cfg.seed);
    gen_term(&mut rng, cfg.max_size, cfg.closed_only)
}

pub fn gen_term(rng: &mut impl Rng, max_size: usize, closed_only: bool) -> Term {
    let min = if closed_only { 2 } else { 1 };
    let max = max_size.max(min);
    // bias towards the upper half so that most terms contain redexes
    let n = rng.gen_range(min.max(max / 2)..=max);
    let mut env = Vec::new();
    go(rng, n, &mut env, closed_only)
}

fn go(rng: &mut impl Rng, n: usize, env: &mut Vec<Name>, closed: bool) -> Term {
    let can_leaf = !env.is_empty() || !closed;
    if n == 1 {
        return leaf(rng, env, closed);
    }
    if n == 2 || rng.gen_bool(0.35) {
        let x = Name::from(format!("v{}", env.len()));
        env.push(x.clone());
        let body = go(rng, n - 1, env, closed);
        env.pop();
        return Term::abs(x, body);
    }
    // split n - 1 nodes over function and argument
    let lo = if can_leaf { 1 } else { 2 };
    if n - 1 < 2 * lo {
        let x = Name::from(format!("v{}", env.len()));
        env.push(x.clone());
        let body = go(rng, n - 1, env, closed);
        env.pop();
        return Term::abs(x, body);
    }
    let k = rng.gen_range(lo..=n - 1 - lo);
    let f = go(rng, k, env, closed);
    let a = go(rng, n - 1 - k, env, closed);
    Term::app(f, a)
}

fn leaf(rng: &mut impl Rng, env: &[Name], closed: bool) -> Term {
    if env.is_empty() || !closed && rng.gen_bool(0.2) {
        return Term::var(format!("x{}", rng.gen_range(0..3)));
    }
    Term::var(env[rng.gen_range(0..env.len())].clone())
}
