//! Executable checks of the depth bounds, the projection/lifting
//! correspondence, the context lemmas, the term families and the shared
//! graph evaluator, over seeded random corpora.

mod checks;
mod context;
mod dag;
mod gen;

use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::lambda::{family_depth_explosion, family_size_closed, parse_lambda, Term};
use crate::ltrs::example_ltrs;
use crate::par::{self, Parallelism};

pub use checks::{
    check_depth_bounds_losim, check_families, check_ldepth_cross, check_projection_and_lifting,
    check_depth_increase, monus, signed_contract_excess, LOSIM_STEP_BUDGET,
};
pub use context::check_context_lemmas;
pub use dag::{
    check_dag_oracle, check_dag_oracle_term, check_dag_trends, fit_line, measure_size_family, trend_holds,
    TrendRow,
};
pub use gen::{gen_closed_term, gen_term, rng_for, GenConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub term: String,
    pub step: usize,
    pub expected: String,
    pub actual: String,
}

impl Failure {
    pub fn new(m: &Term, step: usize, expected: impl fmt::Display, actual: impl fmt::Display) -> Failure {
        Failure::labelled(&m.to_string(), step, expected, actual)
    }

    pub fn labelled(term: &str, step: usize, expected: impl fmt::Display, actual: impl fmt::Display) -> Failure {
        Failure {
            seed: None,
            term: term.to_string(),
            step,
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub instances: usize,
    pub failures: Vec<Failure>,
    /// Wall time; left out of serialized reports unless asked for.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

impl CheckReport {
    pub fn new(check: &str) -> CheckReport {
        CheckReport {
            check: check.to_string(),
            instances: 0,
            failures: Vec::new(),
            millis: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn fail(&mut self, f: Failure) {
        self.failures.push(f);
    }

    /// Sums instances and concatenates failures, in argument order.
    pub fn merge(check: &str, parts: impl IntoIterator<Item = CheckReport>) -> CheckReport {
        let mut out = CheckReport::new(check);
        for p in parts {
            out.instances += p.instances;
            out.failures.extend(p.failures);
        }
        out
    }

    fn with_seed(mut self, seed: u64) -> CheckReport {
        for f in &mut self.failures {
            f.seed.get_or_insert(seed);
        }
        self
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} instances={} failures={}", self.check, self.instances, self.failures.len())?;
        if let Some(ms) = self.millis {
            write!(f, " millis={ms}")?;
        }
        for x in self.failures.iter().take(5) {
            write!(f, "\n  ")?;
            if let Some(s) = x.seed {
                write!(f, "seed {s}: ")?;
            }
            write!(f, "{} at step {}: expected {}, got {}", x.term, x.step, x.expected, x.actual)?;
        }
        if self.failures.len() > 5 {
            write!(f, "\n  ... {} more", self.failures.len() - 5)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    /// First corpus seed; the corpus is `seed .. seed + seeds`.
    pub seed: u64,
    pub seeds: u64,
    pub max_size: usize,
    pub max_steps: usize,
    pub max_i: u32,
    pub context_instances: usize,
    pub dag_seeds: u64,
    pub max_contracts: usize,
    pub parallelism: Parallelism,
}

impl SuiteConfig {
    pub fn default_suite() -> SuiteConfig {
        SuiteConfig {
            seed: 1,
            seeds: 50,
            max_size: 25,
            max_steps: 200,
            max_i: 10,
            context_instances: 500,
            dag_seeds: 20,
            max_contracts: 30,
            parallelism: Parallelism::Auto,
        }
    }

    pub fn quick() -> SuiteConfig {
        SuiteConfig {
            seeds: 10,
            max_i: 6,
            context_instances: 100,
            dag_seeds: 5,
            ..SuiteConfig::default_suite()
        }
    }

    pub fn named(name: &str) -> Option<SuiteConfig> {
        match name {
            "default" => Some(SuiteConfig::default_suite()),
            "quick" => Some(SuiteConfig::quick()),
            _ => None,
        }
    }

    fn gen(&self, seed: u64) -> GenConfig {
        GenConfig {
            seed,
            max_size: self.max_size,
            max_steps: self.max_steps,
            closed_only: true,
        }
    }

    /// The random corpus, in seed order.
    pub fn corpus(&self) -> Vec<(u64, Term)> {
        (self.seed..self.seed + self.seeds)
            .map(|s| (s, gen_closed_term(&self.gen(s))))
            .collect()
    }
}

pub const CHECKS: [&str; 8] = [
    "depth-increase",
    "projection-lifting",
    "depth-bounds",
    "ldepth-cross-check",
    "context-lemmas",
    "families",
    "dag-oracle",
    "dag-trends",
];

/// Hand-written fixtures shared by the checks.
pub fn fixtures() -> Vec<(&'static str, Term)> {
    let p = |s: &str| parse_lambda(s).expect("fixture parses");
    vec![
        ("M", p("\\x.(\\y.y)((\\z.\\w.w z) x)")),
        ("I", p("\\x.x")),
        ("K I I", p("(\\a.\\b.a) (\\x.x) (\\y.y)")),
        ("two two", p("(\\f.\\x.f (f x)) (\\f.\\x.f (f x))")),
        ("omega-prefix", p("\\v.(\\x.x x)(\\x.x x)")),
        ("S K K", p("(\\x.\\y.\\z.x z (y z)) (\\a.\\b.a) (\\a.\\b.a)")),
        ("A_2", Term::abs("x", family_depth_explosion(2).a)),
        ("A'_5", family_size_closed(5)),
    ]
}

/// Runs the named check over the suite configuration.
pub fn run_check(name: &str, cfg: &SuiteConfig) -> Option<CheckReport> {
    let started = Instant::now();
    let per_term = |f: fn(&Term, usize) -> CheckReport| {
        let corpus = cfg.corpus();
        let parts = par::map(&corpus, cfg.parallelism, |(s, m)| f(m, cfg.max_steps).with_seed(*s));
        let fixed = fixtures().into_iter().map(|(_, m)| f(&m, cfg.max_steps));
        CheckReport::merge(name, fixed.chain(parts))
    };
    let mut r = match name {
        "depth-increase" => per_term(check_depth_increase),
        "projection-lifting" => per_term(check_projection_and_lifting),
        "depth-bounds" => per_term(check_depth_bounds_losim),
        "ldepth-cross-check" => per_term(check_ldepth_cross),
        "context-lemmas" => {
            // instances split into seed-sized chunks so they can run in parallel
            let chunks: Vec<u64> = (0..cfg.context_instances as u64).collect();
            let parts = par::map(&chunks, cfg.parallelism, |k| {
                check_context_lemmas(&GenConfig { seed: cfg.seed.wrapping_add(*k), ..cfg.gen(cfg.seed) }, 1)
            });
            CheckReport::merge(name, parts)
        }
        "families" => check_families(cfg.max_i, cfg.max_steps),
        "dag-oracle" => {
            let mut items: Vec<(String, Term)> =
                fixtures().into_iter().map(|(l, m)| (l.to_string(), m)).collect();
            items.extend((cfg.seed..cfg.seed + cfg.dag_seeds).map(|s| (format!("seed {s}"), gen_closed_term(&cfg.gen(s)))));
            let parts = par::map(&items, cfg.parallelism, |(l, m)| check_dag_oracle_term(l, m, cfg.max_contracts));
            let (l, s) = example_ltrs();
            let example = check_dag_oracle("example λ-TRS", &l, &s, cfg.max_contracts);
            CheckReport::merge(name, std::iter::once(example).chain(parts))
        }
        "dag-trends" => check_dag_trends(),
        _ => return None,
    };
    r.millis = Some(started.elapsed().as_millis() as u64);
    Some(r)
}

/// Every check, in [`CHECKS`] order.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<CheckReport> {
    CHECKS.iter().map(|c| run_check(c, cfg).expect("known check")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes_and_is_deterministic() {
        let cfg = SuiteConfig {
            seeds: 4,
            context_instances: 20,
            dag_seeds: 2,
            max_i: 4,
            ..SuiteConfig::quick()
        };
        let strip = |rs: Vec<CheckReport>| {
            rs.into_iter()
                .map(|mut r| {
                    r.millis = None;
                    r
                })
                .collect::<Vec<_>>()
        };
        let a = strip(run_suite(&cfg));
        for r in &a {
            assert!(r.passed(), "{r}");
        }
        let seq = SuiteConfig {
            parallelism: Parallelism::Sequential,
            ..cfg
        };
        assert_eq!(a, strip(run_suite(&seq)));
    }

    #[test]
    fn unknown_check() {
        assert!(run_check("nope", &SuiteConfig::quick()).is_none());
    }

    #[test]
    fn merge_keeps_order() {
        let mut a = CheckReport::new("x");
        a.instances = 1;
        a.fail(Failure::labelled("a", 0, 1, 2));
        let mut b = CheckReport::new("x");
        b.instances = 2;
        b.fail(Failure::labelled("b", 0, 1, 2));
        let m = CheckReport::merge("x", [a, b]);
        assert_eq!(m.instances, 3);
        assert_eq!(m.failures[0].term, "a");
    }
}
