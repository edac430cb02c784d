use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use losim_core::dag::dag_lo_simulate;
use losim_core::lambda::family_size_closed;
use losim_core::losim::losim_run_bounded;
use losim_core::ltrs::lambda_lift;
use losim_core::par::Parallelism;
use losim_core::verify::{run_check, SuiteConfig};

/// Seed batches of the verification suite, rayon against one thread.
fn verify_corpus(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    for check in ["projection-lifting", "ldepth-cross-check", "context-lemmas"] {
        for (label, mode) in [("parallel", Parallelism::Auto), ("sequential", Parallelism::Sequential)] {
            let cfg = SuiteConfig {
                parallelism: mode,
                ..SuiteConfig::default_suite()
            };
            g.bench_with_input(BenchmarkId::new(check, label), &cfg, |b, cfg| {
                b.iter(|| black_box(run_check(check, cfg)))
            });
        }
    }
    g.finish();
}

/// Shared graph against term-level losim on the size-exploding family.
fn size_family(c: &mut Criterion) {
    let mut g = c.benchmark_group("size-family");
    g.sample_size(10);
    for n in [6u32, 8, 10] {
        let (l, s) = lambda_lift(&family_size_closed(n)).unwrap();
        g.bench_with_input(BenchmarkId::new("dag", n), &n, |b, &n| {
            b.iter(|| black_box(dag_lo_simulate(&l, &s, n as usize).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("term", n), &n, |b, &n| {
            b.iter(|| black_box(losim_run_bounded(&l, &s, usize::MAX, n as usize).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, verify_corpus, size_family);
criterion_main!(benches);
