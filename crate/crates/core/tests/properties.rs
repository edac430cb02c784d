use proptest::prelude::*;

use losim_core::dag::{dag_lo_simulate, to_dag};
use losim_core::expand::{expand_with, Selection};
use losim_core::lambda::{alpha_eq, lo_reduce, substitute, Term};
use losim_core::losim::{ldepth, losim_run, LosimTerm};
use losim_core::lrep::{denote, rep_of, var_name};
use losim_core::ltrs::lambda_lift;
use losim_core::repsim::{final_rep, repsim_run, subst_meta};
use losim_core::verify::{gen_closed_term, gen_term, rng_for, GenConfig};
use losim_core::DEFAULT_MAX_NODES;

fn closed(seed: u64, max_size: usize) -> Term {
    gen_closed_term(&GenConfig {
        max_size,
        ..GenConfig::new(seed)
    })
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn generator_is_a_pure_function_of_the_seed(seed in any::<u64>(), size in 1usize..40) {
        let t = closed(seed, size);
        prop_assert_eq!(&t, &closed(seed, size));
        prop_assert!(t.is_closed());
        prop_assert!(t.size() <= size.max(2) as u64);
    }

    #[test]
    fn simulators_agree_with_beta(seed in any::<u64>()) {
        let m = closed(seed, 15);
        let Ok(beta) = lo_reduce(&m, 40) else { return Ok(()) };
        let nf = beta.last();

        let (l, s) = lambda_lift(&m).unwrap();
        let tr = losim_run(&l, &s, 1_000_000).unwrap();
        prop_assert_eq!(tr.contracts(), beta.len());
        let rep = losim_core::expand::expand_losim(&l, tr.last(), DEFAULT_MAX_NODES).unwrap();
        prop_assert!(alpha_eq(&denote(&rep), nf));

        let rt = repsim_run(&rep_of(&m).unwrap(), 1_000_000).unwrap();
        prop_assert_eq!(rt.contracts(), beta.len());
        prop_assert!(alpha_eq(&denote(&final_rep(&rt).unwrap()), nf));
    }

    #[test]
    fn shared_graph_reads_back_every_reduct(seed in any::<u64>()) {
        let m = closed(seed, 15);
        let (l, s) = lambda_lift(&m).unwrap();
        let tr = match losim_run(&l, &s, 300) {
            Ok(tr) => tr,
            Err(e) => match e {
                losim_core::losim::LosimRunError::StepLimit(e) => e.partial,
                e => return Err(TestCaseError::fail(e.to_string())),
            },
        };
        for t in std::iter::once(&tr.start).chain(tr.steps.iter().map(|s| &s.term)) {
            let g = to_dag(t);
            prop_assert_eq!(&g.readback(), t);
            prop_assert!(g.audit().is_ok());
            prop_assert!(g.node_count() as u64 <= t.size());
        }
    }

    #[test]
    fn dag_run_ends_where_the_term_run_ends(seed in any::<u64>()) {
        let m = closed(seed, 15);
        let (l, s) = lambda_lift(&m).unwrap();
        let Ok(tr) = losim_run(&l, &s, 100_000) else { return Ok(()) };
        let run = dag_lo_simulate(&l, &s, 10_000).unwrap();
        prop_assert_eq!(run.stats.len(), tr.contracts());
        prop_assert_eq!(run.steps as usize, tr.len());
        prop_assert_eq!(&run.graph.readback(), tr.last());
    }

    #[test]
    fn ldepth_is_the_depth_of_the_expansion(seed in any::<u64>()) {
        let m = closed(seed, 25);
        let (l, s) = lambda_lift(&m).unwrap();
        let t = LosimTerm::from(&s);
        let out = expand_with(&l, &t, DEFAULT_MAX_NODES, Selection::Outermost).unwrap();
        prop_assert_eq!(&out, &expand_with(&l, &t, DEFAULT_MAX_NODES, Selection::Innermost).unwrap());
        prop_assert_eq!(ldepth(&l, &t).unwrap(), out.depth());
        prop_assert_eq!(out.depth(), m.depth());
        prop_assert!(alpha_eq(&denote(&out), &m));
    }

    #[test]
    fn meta_substitution_is_capture_avoiding(seed in any::<u64>(), j in 0u32..3) {
        let mut rng = rng_for(seed);
        let body = gen_term(&mut rng, 12, false);
        let arg = gen_term(&mut rng, 8, false);
        let (rb, ra) = (rep_of(&body).unwrap(), rep_of(&arg).unwrap());
        let got = denote(&subst_meta(&rb, j, &ra));
        let want = substitute(&denote(&rb), &var_name(j), &denote(&ra));
        prop_assert!(alpha_eq(&got, &want), "{} vs {}", got, want);
    }
}
