//! The shared-graph evaluator against the term-level losim run, and the
//! growth trends over the size-exploding family.

use serde::Serialize;

use crate::dag::{dag_lo_simulate_with, DagError};
use crate::lambda::{family_size_closed, Term};
use crate::losim::{losim_run_bounded, Stop};
use crate::ltrs::{lambda_lift, LTrs, LTrsTerm};

use super::checks::LOSIM_STEP_BUDGET;
use super::{CheckReport, Failure};

/// Readback after the `k`-th contract equals the term-level reduct after
/// its `k`-th contract, step counts agree, and the graph stays maximally
/// shared with exact reference counts.
pub fn check_dag_oracle(label: &str, l: &LTrs, s: &LTrsTerm, max_contracts: usize) -> CheckReport {
    let mut r = CheckReport::new("dag-oracle");
    r.instances = 1;
    let (tr, stop) = match losim_run_bounded(l, s, LOSIM_STEP_BUDGET, max_contracts) {
        Ok(x) => x,
        Err(e) => {
            r.fail(Failure::labelled(label, 0, "a losim run", e));
            return r;
        }
    };
    let want: Vec<_> = tr.contract_terms().collect();
    let mut got = Vec::new();
    let res = dag_lo_simulate_with(l, s, max_contracts, |k, g| {
        got.push((k, g.readback(), g.audit()));
    });
    let run = match (res, stop) {
        (Ok(run), Stop::NormalForm) => run,
        (Err(DagError::ContractLimit(e)), Stop::ContractLimit) => e.partial,
        (Err(DagError::ContractLimit(e)), Stop::StepLimit) => e.partial,
        (Ok(run), Stop::StepLimit) => run,
        (res, stop) => {
            r.fail(Failure::labelled(label, 0, format!("{stop:?}"), format!("{:?}", res.map(|r| r.stats.len()))));
            return r;
        }
    };
    if stop != Stop::StepLimit && got.len() != want.len() {
        r.fail(Failure::labelled(label, 0, format!("{} contracts", want.len()), got.len()));
    }
    for (((k, term, audit), w), stats) in got.iter().zip(&want).zip(&run.stats) {
        if *term != w.term {
            r.fail(Failure::labelled(label, w.index, w.term.to_string(), term));
        }
        if let Err(e) = audit {
            r.fail(Failure::labelled(label, w.index, "an exactly shared graph", e));
        }
        if stats.cumulative_steps != w.index as u64 {
            r.fail(Failure::labelled(label, w.index, w.index, stats.cumulative_steps));
        }
        debug_assert_eq!(*k, stats.contract_index);
    }
    if stop == Stop::NormalForm && run.graph.readback() != *tr.last() {
        r.fail(Failure::labelled(label, tr.len(), tr.last().to_string(), run.graph.readback()));
    }
    r
}

pub fn check_dag_oracle_term(label: &str, m: &Term, max_contracts: usize) -> CheckReport {
    match lambda_lift(m) {
        Ok((l, s)) => check_dag_oracle(label, &l, &s, max_contracts),
        Err(e) => {
            let mut r = CheckReport::new("dag-oracle");
            r.instances = 1;
            r.fail(Failure::labelled(label, 0, "a closed term", e));
            r
        }
    }
}

/// One row of the size-family measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrendRow {
    pub n: u32,
    pub node_count: usize,
    pub cumulative_steps: u64,
    /// Unshared size of the graph after `n` contracts.
    pub tree_size: u64,
    /// Size of the term-level losim reduct after `n` contracts.
    pub term_size: u64,
}

pub fn measure_size_family(ns: impl IntoIterator<Item = u32>) -> Result<Vec<TrendRow>, String> {
    ns.into_iter()
        .map(|n| {
            let (l, s) = lambda_lift(&family_size_closed(n)).map_err(|e| e.to_string())?;
            let mut tree_size = 0;
            let run = dag_lo_simulate_with(&l, &s, n as usize, |k, g| {
                if k == n as usize {
                    tree_size = g.tree_size();
                }
            })
            .map_err(|e| e.to_string())?;
            let at = run
                .stats
                .get(n as usize - 1)
                .ok_or_else(|| format!("A'_{n} ran {} contracts", run.stats.len()))?;
            let (tr, _) = losim_run_bounded(&l, &s, LOSIM_STEP_BUDGET, n as usize).map_err(|e| e.to_string())?;
            let term_size = tr.contract_terms().last().map_or(0, |s| s.term.size());
            Ok(TrendRow {
                n,
                node_count: at.node_count,
                cumulative_steps: at.cumulative_steps,
                tree_size,
                term_size,
            })
        })
        .collect()
}

/// Least-squares fit of `y = a x + b`.
pub fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let a = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (a, my - a * mx)
}

/// Fits `y = a n^deg + b` on `fit` and checks `y <= (1 + slack) (a n^deg + b)`
/// on `validate`. Returns the coefficients and the verdict.
pub fn trend_holds(rows: &[(u32, f64)], deg: i32, fit: &[u32], validate: &[u32], slack: f64) -> (f64, f64, bool) {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(n, _)| fit.contains(n))
        .map(|(n, y)| (f64::from(*n).powi(deg), *y))
        .collect();
    let (a, b) = fit_line(&pts);
    let ok = rows
        .iter()
        .filter(|(n, _)| validate.contains(n))
        .all(|(n, y)| *y <= (1.0 + slack) * (a * f64::from(*n).powi(deg) + b));
    (a, b, ok)
}

/// Size family `n = 4..=10`: live nodes after `n` contracts within a
/// quadratic fitted on `n = 4..=7`, cumulative steps within a cubic fitted
/// the same way (10% slack on `n = 8..=10`), and unshared size above `2^n`.
pub fn check_dag_trends() -> CheckReport {
    let mut r = CheckReport::new("dag-trends");
    let rows = match measure_size_family(4..=10) {
        Ok(rows) => rows,
        Err(e) => {
            r.fail(Failure::labelled("A'_n", 0, "a complete run", e));
            return r;
        }
    };
    r.instances = rows.len();
    let fit = [4, 5, 6, 7];
    let validate = [8, 9, 10];
    let nodes: Vec<(u32, f64)> = rows.iter().map(|t| (t.n, t.node_count as f64)).collect();
    let (a, b, ok) = trend_holds(&nodes, 2, &fit, &validate, 0.1);
    if !ok {
        r.fail(Failure::labelled("node_count", 0, format!("<= 1.1 ({a:.3} n^2 + {b:.3})"), format!("{nodes:?}")));
    }
    let steps: Vec<(u32, f64)> = rows.iter().map(|t| (t.n, t.cumulative_steps as f64)).collect();
    let (a, b, ok) = trend_holds(&steps, 3, &fit, &validate, 0.1);
    if !ok {
        r.fail(Failure::labelled("cumulative_steps", 0, format!("<= 1.1 ({a:.3} n^3 + {b:.3})"), format!("{steps:?}")));
    }
    for t in &rows {
        let label = format!("A'_{}", t.n);
        if t.tree_size <= 1 << t.n || t.term_size <= 1 << t.n {
            r.fail(Failure::labelled(
                &label,
                t.n as usize,
                format!("> {}", 1u64 << t.n),
                format!("graph {} / term {}", t.tree_size, t.term_size),
            ));
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_lambda;
    use crate::ltrs::example_ltrs;

    #[test]
    fn example_fixture() {
        let (l, s) = example_ltrs();
        let r = check_dag_oracle("example", &l, &s, 30);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn divergent_term_stops_at_the_contract_limit() {
        let r = check_dag_oracle_term("omega", &parse_lambda("(\\x.x x x)(\\x.x x x)").unwrap(), 10);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn line_fit() {
        let (a, b) = fit_line(&[(1.0, 3.0), (2.0, 5.0), (3.0, 7.0)]);
        assert!((a - 2.0).abs() < 1e-9 && (b - 1.0).abs() < 1e-9);
    }

    #[test]
    fn trends_hold() {
        let r = check_dag_trends();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn golden_node_count_for_a8() {
        let rows = measure_size_family([8]).unwrap();
        assert_eq!(rows[0].node_count, 22);
        assert_eq!(rows[0].tree_size, 2047);
    }
}
