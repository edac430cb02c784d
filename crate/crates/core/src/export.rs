//! JSON traces and CSV statistics.

use std::fmt::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::dag::DagStats;
use crate::lambda::BetaTrace;
use crate::losim::{LosimTrace, StepClass};
use crate::ltrs::{LTrs, Symbol};
use crate::position::Position;
use crate::repsim::RepsimTrace;

#[derive(Debug, Serialize)]
struct LosimStepOut<'a> {
    index: usize,
    class: StepClass,
    rule: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    scope: Option<&'a Symbol>,
    position: &'a Position,
    ldepth: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    term: Option<String>,
}

/// `{header: {ltrs_hash, source_term, D, ldepth_start, contracts, steps,
/// complete}, steps: [...]}`.
pub fn losim_trace_json(l: &LTrs, tr: &LosimTrace, complete: bool, include_terms: bool) -> Value {
    let steps: Vec<LosimStepOut> = tr
        .steps
        .iter()
        .map(|s| LosimStepOut {
            index: s.index,
            class: s.class(),
            rule: s.rule.id(),
            scope: s.scope.as_ref(),
            position: &s.position,
            ldepth: s.ldepth,
            term: include_terms.then(|| s.term.to_string()),
        })
        .collect();
    json!({
        "header": {
            "ltrs_hash": l.hash(),
            "source_term": tr.source.to_string(),
            "D": tr.d,
            "ldepth_start": tr.ldepth_start,
            "contracts": tr.contracts(),
            "steps": tr.len(),
            "complete": complete,
        },
        "steps": steps,
    })
}

/// Same layout for the naive representation simulator; `depth` is the
/// depth of the denoted λ-term.
pub fn repsim_trace_json(tr: &RepsimTrace, complete: bool, include_terms: bool) -> Value {
    let steps: Vec<Value> = tr
        .steps
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let mut v = json!({
                "index": k + 1,
                "class": s.class.class(),
                "rule": s.class.rule(),
                "position": s.position,
            });
            if include_terms {
                v["term"] = json!(s.term.to_string());
            }
            v
        })
        .collect();
    json!({
        "header": {
            "source_term": tr.start.to_string(),
            "contracts": tr.contracts(),
            "steps": tr.len(),
            "complete": complete,
        },
        "steps": steps,
    })
}

/// `{header: {source_term, depth_start, steps, complete}, steps: [{index,
/// position, depth, term?}]}`.
pub fn beta_trace_json(tr: &BetaTrace, complete: bool, include_terms: bool) -> Value {
    let steps: Vec<Value> = tr
        .positions
        .iter()
        .zip(&tr.terms[1..])
        .enumerate()
        .map(|(k, (p, t))| {
            let mut v = json!({"index": k + 1, "position": p, "depth": t.depth()});
            if include_terms {
                v["term"] = json!(t.to_string());
            }
            v
        })
        .collect();
    json!({
        "header": {
            "source_term": tr.start().to_string(),
            "depth_start": tr.start().depth(),
            "steps": tr.len(),
            "complete": complete,
        },
        "steps": steps,
    })
}

pub const DAG_CSV_HEADER: &str = "contract_index,node_count,search_steps,unshare_copies,cumulative_steps";

pub fn dag_stats_csv(stats: &[DagStats]) -> String {
    let mut out = String::from(DAG_CSV_HEADER);
    out.push('\n');
    for s in stats {
        writeln!(
            out,
            "{},{},{},{},{}",
            s.contract_index, s.node_count, s.search_steps, s.unshare_copies, s.cumulative_steps
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::dag_lo_simulate;
    use crate::losim::losim_run;
    use crate::ltrs::example_ltrs;

    #[test]
    fn example_trace_json() {
        let (l, s) = example_ltrs();
        let tr = losim_run(&l, &s, 100).unwrap();
        let v = losim_trace_json(&l, &tr, true, false);
        assert_eq!(v["header"]["contracts"], 2);
        assert_eq!(v["header"]["D"], 3);
        assert_eq!(v["header"]["ldepth_start"], 6);
        assert_eq!(v["header"]["source_term"], "f(g,h)");
        let steps = v["steps"].as_array().unwrap();
        assert_eq!(steps.len(), 11);
        assert_eq!(steps[0]["rule"], "init");
        assert_eq!(steps[3]["class"], "contract");
        assert_eq!(steps[3]["scope"], "g");
        assert!(steps[0].get("scope").is_none());
        assert!(steps[0].get("term").is_none());
        let with_terms = losim_trace_json(&l, &tr, true, true);
        assert_eq!(with_terms["steps"][10]["term"], "\\x0.\\x1.@(x1,x0)");
    }

    #[test]
    fn csv_layout() {
        let (l, s) = example_ltrs();
        let run = dag_lo_simulate(&l, &s, 30).unwrap();
        let csv = dag_stats_csv(&run.stats);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], DAG_CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1,"));
    }
}
