//! `losim`: parse, lift, expand and reduce λ-terms, export traces and run
//! the verification suite.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use losim_core::dag::{dag_lo_simulate, DagError};
use losim_core::expand::expand_losim;
use losim_core::export::{beta_trace_json, dag_stats_csv, losim_trace_json, repsim_trace_json};
use losim_core::lambda::{alpha_eq, family_depth_explosion, family_size_explosion, lo_reduce, parse_lambda, Term};
use losim_core::losim::{losim_run_bounded, Stop};
use losim_core::lrep::rep_of;
use losim_core::ltrs::{expand, lambda_lift, LTrs, LTrsTerm};
use losim_core::par::Parallelism;
use losim_core::repsim::{final_rep, repsim_run};
use losim_core::verify::{run_check, SuiteConfig, CHECKS};
use losim_core::{trace_or_partial, DEFAULT_MAX_NODES};

#[derive(Parser)]
#[command(name = "losim", version, about = "Leftmost-outermost β-reduction via λ-TRS simulation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the canonical form and depth of a λ-term.
    Parse {
        #[command(flatten)]
        input: TermInput,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// Lambda-lift a closed λ-term; prints the λ-TRS and the start term.
    Lift {
        #[command(flatten)]
        input: TermInput,
    },
    /// Print the λ-term representation denoted by a λ-TRS term.
    Expand {
        #[command(flatten)]
        input: Source,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// Leftmost-outermost β-reduction.
    RunBeta {
        #[command(flatten)]
        input: TermInput,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Naive simulation on λ-term representations.
    RunRepsim {
        #[command(flatten)]
        input: TermInput,
        #[command(flatten)]
        run: RunOpts,
    },
    /// The losim-TRS run on a λ-TRS term.
    RunLosim {
        #[command(flatten)]
        input: Source,
        #[command(flatten)]
        run: RunOpts,
        /// Stop in front of contract number N+1.
        #[arg(long, value_name = "N")]
        max_contracts: Option<usize>,
        /// Compare every step's ldepth with the depth of its expansion.
        #[arg(long)]
        cross_check_ldepth: bool,
    },
    /// The losim strategy on a maximally shared graph; prints per-contract stats.
    RunDag {
        #[command(flatten)]
        input: Source,
        #[arg(long, value_name = "N", default_value_t = 1000)]
        max_contracts: usize,
        #[arg(long, value_enum, default_value_t = Emit::Csv)]
        emit: Emit,
        /// Also print the final readback.
        #[arg(long)]
        include_terms: bool,
    },
    /// Run the verification suite, or selected checks of it.
    Verify {
        #[arg(long, default_value = "default", value_parser = ["default", "quick"])]
        suite: String,
        /// Run only this check (repeatable).
        #[arg(long = "check", value_name = "NAME", value_parser = CHECKS)]
        checks: Vec<String>,
        /// First corpus seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
        /// Report wall time per check (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
        /// Run seeds on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Members of the depth- and size-exploding families.
    Family {
        #[arg(value_enum)]
        which: Family,
        #[arg(long, value_name = "N")]
        i: u32,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
        #[arg(long)]
        include_terms: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct TermInput {
    /// Inline λ-term, e.g. '\x.x'.
    term: Option<String>,
    /// Read the λ-term from a file.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct Source {
    /// Inline λ-term (lambda-lifted before the run).
    #[arg(group = "source")]
    term: Option<String>,
    /// Read the λ-term from a file.
    #[arg(long, value_name = "PATH", group = "source")]
    file: Option<PathBuf>,
    /// Read a λ-TRS instead; needs --start.
    #[arg(long, value_name = "PATH", group = "source", requires = "start")]
    ltrs: Option<PathBuf>,
    /// Start term over the λ-TRS given by --ltrs.
    #[arg(long, value_name = "TERM", requires = "ltrs")]
    start: Option<String>,
}

#[derive(Args)]
struct RunOpts {
    #[arg(long, value_name = "N", default_value_t = 10_000)]
    max_steps: usize,
    #[arg(long, value_enum, default_value_t = Emit::Text)]
    emit: Emit,
    /// Print every intermediate term.
    #[arg(long)]
    include_terms: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Depth,
    Size,
}

enum Error {
    Usage(anyhow::Error),
    Failed(anyhow::Error),
}

impl From<anyhow::Error> for Error {
    fn from(e: anyhow::Error) -> Self {
        Error::Failed(e)
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Error {
    Error::Usage(e.into())
}

/// Output plus whether the command succeeded.
type Outcome = Result<(String, bool), Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok((out, ok)) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(Error::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Error::Failed(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn max_nodes() -> Result<usize, Error> {
    match std::env::var("LOSIM_MAX_NODES") {
        Ok(v) => v.trim().parse().map_err(|_| usage(anyhow!("LOSIM_MAX_NODES must be a number, got `{v}`"))),
        Err(_) => Ok(DEFAULT_MAX_NODES),
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)
}

fn lambda(term: &Option<String>, file: &Option<PathBuf>) -> Result<Term, Error> {
    let text = match (term, file) {
        (Some(t), None) => t.clone(),
        (None, Some(p)) => read(p)?,
        _ => return Err(usage(anyhow!("give exactly one of TERM or --file"))),
    };
    parse_lambda(text.trim()).map_err(usage)
}

impl TermInput {
    fn term(&self) -> Result<Term, Error> {
        lambda(&self.term, &self.file)
    }
}

impl Source {
    fn ltrs(&self) -> Result<(LTrs, LTrsTerm), Error> {
        if let (Some(path), Some(start)) = (&self.ltrs, &self.start) {
            let l: LTrs = read(path)?.parse().map_err(usage)?;
            l.validate().map_err(usage)?;
            let s: LTrsTerm = start.trim().parse().map_err(usage)?;
            l.check_term(&s).map_err(usage)?;
            return Ok((l, s));
        }
        let m = lambda(&self.term, &self.file)?;
        lambda_lift(&m).map_err(usage)
    }
}

fn only(emit: Emit, allowed: &[Emit], cmd: &str) -> Result<(), Error> {
    if allowed.contains(&emit) {
        Ok(())
    } else {
        let name = emit.to_possible_value().expect("no skipped variants").get_name().to_string();
        Err(usage(anyhow!("{cmd} does not support --emit {name}")))
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn run(cmd: Cmd) -> Outcome {
    use Emit::*;
    match cmd {
        Cmd::Parse { input, emit } => {
            only(emit, &[Text, Json], "parse")?;
            let m = input.term()?;
            Ok(match emit {
                Json => (
                    pretty(&json!({"term": m.to_string(), "depth": m.depth(), "size": m.size(), "closed": m.is_closed()})),
                    true,
                ),
                _ => (format!("{m}\ndepth {}\n", m.depth()), true),
            })
        }
        Cmd::Lift { input } => {
            let m = input.term()?;
            let (l, s) = lambda_lift(&m).map_err(usage)?;
            Ok((format!("{l}# start: {s}\n"), true))
        }
        Cmd::Expand { input, emit } => {
            only(emit, &[Text, Json], "expand")?;
            let (l, s) = input.ltrs()?;
            let rep = expand(&l, &s, max_nodes()?).map_err(anyhow::Error::from)?;
            Ok(match emit {
                Json => (pretty(&json!({"rep": rep.to_string(), "depth": rep.depth(), "size": rep.size()})), true),
                _ => (format!("{rep}\ndepth {}\n", rep.depth()), true),
            })
        }
        Cmd::RunBeta { input, run } => {
            only(run.emit, &[Text, Json], "run-beta")?;
            let m = input.term()?;
            let (tr, complete) = trace_or_partial(lo_reduce(&m, run.max_steps));
            let out = match run.emit {
                Json => pretty(&beta_trace_json(&tr, complete, run.include_terms)),
                _ => {
                    let mut out = format!(
                        "source {} depth_start {} steps {} complete {complete}\n",
                        tr.start(),
                        tr.start().depth(),
                        tr.len()
                    );
                    for (k, (p, t)) in tr.positions.iter().zip(&tr.terms[1..]).enumerate() {
                        write!(out, "{}\t{p}\tdepth {}", k + 1, t.depth()).unwrap();
                        if run.include_terms {
                            write!(out, "\t{t}").unwrap();
                        }
                        out.push('\n');
                    }
                    out
                }
            };
            Ok((out, complete))
        }
        Cmd::RunRepsim { input, run } => {
            only(run.emit, &[Text, Json], "run-repsim")?;
            let m = input.term()?;
            let rep = rep_of(&m).map_err(usage)?;
            let (tr, complete) = trace_or_partial(repsim_run(&rep, run.max_steps));
            let out = match run.emit {
                Json => pretty(&repsim_trace_json(&tr, complete, run.include_terms)),
                _ => {
                    let mut out = format!(
                        "source {} contracts {} steps {} complete {complete}\n",
                        tr.start,
                        tr.contracts(),
                        tr.len()
                    );
                    for (k, s) in tr.steps.iter().enumerate() {
                        write!(out, "{}\t{}\t{}", k + 1, s.class.rule(), s.position).unwrap();
                        if run.include_terms {
                            write!(out, "\t{}", s.term).unwrap();
                        }
                        out.push('\n');
                    }
                    if let Some(r) = final_rep(&tr) {
                        writeln!(out, "final {r}").unwrap();
                    }
                    out
                }
            };
            Ok((out, complete))
        }
        Cmd::RunLosim {
            input,
            run,
            max_contracts,
            cross_check_ldepth,
        } => {
            only(run.emit, &[Text, Json], "run-losim")?;
            let (l, s) = input.ltrs()?;
            let (tr, stop) = losim_run_bounded(&l, &s, run.max_steps, max_contracts.unwrap_or(usize::MAX))
                .map_err(anyhow::Error::from)?;
            let complete = stop == Stop::NormalForm;
            let mut mismatches = Vec::new();
            if cross_check_ldepth {
                let budget = max_nodes()?;
                let points = std::iter::once((0, &tr.start, tr.ldepth_start))
                    .chain(tr.steps.iter().map(|st| (st.index, &st.term, st.ldepth)));
                for (k, t, ld) in points {
                    let depth = expand_losim(&l, t, budget).map_err(anyhow::Error::from)?.depth();
                    if depth != ld {
                        mismatches.push(format!("step {k}: ldepth {ld}, expansion depth {depth}"));
                    }
                }
            }
            let mut out = match run.emit {
                Json => {
                    let mut v = losim_trace_json(&l, &tr, complete, run.include_terms);
                    v["header"]["stop"] = json!(stop);
                    if cross_check_ldepth {
                        v["header"]["ldepth_mismatches"] = json!(mismatches);
                    }
                    pretty(&v)
                }
                _ => {
                    let mut out = format!(
                        "source {} D {} ldepth_start {} contracts {} steps {} complete {complete}\n",
                        tr.source,
                        tr.d,
                        tr.ldepth_start,
                        tr.contracts(),
                        tr.len()
                    );
                    for st in &tr.steps {
                        let rule = match &st.scope {
                            Some(f) => format!("{}({f})", st.rule.id()),
                            None => st.rule.id().to_string(),
                        };
                        write!(out, "{}\t{rule}\t{}\tldepth {}", st.index, st.position, st.ldepth).unwrap();
                        if run.include_terms {
                            write!(out, "\t{}", st.term).unwrap();
                        }
                        out.push('\n');
                    }
                    if cross_check_ldepth {
                        writeln!(out, "ldepth cross-check: {} mismatches", mismatches.len()).unwrap();
                    }
                    out
                }
            };
            if run.emit == Text && !complete {
                writeln!(out, "stopped: {}", serde_json::to_value(stop).unwrap().as_str().unwrap()).unwrap();
            }
            Ok((out, complete && mismatches.is_empty()))
        }
        Cmd::RunDag {
            input,
            max_contracts,
            emit,
            include_terms,
        } => {
            let (l, s) = input.ltrs()?;
            let (run, complete) = match dag_lo_simulate(&l, &s, max_contracts) {
                Ok(run) => (run, true),
                Err(DagError::ContractLimit(e)) => (e.partial, false),
                Err(e) => return Err(anyhow::Error::from(e).into()),
            };
            let out = match emit {
                Csv => {
                    let mut out = dag_stats_csv(&run.stats);
                    if include_terms {
                        writeln!(out, "# final {}", run.graph.readback()).unwrap();
                    }
                    out
                }
                Json => {
                    let mut v = json!({
                        "header": {
                            "source_term": s.to_string(),
                            "contracts": run.stats.len(),
                            "steps": run.steps,
                            "node_count": run.graph.node_count(),
                            "tree_size": run.graph.tree_size(),
                            "complete": complete,
                        },
                        "stats": run.stats,
                    });
                    if include_terms {
                        v["header"]["final_term"] = json!(run.graph.readback().to_string());
                    }
                    pretty(&v)
                }
                Text => {
                    let mut out = format!(
                        "source {s} contracts {} steps {} node_count {} tree_size {} complete {complete}\n",
                        run.stats.len(),
                        run.steps,
                        run.graph.node_count(),
                        run.graph.tree_size()
                    );
                    for st in &run.stats {
                        writeln!(
                            out,
                            "contract {}\tnodes {}\tsearch {}\tunshared {}\tcumulative {}",
                            st.contract_index, st.node_count, st.search_steps, st.unshare_copies, st.cumulative_steps
                        )
                        .unwrap();
                    }
                    if include_terms {
                        writeln!(out, "final {}", run.graph.readback()).unwrap();
                    }
                    out
                }
            };
            Ok((out, complete))
        }
        Cmd::Verify {
            suite,
            checks,
            seed,
            emit,
            timing,
            sequential,
        } => {
            only(emit, &[Text, Json], "verify")?;
            let mut cfg = SuiteConfig::named(&suite).expect("clap restricts suite names");
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if sequential {
                cfg.parallelism = Parallelism::Sequential;
            }
            let names: Vec<&str> = if checks.is_empty() {
                CHECKS.to_vec()
            } else {
                checks.iter().map(String::as_str).collect()
            };
            let reports: Vec<_> = names
                .iter()
                .map(|n| {
                    let mut r = run_check(n, &cfg).expect("clap restricts check names");
                    if !timing {
                        r.millis = None;
                    }
                    r
                })
                .collect();
            let ok = reports.iter().all(|r| r.passed());
            let out = match emit {
                Json => pretty(&json!({
                    "suite": suite,
                    "seed": cfg.seed,
                    "passed": ok,
                    "reports": reports,
                })),
                _ => {
                    let mut out = String::new();
                    for r in &reports {
                        writeln!(out, "{r}").unwrap();
                    }
                    let passed = reports.iter().filter(|r| r.passed()).count();
                    writeln!(out, "{passed}/{} checks passed", reports.len()).unwrap();
                    out
                }
            };
            Ok((out, ok))
        }
        Cmd::Family {
            which,
            i,
            emit,
            include_terms,
        } => {
            only(emit, &[Text, Json], "family")?;
            match which {
                Family::Depth => {
                    if i > 20 {
                        return Err(usage(anyhow!("--i must be at most 20 for the depth family")));
                    }
                    let fam = family_depth_explosion(i);
                    let ok = fam.inside_out.validate().is_ok() && alpha_eq(fam.inside_out.last(), &fam.b);
                    let mut v = json!({
                        "family": "depth",
                        "i": i,
                        "depth_a": fam.a.depth(),
                        "depth_b": fam.b.depth(),
                        "inside_out_steps": fam.inside_out.len(),
                        "reaches_b": ok,
                    });
                    if include_terms {
                        v["a"] = json!(fam.a.to_string());
                        v["b"] = json!(fam.b.to_string());
                    }
                    Ok((render_family(&v, emit), ok))
                }
                Family::Size => {
                    if i > 20 {
                        return Err(usage(anyhow!("--i must be at most 20 for the size family")));
                    }
                    let (a, b) = family_size_explosion(i);
                    let (tr, complete) = trace_or_partial(lo_reduce(&a, i as usize + 1));
                    let ok = complete && alpha_eq(tr.last(), &b);
                    let mut v = json!({
                        "family": "size",
                        "i": i,
                        "size_a": a.size(),
                        "size_b": b.size(),
                        "app_nodes_b": b.app_count(),
                        "lo_steps": tr.len(),
                        "reaches_b": ok,
                    });
                    if include_terms {
                        v["a"] = json!(a.to_string());
                        v["b"] = json!(b.to_string());
                    }
                    Ok((render_family(&v, emit), ok))
                }
            }
        }
    }
}

/// One `key value` line per field, in field order.
fn render_family(v: &Value, emit: Emit) -> String {
    if emit == Emit::Json {
        return pretty(v);
    }
    let mut out = String::new();
    for (k, x) in v.as_object().expect("family reports are objects") {
        match x {
            Value::String(s) => writeln!(out, "{k} {s}").unwrap(),
            x => writeln!(out, "{k} {x}").unwrap(),
        }
    }
    out
}
