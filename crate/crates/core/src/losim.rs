//! The losim-TRS: leftmost-outermost simulation of β-reduction on λ-TRS
//! terms, plus the clause-based λ-term depth.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::ltrs::{Ctx, LTrs, LTrsTerm, LtrsError, Symbol};
use crate::position::Position;
use crate::StepLimitExceeded;

#[derive(Clone, Debug)]
pub enum LKind {
    Var(u32),
    App([LosimTerm; 2]),
    Abs(u32, LosimTerm),
    Scope(Symbol, Vec<LosimTerm>),
    Losim(LosimTerm),
    /// `thunk^n_i(s, b1, ..., bn)`; `args = [s, b1, ..., bn]`.
    Thunk(u32, Vec<LosimTerm>),
    /// `unthunk^n_i(s, b1, ..., bn)` with `n >= 1`.
    Unthunk(u32, Vec<LosimTerm>),
}

struct Node {
    kind: LKind,
    marked: bool,
    size: u64,
}

/// A term of the losim-TRS. Children are reference counted, so arguments
/// duplicated by a contract step are shared rather than copied.
#[derive(Clone)]
pub struct LosimTerm(Arc<Node>);

impl LosimTerm {
    fn mk(kind: LKind) -> LosimTerm {
        let (marked, size) = {
            let ch = children_of(&kind);
            let own = matches!(kind, LKind::Losim(_) | LKind::Thunk(..) | LKind::Unthunk(..));
            (
                own || ch.iter().any(|c| c.0.marked),
                ch.iter().fold(1u64, |acc, c| acc.saturating_add(c.0.size)),
            )
        };
        LosimTerm(Arc::new(Node { kind, marked, size }))
    }

    pub fn var(j: u32) -> LosimTerm {
        LosimTerm::mk(LKind::Var(j))
    }

    pub fn app(f: LosimTerm, a: LosimTerm) -> LosimTerm {
        LosimTerm::mk(LKind::App([f, a]))
    }

    pub fn abs(j: u32, body: LosimTerm) -> LosimTerm {
        LosimTerm::mk(LKind::Abs(j, body))
    }

    pub fn scope(f: Symbol, args: Vec<LosimTerm>) -> LosimTerm {
        LosimTerm::mk(LKind::Scope(f, args))
    }

    pub fn losim(t: LosimTerm) -> LosimTerm {
        LosimTerm::mk(LKind::Losim(t))
    }

    pub fn thunk(i: u32, args: Vec<LosimTerm>) -> LosimTerm {
        assert!(!args.is_empty(), "thunk needs a head argument");
        LosimTerm::mk(LKind::Thunk(i, args))
    }

    pub fn unthunk(i: u32, args: Vec<LosimTerm>) -> LosimTerm {
        assert!(args.len() >= 2, "unthunk needs n >= 1");
        LosimTerm::mk(LKind::Unthunk(i, args))
    }

    pub fn kind(&self) -> &LKind {
        &self.0.kind
    }

    /// Whether a `losim`, `thunk` or `unthunk` symbol occurs in the term.
    pub fn is_marked(&self) -> bool {
        self.0.marked
    }

    /// Node count of the unfolded tree (saturating).
    pub fn size(&self) -> u64 {
        self.0.size
    }

    pub fn ptr_eq(&self, other: &LosimTerm) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn children(&self) -> &[LosimTerm] {
        children_of(&self.0.kind)
    }

    pub fn subterm(&self, pos: &[u32]) -> Option<&LosimTerm> {
        let mut t = self;
        for &i in pos {
            t = t.children().get(i as usize)?;
        }
        Some(t)
    }

    /// Copy of the term with the `k`-th child replaced.
    pub fn with_child(&self, k: usize, new: LosimTerm) -> LosimTerm {
        let mut kids = self.children().to_vec();
        kids[k] = new;
        self.rebuild(kids)
    }

    /// Same head symbol over new children.
    pub fn rebuild(&self, mut kids: Vec<LosimTerm>) -> LosimTerm {
        match &self.0.kind {
            LKind::Var(j) => LosimTerm::var(*j),
            LKind::App(_) => {
                let a = kids.pop().expect("binary");
                let f = kids.pop().expect("binary");
                LosimTerm::app(f, a)
            }
            LKind::Abs(j, _) => LosimTerm::abs(*j, kids.pop().expect("unary")),
            LKind::Scope(f, _) => LosimTerm::scope(f.clone(), kids),
            LKind::Losim(_) => LosimTerm::losim(kids.pop().expect("unary")),
            LKind::Thunk(i, _) => LosimTerm::thunk(*i, kids),
            LKind::Unthunk(i, _) => LosimTerm::unthunk(*i, kids),
        }
    }

    pub fn replace_at(&self, pos: &[u32], new: LosimTerm) -> Option<LosimTerm> {
        let Some((&first, rest)) = pos.split_first() else {
            return Some(new);
        };
        let child = self.children().get(first as usize)?;
        let replaced = child.replace_at(rest, new)?;
        Some(self.with_child(first as usize, replaced))
    }

    /// The λ-TRS term, if no λ or operation symbols occur.
    pub fn to_ltrs_term(&self) -> Option<LTrsTerm> {
        Some(match self.kind() {
            LKind::Var(j) => LTrsTerm::Var(*j),
            LKind::App([f, a]) => LTrsTerm::app(f.to_ltrs_term()?, a.to_ltrs_term()?),
            LKind::Scope(f, args) => LTrsTerm::Scope(
                f.clone(),
                args.iter().map(LosimTerm::to_ltrs_term).collect::<Option<_>>()?,
            ),
            _ => return None,
        })
    }
}

fn children_of(kind: &LKind) -> &[LosimTerm] {
    match kind {
        LKind::Var(_) => &[],
        LKind::App(fa) => fa,
        LKind::Abs(_, b) | LKind::Losim(b) => std::slice::from_ref(b),
        LKind::Scope(_, args) | LKind::Thunk(_, args) | LKind::Unthunk(_, args) => args,
    }
}

impl From<&LTrsTerm> for LosimTerm {
    fn from(t: &LTrsTerm) -> Self {
        match t {
            LTrsTerm::Var(j) => LosimTerm::var(*j),
            LTrsTerm::App(f, a) => LosimTerm::app(f.as_ref().into(), a.as_ref().into()),
            LTrsTerm::Scope(f, args) => {
                LosimTerm::scope(f.clone(), args.iter().map(LosimTerm::from).collect())
            }
        }
    }
}

/// Syntactic equality, memoized on node pairs so shared terms compare in
/// time linear in their graph size.
impl PartialEq for LosimTerm {
    fn eq(&self, other: &LosimTerm) -> bool {
        fn go(a: &LosimTerm, b: &LosimTerm, seen: &mut std::collections::HashSet<(usize, usize)>) -> bool {
            if a.ptr_eq(b) {
                return true;
            }
            if a.size() != b.size() || a.is_marked() != b.is_marked() {
                return false;
            }
            if !seen.insert((a.addr(), b.addr())) {
                return true;
            }
            let heads = match (a.kind(), b.kind()) {
                (LKind::Var(x), LKind::Var(y)) => x == y,
                (LKind::App(_), LKind::App(_)) | (LKind::Losim(_), LKind::Losim(_)) => true,
                (LKind::Abs(x, _), LKind::Abs(y, _)) => x == y,
                (LKind::Scope(f, _), LKind::Scope(g, _)) => f == g,
                (LKind::Thunk(i, _), LKind::Thunk(j, _)) | (LKind::Unthunk(i, _), LKind::Unthunk(j, _)) => i == j,
                _ => false,
            };
            heads
                && a.children().len() == b.children().len()
                && a.children().iter().zip(b.children()).all(|(x, y)| go(x, y, seen))
        }
        go(self, other, &mut Default::default())
    }
}

impl Eq for LosimTerm {}

impl fmt::Debug for LosimTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.size() > 4096 {
            return write!(f, "<losim term size={}>", self.size());
        }
        write!(f, "{self}")
    }
}

/// `x0`, `@(s,t)`, `\x0.s`, `f(a,b)`, `losim(s)`, `thunk[n,i](s,b1,...)`.
impl fmt::Display for LosimTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, args: &[LosimTerm]) -> fmt::Result {
            for (k, a) in args.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            Ok(())
        }
        match self.kind() {
            LKind::Var(j) => write!(f, "x{j}"),
            LKind::App([a, b]) => write!(f, "@({a},{b})"),
            LKind::Abs(j, b) => write!(f, "\\x{j}.{b}"),
            LKind::Scope(g, args) => {
                write!(f, "{g}")?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    list(f, args)?;
                    f.write_str(")")?;
                }
                Ok(())
            }
            LKind::Losim(t) => write!(f, "losim({t})"),
            LKind::Thunk(i, args) => {
                write!(f, "thunk[{},{i}](", args.len() - 1)?;
                list(f, args)?;
                f.write_str(")")
            }
            LKind::Unthunk(i, args) => {
                write!(f, "unthunk[{},{i}](", args.len() - 1)?;
                list(f, args)?;
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LosimRule {
    #[serde(rename = "init")]
    Init,
    #[serde(rename = "@")]
    App,
    #[serde(rename = "scope-descend")]
    ScopeDescend,
    #[serde(rename = "contract")]
    Contract,
    #[serde(rename = "var-0")]
    Var0,
    #[serde(rename = "var-n")]
    VarN,
    #[serde(rename = "unthunk-1")]
    Unthunk1,
    #[serde(rename = "unthunk-n")]
    UnthunkN,
}

impl LosimRule {
    pub fn id(self) -> &'static str {
        match self {
            LosimRule::Init => "init",
            LosimRule::App => "@",
            LosimRule::ScopeDescend => "scope-descend",
            LosimRule::Contract => "contract",
            LosimRule::Var0 => "var-0",
            LosimRule::VarN => "var-n",
            LosimRule::Unthunk1 => "unthunk-1",
            LosimRule::UnthunkN => "unthunk-n",
        }
    }

    pub fn is_contract(self) -> bool {
        self == LosimRule::Contract
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepClass {
    Search,
    Contract,
}

/// One applied rule instance.
#[derive(Debug, Clone)]
pub struct LosimStep {
    pub term: LosimTerm,
    pub rule: LosimRule,
    /// The scope symbol of a contract step.
    pub scope: Option<Symbol>,
    pub position: Position,
}

impl LosimStep {
    pub fn class(&self) -> StepClass {
        if self.rule.is_contract() {
            StepClass::Contract
        } else {
            StepClass::Search
        }
    }
}

/// The rule instance with redex at the root of `t`, if any.
fn rule_at_root(
    l: &LTrs,
    t: &LosimTerm,
) -> Result<Option<(LosimTerm, LosimRule, Option<Symbol>)>, LtrsError> {
    Ok(Some(match t.kind() {
        LKind::Losim(x) => (LosimTerm::thunk(0, vec![x.clone()]), LosimRule::Init, None),
        LKind::Thunk(i, args) => {
            let (head, bs) = args.split_first().expect("thunk has a head");
            match head.kind() {
                LKind::App([x, y]) => {
                    let mut next = vec![x.clone(), y.clone()];
                    next.extend_from_slice(bs);
                    (LosimTerm::thunk(*i, next), LosimRule::App, None)
                }
                LKind::Scope(f, r#as) => {
                    let def = l.get(f).ok_or_else(|| LtrsError::UnknownSymbol(f.clone()))?;
                    match bs.split_first() {
                        None => {
                            let body = def.ctx.instantiate(r#as, &LosimTerm::var(*i));
                            let t = LosimTerm::abs(*i, LosimTerm::thunk(i + 1, vec![body]));
                            (t, LosimRule::ScopeDescend, None)
                        }
                        Some((b1, rest)) => {
                            let mut next = vec![def.ctx.instantiate(r#as, b1)];
                            next.extend_from_slice(rest);
                            (LosimTerm::thunk(*i, next), LosimRule::Contract, Some(f.clone()))
                        }
                    }
                }
                LKind::Var(_) if bs.is_empty() => (head.clone(), LosimRule::Var0, None),
                LKind::Var(_) => (LosimTerm::unthunk(*i, args.clone()), LosimRule::VarN, None),
                _ => return Ok(None),
            }
        }
        LKind::Unthunk(i, args) => {
            let applied = LosimTerm::app(args[0].clone(), LosimTerm::thunk(*i, vec![args[1].clone()]));
            if args.len() == 2 {
                (applied, LosimRule::Unthunk1, None)
            } else {
                let mut next = vec![applied];
                next.extend_from_slice(&args[2..]);
                (LosimTerm::unthunk(*i, next), LosimRule::UnthunkN, None)
            }
        }
        _ => return Ok(None),
    }))
}

/// Applies the leftmost-outermost rule instance: the first position in
/// pre-order at which some rule applies.
pub fn losim_lo_step(l: &LTrs, t: &LosimTerm) -> Result<Option<LosimStep>, LtrsError> {
    fn find(
        l: &LTrs,
        t: &LosimTerm,
        path: &mut Vec<u32>,
    ) -> Result<Option<(LosimTerm, LosimRule, Option<Symbol>)>, LtrsError> {
        if !t.is_marked() {
            return Ok(None);
        }
        if let Some(hit) = rule_at_root(l, t)? {
            return Ok(Some(hit));
        }
        for (k, c) in t.children().iter().enumerate() {
            path.push(k as u32);
            if let Some(hit) = find(l, c, path)? {
                return Ok(Some(hit));
            }
            path.pop();
        }
        Ok(None)
    }
    let mut path = Vec::new();
    let Some((contractum, rule, scope)) = find(l, t, &mut path)? else {
        return Ok(None);
    };
    let term = t.replace_at(&path, contractum).expect("path found by search");
    Ok(Some(LosimStep {
        term,
        rule,
        scope,
        position: Position(path),
    }))
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    /// Step number, starting at 1.
    pub index: usize,
    pub rule: LosimRule,
    pub scope: Option<Symbol>,
    pub position: Position,
    /// λ-term depth of the reduct.
    pub ldepth: u64,
    pub term: LosimTerm,
}

impl TraceStep {
    pub fn class(&self) -> StepClass {
        if self.rule.is_contract() {
            StepClass::Contract
        } else {
            StepClass::Search
        }
    }
}

/// A losim run from `losim(s)`.
#[derive(Debug, Clone)]
pub struct LosimTrace {
    pub source: LTrsTerm,
    pub start: LosimTerm,
    pub ldepth_start: u64,
    /// `ldepth(L)`.
    pub d: u64,
    pub steps: Vec<TraceStep>,
}

impl LosimTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> &LosimTerm {
        self.steps.last().map_or(&self.start, |s| &s.term)
    }

    pub fn contracts(&self) -> usize {
        self.steps.iter().filter(|s| s.rule.is_contract()).count()
    }

    /// Reducts right after each contract step.
    pub fn contract_terms(&self) -> impl Iterator<Item = &TraceStep> {
        self.steps.iter().filter(|s| s.rule.is_contract())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LosimRunError {
    #[error(transparent)]
    Ltrs(#[from] LtrsError),
    #[error(transparent)]
    StepLimit(#[from] StepLimitExceeded<LosimTrace>),
}

/// Leftmost-outermost losim run from `losim(s)`, recording rule, position
/// and λ-term depth of every reduct.
pub fn losim_run(l: &LTrs, s: &LTrsTerm, max_steps: usize) -> Result<LosimTrace, LosimRunError> {
    let (trace, stop) = losim_run_bounded(l, s, max_steps, usize::MAX)?;
    match stop {
        Stop::NormalForm => Ok(trace),
        _ => Err(StepLimitExceeded {
            limit: max_steps,
            partial: trace,
        }
        .into()),
    }
}

/// Why a bounded run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stop {
    NormalForm,
    StepLimit,
    /// The next step would be contract number `max_contracts + 1`.
    ContractLimit,
}

/// As [`losim_run`], also stopping in front of the `(max_contracts + 1)`-th
/// contract step.
pub fn losim_run_bounded(
    l: &LTrs,
    s: &LTrsTerm,
    max_steps: usize,
    max_contracts: usize,
) -> Result<(LosimTrace, Stop), LtrsError> {
    l.check_term(s)?;
    let mut depth = Ldepth::new(l)?;
    let start = LosimTerm::losim(s.into());
    let mut trace = LosimTrace {
        source: s.clone(),
        ldepth_start: depth.of(&start),
        d: depth.max_scope().unwrap_or(0),
        start,
        steps: Vec::new(),
    };
    let mut contracts = 0;
    loop {
        let Some(step) = losim_lo_step(l, trace.last())? else {
            return Ok((trace, Stop::NormalForm));
        };
        if trace.steps.len() >= max_steps {
            return Ok((trace, Stop::StepLimit));
        }
        if step.rule.is_contract() {
            if contracts == max_contracts {
                return Ok((trace, Stop::ContractLimit));
            }
            contracts += 1;
        }
        let ldepth = depth.of(&step.term);
        trace.steps.push(TraceStep {
            index: trace.steps.len() + 1,
            rule: step.rule,
            scope: step.scope,
            position: step.position,
            ldepth,
            term: step.term,
        });
    }
}

/// Max-plus summary of a context `C` with `m` holes:
/// `ldepth(C[a1..am]) = max(base, max_i w[i] + ldepth(a_i))`, where `base`
/// is the depth with every hole filled by a variable and `w[i]` the largest
/// λ-term depth above an occurrence of hole `i` (absent if the hole is
/// dropped by the expansion).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub base: u64,
    pub weights: Vec<Option<u64>>,
}

impl Profile {
    pub fn apply(&self, depths: impl IntoIterator<Item = u64>) -> u64 {
        self.weights
            .iter()
            .zip(depths)
            .filter_map(|(w, d)| w.map(|w| w + d))
            .fold(self.base, u64::max)
    }
}

/// Clause-based λ-term depth for terms over one λ-TRS, memoized on scope
/// symbols and on term nodes.
pub struct Ldepth<'a> {
    l: &'a LTrs,
    scopes: HashMap<Symbol, Profile>,
    memo: HashMap<usize, (LosimTerm, u64)>,
}

impl<'a> Ldepth<'a> {
    /// Fails if `l` is not finitely nested or refers to unknown symbols.
    pub fn new(l: &'a LTrs) -> Result<Self, LtrsError> {
        let mut scopes = HashMap::new();
        let mut active = Vec::new();
        for f in l.symbols() {
            scope_profile(l, f, &mut scopes, &mut active)?;
        }
        Ok(Ldepth {
            l,
            scopes,
            memo: HashMap::new(),
        })
    }

    pub fn ltrs(&self) -> &'a LTrs {
        self.l
    }

    /// Profile of the scope context of `f` (`k + 1` holes).
    pub fn profile(&self, f: &Symbol) -> Result<&Profile, LtrsError> {
        self.scopes.get(f).ok_or_else(|| LtrsError::UnknownSymbol(f.clone()))
    }

    /// `ldepth(f) = ldepth(f(x1, ..., xk))`.
    pub fn scope(&self, f: &Symbol) -> Result<u64, LtrsError> {
        Ok(1 + self.profile(f)?.base)
    }

    /// `D = ldepth(L)`.
    pub fn max_scope(&self) -> Result<u64, LtrsError> {
        self.scopes
            .values()
            .map(|p| 1 + p.base)
            .max()
            .ok_or(LtrsError::EmptySignature)
    }

    /// Profile of an arbitrary context over the signature of `L`.
    pub fn ctx_profile(&self, c: &Ctx, holes: usize) -> Result<Profile, LtrsError> {
        ctx_profile(c, holes, &|g| self.profile(g).cloned())
    }

    pub fn of(&mut self, t: &LosimTerm) -> u64 {
        if let Some((_, d)) = self.memo.get(&t.addr()) {
            return *d;
        }
        let d = match t.kind() {
            LKind::Var(_) => 0,
            LKind::App([a, b]) => 1 + self.of(a).max(self.of(b)),
            LKind::Abs(_, b) => 1 + self.of(b),
            LKind::Losim(b) => self.of(b),
            LKind::Scope(f, args) => {
                let depths: Vec<u64> = args.iter().map(|a| self.of(a)).collect();
                let p = self.scopes.get(f).expect("terms are checked against the signature");
                1 + p.apply(depths)
            }
            LKind::Thunk(_, args) | LKind::Unthunk(_, args) => {
                let n = (args.len() - 1) as u64;
                let mut d = self.of(&args[0]) + n;
                for (k, b) in args[1..].iter().enumerate() {
                    d = d.max(self.of(b) + n - k as u64);
                }
                d
            }
        };
        self.memo.insert(t.addr(), (t.clone(), d));
        d
    }
}

fn scope_profile(
    l: &LTrs,
    f: &Symbol,
    done: &mut HashMap<Symbol, Profile>,
    active: &mut Vec<Symbol>,
) -> Result<Profile, LtrsError> {
    if let Some(p) = done.get(f) {
        return Ok(p.clone());
    }
    if active.contains(f) {
        return Err(LtrsError::NotFinitelyNested(f.clone()));
    }
    let def = l.get(f).ok_or_else(|| LtrsError::UnknownSymbol(f.clone()))?;
    active.push(f.clone());
    for g in def.ctx.symbols() {
        scope_profile(l, &g, done, active)?;
    }
    active.pop();
    let p = ctx_profile(&def.ctx, def.arity + 1, &|g| {
        done.get(g).cloned().ok_or_else(|| LtrsError::UnknownSymbol(g.clone()))
    })?;
    done.insert(f.clone(), p.clone());
    Ok(p)
}

fn ctx_profile(
    c: &Ctx,
    holes: usize,
    scope: &dyn Fn(&Symbol) -> Result<Profile, LtrsError>,
) -> Result<Profile, LtrsError> {
    Ok(match c {
        Ctx::Var(_) => Profile {
            base: 0,
            weights: vec![None; holes],
        },
        Ctx::Hole(h) => {
            let mut weights = vec![None; holes];
            weights[*h as usize - 1] = Some(0);
            Profile { base: 0, weights }
        }
        Ctx::App(a, b) => {
            let (pa, pb) = (ctx_profile(a, holes, scope)?, ctx_profile(b, holes, scope)?);
            Profile {
                base: 1 + pa.base.max(pb.base),
                weights: pa
                    .weights
                    .iter()
                    .zip(&pb.weights)
                    .map(|(x, y)| x.max(y).map(|w| w + 1))
                    .collect(),
            }
        }
        Ctx::Scope(g, args) => {
            let pg = scope(g)?;
            let mut base = pg.base;
            let mut weights: Vec<Option<u64>> = vec![None; holes];
            for (wg, a) in pg.weights.iter().zip(args) {
                let Some(wg) = wg else { continue };
                let pa = ctx_profile(a, holes, scope)?;
                base = base.max(wg + pa.base);
                for (w, wa) in weights.iter_mut().zip(&pa.weights) {
                    if let Some(wa) = wa {
                        *w = (*w).max(Some(wg + wa));
                    }
                }
            }
            Profile {
                base: 1 + base,
                weights: weights.into_iter().map(|w| w.map(|w| w + 1)).collect(),
            }
        }
    })
}

/// `ldepth(t)` by the clauses; `L` must be finitely nested.
pub fn ldepth(l: &LTrs, t: &LosimTerm) -> Result<u64, LtrsError> {
    let mut d = Ldepth::new(l)?;
    check_symbols(l, t)?;
    Ok(d.of(t))
}

pub fn ldepth_scope(l: &LTrs, f: &Symbol) -> Result<u64, LtrsError> {
    Ldepth::new(l)?.scope(f)
}

/// `ldepth(L)`, the largest scope-symbol depth.
pub fn ldepth_l(l: &LTrs) -> Result<u64, LtrsError> {
    Ldepth::new(l)?.max_scope()
}

/// Every scope symbol of `t` is declared in `l` with matching arity.
pub fn check_symbols(l: &LTrs, t: &LosimTerm) -> Result<(), LtrsError> {
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![t.clone()];
    while let Some(t) = stack.pop() {
        if !seen.insert(t.addr()) {
            continue;
        }
        if let LKind::Scope(f, args) = t.kind() {
            let def = l.get(f).ok_or_else(|| LtrsError::UnknownSymbol(f.clone()))?;
            if def.arity != args.len() {
                return Err(LtrsError::ArityMismatch {
                    symbol: f.clone(),
                    expected: def.arity,
                    found: args.len(),
                });
            }
        }
        stack.extend(t.children().iter().cloned());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltrs::{example_ltrs, lambda_lift};
    use crate::lambda::parse_lambda;

    fn v(j: u32) -> LosimTerm {
        LosimTerm::var(j)
    }

    fn sym(s: &str) -> Symbol {
        Symbol::new(s)
    }

    #[test]
    fn example_scope_depths() {
        let (l, s) = example_ltrs();
        let d = Ldepth::new(&l).unwrap();
        assert_eq!(d.scope(&sym("g")).unwrap(), 1);
        assert_eq!(d.scope(&sym("f")).unwrap(), 3);
        assert_eq!(d.scope(&sym("h")).unwrap(), 3);
        assert_eq!(d.scope(&sym("i")).unwrap(), 2);
        assert_eq!(ldepth_l(&l).unwrap(), 3);
        assert_eq!(ldepth(&l, &(&s).into()).unwrap(), 6);
    }

    #[test]
    fn thunk_clause() {
        let (l, _) = example_ltrs();
        let t = LosimTerm::thunk(0, vec![v(0), v(1), v(2)]);
        assert_eq!(ldepth(&l, &t).unwrap(), 2);
        assert_eq!(ldepth(&l, &v(7)).unwrap(), 0);
        let u = LosimTerm::unthunk(3, vec![v(0), LosimTerm::app(v(1), v(1)), v(2)]);
        // ((x0 (x1 x1)) x2)
        assert_eq!(ldepth(&l, &u).unwrap(), 3);
    }

    #[test]
    fn example_trace_matches_the_worked_run() {
        let (l, s) = example_ltrs();
        let tr = losim_run(&l, &s, 100).unwrap();
        let rules: Vec<&str> = tr.steps.iter().map(|s| s.rule.id()).collect();
        assert_eq!(
            rules,
            [
                "init",
                "scope-descend",
                "@",
                "contract",
                "@",
                "contract",
                "scope-descend",
                "@",
                "var-n",
                "unthunk-1",
                "var-0"
            ]
        );
        assert_eq!(tr.contracts(), 2);
        let printed: Vec<String> = tr.steps.iter().map(|s| s.term.to_string()).collect();
        assert_eq!(printed[0], "thunk[0,0](f(g,h))");
        assert_eq!(printed[1], "\\x0.thunk[0,1](@(g,@(h,x0)))");
        assert_eq!(printed[2], "\\x0.thunk[1,1](g,@(h,x0))");
        assert_eq!(printed[3], "\\x0.thunk[0,1](@(h,x0))");
        assert_eq!(printed[5], "\\x0.thunk[0,1](i(x0))");
        assert_eq!(printed[6], "\\x0.\\x1.thunk[0,2](@(x1,x0))");
        assert_eq!(printed[7], "\\x0.\\x1.thunk[1,2](x1,x0)");
        assert_eq!(printed[8], "\\x0.\\x1.unthunk[1,2](x1,x0)");
        assert_eq!(printed[9], "\\x0.\\x1.@(x1,thunk[0,2](x0))");
        assert_eq!(printed[10], "\\x0.\\x1.@(x1,x0)");
        assert_eq!(tr.steps[3].scope, Some(sym("g")));
        assert_eq!(tr.steps[5].scope, Some(sym("h")));
        assert_eq!(tr.steps[3].position, Position(vec![0]));
    }

    #[test]
    fn first_contract_of_the_example() {
        let (l, _) = example_ltrs();
        let h_x0 = LosimTerm::app(LosimTerm::scope(sym("h"), vec![]), v(0));
        let t = LosimTerm::thunk(1, vec![LosimTerm::scope(sym("g"), vec![]), h_x0.clone()]);
        let step = losim_lo_step(&l, &t).unwrap().unwrap();
        assert_eq!(step.term, LosimTerm::thunk(1, vec![h_x0]));
        assert_eq!(step.class(), StepClass::Contract);
        assert_eq!(step.scope, Some(sym("g")));
    }

    #[test]
    fn normal_form_has_no_step() {
        let (l, _) = example_ltrs();
        let t = LosimTerm::abs(0, LosimTerm::abs(1, LosimTerm::app(v(1), v(0))));
        assert!(losim_lo_step(&l, &t).unwrap().is_none());
    }

    #[test]
    fn identity_lift_has_no_contracts() {
        let (l, s) = lambda_lift(&parse_lambda("\\x.x").unwrap()).unwrap();
        let tr = losim_run(&l, &s, 100).unwrap();
        assert_eq!(tr.contracts(), 0);
        assert_eq!(ldepth_l(&l).unwrap(), 1);
    }

    #[test]
    fn step_limit_keeps_partial_trace() {
        let (l, s) = lambda_lift(&parse_lambda("(\\x.x x)(\\x.x x)").unwrap()).unwrap();
        match losim_run(&l, &s, 20) {
            Err(LosimRunError::StepLimit(e)) => assert_eq!(e.partial.len(), 20),
            other => panic!("expected step limit, got {other:?}"),
        }
    }

    #[test]
    fn cyclic_signature_is_rejected() {
        let l: LTrs = "@(f, y) -> f".parse().unwrap();
        assert!(matches!(ldepth_l(&l), Err(LtrsError::NotFinitelyNested(_))));
    }
}
