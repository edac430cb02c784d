//! Leftmost-outermost losim evaluation on maximally shared graphs.
//!
//! Nodes are hash-consed and reference counted. Search steps only move a
//! cursor (the uncurried spine of the active `thunk` plus a stack of pending
//! `thunk^0` markers); the graph changes only at scope-descend and contract
//! steps, where the path from the root to the rewritten node is rebuilt.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::losim::{LKind, LosimTerm};
use crate::ltrs::{Ctx, LTrs, LTrsTerm, LtrsError, Symbol};
use crate::StepLimitExceeded;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum DKind {
    Var(u32),
    App([NodeId; 2]),
    Abs(u32, NodeId),
    Scope(Symbol, Box<[NodeId]>),
    Losim(NodeId),
    Thunk(u32, Box<[NodeId]>),
    Unthunk(u32, Box<[NodeId]>),
}

impl DKind {
    fn children(&self) -> &[NodeId] {
        match self {
            DKind::Var(_) => &[],
            DKind::App(ab) => ab,
            DKind::Abs(_, b) | DKind::Losim(b) => std::slice::from_ref(b),
            DKind::Scope(_, cs) | DKind::Thunk(_, cs) | DKind::Unthunk(_, cs) => cs,
        }
    }
}

#[derive(Default)]
struct Store {
    kinds: Vec<Option<DKind>>,
    rc: Vec<u32>,
    table: HashMap<DKind, NodeId>,
    free: Vec<u32>,
    live: usize,
}

impl Store {
    fn kind(&self, id: NodeId) -> &DKind {
        self.kinds[id.0 as usize].as_ref().expect("live node")
    }

    fn retain(&mut self, id: NodeId) -> NodeId {
        self.rc[id.0 as usize] += 1;
        id
    }

    /// Node for `kind`; consumes one reference per child occurrence and
    /// returns one owned reference.
    fn mk(&mut self, kind: DKind) -> NodeId {
        if let Some(&id) = self.table.get(&kind) {
            self.rc[id.0 as usize] += 1;
            for c in kids(&kind) {
                self.release(c);
            }
            return id;
        }
        let id = match self.free.pop() {
            Some(slot) => {
                self.kinds[slot as usize] = Some(kind.clone());
                self.rc[slot as usize] = 1;
                NodeId(slot)
            }
            None => {
                self.kinds.push(Some(kind.clone()));
                self.rc.push(1);
                NodeId(self.kinds.len() as u32 - 1)
            }
        };
        self.table.insert(kind, id);
        self.live += 1;
        id
    }

    fn release(&mut self, id: NodeId) {
        let mut stack = vec![id];
        while let Some(id) = stack.pop() {
            let rc = &mut self.rc[id.0 as usize];
            *rc -= 1;
            if *rc == 0 {
                let kind = self.kinds[id.0 as usize].take().expect("live node");
                self.table.remove(&kind);
                stack.extend(kids(&kind));
                self.free.push(id.0);
                self.live -= 1;
            }
        }
    }

    fn is_live(&self, id: NodeId) -> bool {
        self.kinds[id.0 as usize].is_some()
    }
}

fn kids(k: &DKind) -> Vec<NodeId> {
    k.children().to_vec()
}

fn child(k: &DKind, i: u32) -> NodeId {
    k.children()[i as usize]
}

fn with_child(k: &DKind, i: u32, new: NodeId) -> DKind {
    let mut k = k.clone();
    match &mut k {
        DKind::Var(_) => panic!("no child {i}"),
        DKind::App(ab) => ab[i as usize] = new,
        DKind::Abs(_, b) | DKind::Losim(b) => *b = new,
        DKind::Scope(_, cs) | DKind::Thunk(_, cs) | DKind::Unthunk(_, cs) => cs[i as usize] = new,
    }
    k
}

/// The active `thunk^n_i` marker: its spine root is at `path[..path.len() - n]`,
/// its head at `path`.
#[derive(Clone, Debug)]
struct Focus {
    path: Vec<u32>,
    ids: Vec<NodeId>,
    n: usize,
    i: u32,
}

#[derive(Clone, Debug)]
enum Cursor {
    /// No markers.
    Plain,
    /// `losim(root)`.
    Init,
    Active(Focus),
}

/// A maximally shared graph for a losim term. Markers of a running
/// simulation are kept outside the node store.
pub struct SharedGraph {
    store: Store,
    root: NodeId,
    cursor: Cursor,
    /// Pending `thunk^0_i` markers, next one on top.
    pending: Vec<(Vec<u32>, u32)>,
}

impl fmt::Debug for SharedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SharedGraph")
            .field("nodes", &self.store.live)
            .field("root", &self.root)
            .field("pending", &self.pending.len())
            .finish()
    }
}

/// Interned graph of `t`, markers included.
pub fn to_dag(t: &LosimTerm) -> SharedGraph {
    let mut store = Store::default();
    let mut memo = HashMap::new();
    let root = intern_term(&mut store, &mut memo, t);
    SharedGraph {
        store,
        root,
        cursor: Cursor::Plain,
        pending: Vec::new(),
    }
}

fn intern_term(store: &mut Store, memo: &mut HashMap<usize, NodeId>, t: &LosimTerm) -> NodeId {
    if let Some(&id) = memo.get(&t.addr()) {
        return store.retain(id);
    }
    let mut sub = |ts: &[LosimTerm], store: &mut Store| -> Box<[NodeId]> {
        ts.iter().map(|c| intern_term(store, memo, c)).collect()
    };
    let kind = match t.kind() {
        LKind::Var(j) => DKind::Var(*j),
        LKind::App([a, b]) => {
            let ids = sub(&[a.clone(), b.clone()], store);
            DKind::App([ids[0], ids[1]])
        }
        LKind::Abs(j, b) => DKind::Abs(*j, sub(std::slice::from_ref(b), store)[0]),
        LKind::Scope(f, args) => DKind::Scope(f.clone(), sub(args, store)),
        LKind::Losim(b) => DKind::Losim(sub(std::slice::from_ref(b), store)[0]),
        LKind::Thunk(i, args) => DKind::Thunk(*i, sub(args, store)),
        LKind::Unthunk(i, args) => DKind::Unthunk(*i, sub(args, store)),
    };
    let id = store.mk(kind);
    // the memo keeps `t` alive through the caller, so addresses are stable
    memo.insert(t.addr(), id);
    id
}

impl SharedGraph {
    /// Live nodes.
    pub fn node_count(&self) -> usize {
        self.store.live
    }

    /// Syntax-tree size of the unfolded graph (markers excluded), saturating.
    pub fn tree_size(&self) -> u64 {
        let mut memo: HashMap<NodeId, u64> = HashMap::new();
        fn go(s: &Store, id: NodeId, memo: &mut HashMap<NodeId, u64>) -> u64 {
            if let Some(&n) = memo.get(&id) {
                return n;
            }
            let n = kids(s.kind(id))
                .into_iter()
                .fold(1u64, |acc, c| acc.saturating_add(go(s, c, memo)));
            memo.insert(id, n);
            n
        }
        go(&self.store, self.root, &mut memo)
    }

    /// Checks maximal sharing and reference counts: no two live nodes
    /// share constructor and children, and every count equals the number
    /// of references to the node.
    pub fn audit(&self) -> Result<(), String> {
        let mut seen: HashMap<&DKind, NodeId> = HashMap::new();
        let mut indeg: HashMap<NodeId, u32> = HashMap::new();
        *indeg.entry(self.root).or_default() += 1;
        for (slot, k) in self.store.kinds.iter().enumerate() {
            let Some(k) = k else { continue };
            let id = NodeId(slot as u32);
            if let Some(other) = seen.insert(k, id) {
                return Err(format!("nodes {other:?} and {id:?} are identical"));
            }
            if self.store.table.get(k) != Some(&id) {
                return Err(format!("node {id:?} missing from the intern table"));
            }
            for c in kids(k) {
                if !self.store.is_live(c) {
                    return Err(format!("node {id:?} points to dead node {c:?}"));
                }
                *indeg.entry(c).or_default() += 1;
            }
        }
        if seen.len() != self.store.live || self.store.table.len() != self.store.live {
            return Err("live count out of sync".into());
        }
        for (slot, k) in self.store.kinds.iter().enumerate() {
            if k.is_none() {
                continue;
            }
            let id = NodeId(slot as u32);
            let want = indeg.get(&id).copied().unwrap_or(0);
            if self.store.rc[slot] != want {
                return Err(format!("node {id:?} has count {} but {want} references", self.store.rc[slot]));
            }
        }
        Ok(())
    }

    fn walk(&self, path: &[u32]) -> Vec<NodeId> {
        let mut ids = Vec::with_capacity(path.len() + 1);
        ids.push(self.root);
        for &k in path {
            let cur = *ids.last().unwrap();
            ids.push(child(self.store.kind(cur), k));
        }
        ids
    }

    /// Replaces the node at `path` by `new` (an owned reference), rebuilding
    /// its ancestors. Returns how many old ancestors stay alive because they
    /// are shared, i.e. had to be copied rather than updated.
    fn replace(&mut self, path: &[u32], new: NodeId) -> u64 {
        let old = self.walk(path);
        let mut cur = new;
        for k in (0..path.len()).rev() {
            let kind = self.store.kind(old[k]).clone();
            for (pos, c) in kids(&kind).into_iter().enumerate() {
                if pos as u32 != path[k] {
                    self.store.retain(c);
                }
            }
            cur = self.store.mk(with_child(&kind, path[k], cur));
        }
        let old_root = self.root;
        self.root = cur;
        self.store.release(old_root);
        let fresh = self.walk(path);
        old[..path.len()]
            .iter()
            .zip(&fresh)
            .filter(|(o, n)| self.store.is_live(**o) && o != n)
            .count() as u64
    }

    fn build(&mut self, c: &Ctx, args: &[NodeId], last: NodeId) -> NodeId {
        match c {
            Ctx::Hole(h) => {
                let h = *h as usize;
                self.store.retain(if h <= args.len() { args[h - 1] } else { last })
            }
            Ctx::Var(j) => self.store.mk(DKind::Var(*j)),
            Ctx::App(a, b) => {
                let a = self.build(a, args, last);
                let b = self.build(b, args, last);
                self.store.mk(DKind::App([a, b]))
            }
            Ctx::Scope(g, cs) => {
                let ids: Box<[NodeId]> = cs.iter().map(|c| self.build(c, args, last)).collect();
                self.store.mk(DKind::Scope(g.clone(), ids))
            }
        }
    }

    /// The unshared term, with the markers of a running simulation put back.
    pub fn readback(&self) -> LosimTerm {
        let mut marks: HashMap<Vec<u32>, Mark> = HashMap::new();
        if let Cursor::Active(f) = &self.cursor {
            let root = f.path[..f.path.len() - f.n].to_vec();
            marks.insert(root, Mark::Focus(f.clone()));
        }
        for (p, i) in &self.pending {
            marks.insert(p.clone(), Mark::Pending(*i));
        }
        let mut prefixes: HashSet<Vec<u32>> = HashSet::new();
        for p in marks.keys() {
            for k in 0..p.len() {
                prefixes.insert(p[..k].to_vec());
            }
        }
        let mut rb = Readback {
            g: self,
            marks,
            prefixes,
            memo: HashMap::new(),
        };
        let t = rb.marked(self.root, &mut Vec::new());
        match self.cursor {
            Cursor::Init => LosimTerm::losim(t),
            _ => t,
        }
    }
}

enum Mark {
    Focus(Focus),
    Pending(u32),
}

struct Readback<'g> {
    g: &'g SharedGraph,
    marks: HashMap<Vec<u32>, Mark>,
    prefixes: HashSet<Vec<u32>>,
    memo: HashMap<NodeId, LosimTerm>,
}

impl Readback<'_> {
    fn plain(&mut self, id: NodeId) -> LosimTerm {
        if let Some(t) = self.memo.get(&id) {
            return t.clone();
        }
        let sub = |rb: &mut Self, cs: &[NodeId]| cs.iter().map(|c| rb.plain(*c)).collect::<Vec<_>>();
        let t = match self.g.store.kind(id).clone() {
            DKind::Var(j) => LosimTerm::var(j),
            DKind::App([a, b]) => LosimTerm::app(self.plain(a), self.plain(b)),
            DKind::Abs(j, b) => LosimTerm::abs(j, self.plain(b)),
            DKind::Scope(f, cs) => LosimTerm::scope(f, sub(self, &cs)),
            DKind::Losim(b) => LosimTerm::losim(self.plain(b)),
            DKind::Thunk(i, cs) => LosimTerm::thunk(i, sub(self, &cs)),
            DKind::Unthunk(i, cs) => LosimTerm::unthunk(i, sub(self, &cs)),
        };
        self.memo.insert(id, t.clone());
        t
    }

    fn marked(&mut self, id: NodeId, path: &mut Vec<u32>) -> LosimTerm {
        match self.marks.get(path) {
            Some(Mark::Pending(i)) => {
                let i = *i;
                return LosimTerm::thunk(i, vec![self.plain(id)]);
            }
            Some(Mark::Focus(f)) => {
                let f = f.clone();
                let len = f.ids.len();
                let mut args = vec![self.plain(f.ids[len - 1])];
                for k in 1..=f.n {
                    let spine = f.ids[len - 1 - k];
                    args.push(self.plain(child(self.g.store.kind(spine), 1)));
                }
                return LosimTerm::thunk(f.i, args);
            }
            None => {}
        }
        if !self.prefixes.contains(path.as_slice()) {
            return self.plain(id);
        }
        let kind = self.g.store.kind(id).clone();
        let cs: Vec<LosimTerm> = kids(&kind)
            .into_iter()
            .enumerate()
            .map(|(k, c)| {
                path.push(k as u32);
                let t = self.marked(c, path);
                path.pop();
                t
            })
            .collect();
        match kind {
            DKind::Var(j) => LosimTerm::var(j),
            DKind::App(..) => {
                let [a, b]: [LosimTerm; 2] = cs.try_into().expect("two children");
                LosimTerm::app(a, b)
            }
            DKind::Abs(j, _) => LosimTerm::abs(j, cs.into_iter().next().unwrap()),
            DKind::Scope(f, _) => LosimTerm::scope(f, cs),
            DKind::Losim(_) => LosimTerm::losim(cs.into_iter().next().unwrap()),
            DKind::Thunk(i, _) => LosimTerm::thunk(i, cs),
            DKind::Unthunk(i, _) => LosimTerm::unthunk(i, cs),
        }
    }
}

/// Counters for one simulated contract step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DagStats {
    /// 1-based.
    pub contract_index: usize,
    /// Live nodes after the step.
    pub node_count: usize,
    /// Search steps since the previous contract.
    pub search_steps: u64,
    /// Shared ancestors copied since the previous contract.
    pub unshare_copies: u64,
    /// All losim steps so far, this contract included.
    pub cumulative_steps: u64,
}

#[derive(Debug)]
pub struct DagRun {
    pub stats: Vec<DagStats>,
    pub graph: SharedGraph,
    /// Losim steps of the whole run.
    pub steps: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum DagError {
    #[error(transparent)]
    Ltrs(#[from] LtrsError),
    #[error(transparent)]
    ContractLimit(Box<StepLimitExceeded<DagRun>>),
}

/// Runs the losim strategy on the shared graph of `s`.
pub fn dag_lo_simulate(l: &LTrs, s: &LTrsTerm, max_contracts: usize) -> Result<DagRun, DagError> {
    dag_lo_simulate_with(l, s, max_contracts, |_, _| {})
}

/// As [`dag_lo_simulate`], calling `on_contract(k, graph)` after the `k`-th
/// contract.
pub fn dag_lo_simulate_with(
    l: &LTrs,
    s: &LTrsTerm,
    max_contracts: usize,
    mut on_contract: impl FnMut(usize, &SharedGraph),
) -> Result<DagRun, DagError> {
    l.check_term(s)?;
    let mut g = to_dag(&LosimTerm::from(s));
    g.cursor = Cursor::Init;
    let (mut steps, mut search, mut copies) = (0u64, 0u64, 0u64);
    let mut stats: Vec<DagStats> = Vec::new();
    loop {
        let contracting = g.next_is_contract();
        if contracting && stats.len() == max_contracts {
            return Err(DagError::ContractLimit(Box::new(StepLimitExceeded {
                limit: max_contracts,
                partial: DagRun { stats, graph: g, steps },
            })));
        }
        let Some(effect) = g.step(l)? else { break };
        steps += effect.steps;
        copies += effect.copies;
        if !contracting {
            search += effect.steps;
            continue;
        }
        stats.push(DagStats {
            contract_index: stats.len() + 1,
            node_count: g.node_count(),
            search_steps: search,
            unshare_copies: copies,
            cumulative_steps: steps,
        });
        search = 0;
        copies = 0;
        on_contract(stats.len(), &g);
    }
    Ok(DagRun { stats, graph: g, steps })
}

struct Effect {
    /// Losim steps represented.
    steps: u64,
    copies: u64,
}

impl SharedGraph {
    fn next_is_contract(&self) -> bool {
        match &self.cursor {
            Cursor::Active(f) => f.n > 0 && matches!(self.store.kind(*f.ids.last().unwrap()), DKind::Scope(..)),
            _ => false,
        }
    }

    fn focus_on(&mut self, path: Vec<u32>, i: u32) {
        let ids = self.walk(&path);
        self.cursor = Cursor::Active(Focus { path, ids, n: 0, i });
    }

    /// One leftmost-outermost losim step, or a whole `var-n` + `unthunk`
    /// block; `None` at a normal form.
    fn step(&mut self, l: &LTrs) -> Result<Option<Effect>, LtrsError> {
        let one = |copies| Ok(Some(Effect { steps: 1, copies }));
        let mut f = match std::mem::replace(&mut self.cursor, Cursor::Plain) {
            Cursor::Plain => return Ok(None),
            Cursor::Init => {
                self.focus_on(Vec::new(), 0);
                return one(0);
            }
            Cursor::Active(f) => f,
        };
        let head = *f.ids.last().unwrap();
        match self.store.kind(head).clone() {
            DKind::App([a, _]) => {
                f.path.push(0);
                f.ids.push(a);
                f.n += 1;
                self.cursor = Cursor::Active(f);
                one(0)
            }
            DKind::Scope(sym, args) if f.n == 0 => {
                let def = l.get(&sym).ok_or_else(|| LtrsError::UnknownSymbol(sym.clone()))?;
                let x = self.store.mk(DKind::Var(f.i));
                let body = self.build(&def.ctx, &args, x);
                self.store.release(x);
                let abs = self.store.mk(DKind::Abs(f.i, body));
                let copies = self.replace(&f.path, abs);
                f.path.push(0);
                f.i += 1;
                self.focus_on(f.path, f.i);
                one(copies)
            }
            DKind::Scope(sym, args) => {
                let def = l.get(&sym).ok_or_else(|| LtrsError::UnknownSymbol(sym.clone()))?;
                let spine = f.ids[f.ids.len() - 2];
                let b1 = child(self.store.kind(spine), 1);
                let new = self.build(&def.ctx, &args, b1);
                f.path.pop();
                let copies = self.replace(&f.path, new);
                f.ids = self.walk(&f.path);
                f.n -= 1;
                self.cursor = Cursor::Active(f);
                one(copies)
            }
            DKind::Var(_) => {
                let n = f.n;
                // b_n .. b_1, so that b_1 ends on top
                for k in 0..n {
                    let mut p = f.path[..f.path.len() - n + k].to_vec();
                    p.push(1);
                    self.pending.push((p, f.i));
                }
                if let Some((p, i)) = self.pending.pop() {
                    self.focus_on(p, i);
                }
                Ok(Some(Effect {
                    steps: 1 + n as u64,
                    copies: 0,
                }))
            }
            other => unreachable!("no losim rule for a thunk over {other:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{family_size_closed, parse_lambda};
    use crate::losim::losim_run;
    use crate::ltrs::{example_ltrs, lambda_lift};

    fn v(j: u32) -> LosimTerm {
        LosimTerm::var(j)
    }

    #[test]
    fn sharing_is_maximal() {
        let g = to_dag(&LosimTerm::app(v(0), v(0)));
        assert_eq!(g.node_count(), 2);
        assert_eq!(to_dag(&v(3)).node_count(), 1);
        assert_eq!(to_dag(&v(3)).readback(), v(3));
        g.audit().unwrap();
    }

    #[test]
    fn readback_inverts_to_dag() {
        let (l, s) = example_ltrs();
        for step in losim_run(&l, &s, 100).unwrap().steps {
            let g = to_dag(&step.term);
            assert_eq!(g.readback(), step.term);
            assert!(g.node_count() as u64 <= step.term.size());
        }
    }

    #[test]
    fn example_run() {
        let (l, s) = example_ltrs();
        let tr = losim_run(&l, &s, 100).unwrap();
        let mut seen = Vec::new();
        let run = dag_lo_simulate_with(&l, &s, 30, |_, g| {
            g.audit().unwrap();
            seen.push(g.readback());
        })
        .unwrap();
        assert_eq!(run.stats.len(), 2);
        let want: Vec<LosimTerm> = tr.contract_terms().map(|s| s.term.clone()).collect();
        assert_eq!(seen, want);
        assert_eq!(run.graph.readback().to_string(), "\\x0.\\x1.@(x1,x0)");
        assert_eq!(run.steps, tr.len() as u64);
        let idx: Vec<u64> = tr.contract_terms().map(|s| s.index as u64).collect();
        assert_eq!(run.stats.iter().map(|s| s.cumulative_steps).collect::<Vec<_>>(), idx);
    }

    #[test]
    fn identity_has_no_contracts() {
        let (l, s) = lambda_lift(&parse_lambda("\\x.x").unwrap()).unwrap();
        let run = dag_lo_simulate(&l, &s, 30).unwrap();
        assert!(run.stats.is_empty());
    }

    #[test]
    fn contract_limit_keeps_partial_run() {
        let (l, s) = lambda_lift(&parse_lambda("(\\x.x x)(\\x.x x)").unwrap()).unwrap();
        match dag_lo_simulate(&l, &s, 5) {
            Err(DagError::ContractLimit(e)) => assert_eq!(e.partial.stats.len(), 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn size_family_stays_small() {
        let (l, s) = lambda_lift(&family_size_closed(8)).unwrap();
        let run = dag_lo_simulate(&l, &s, 30).unwrap();
        assert_eq!(run.stats.len(), 8);
        run.graph.audit().unwrap();
        assert!(run.graph.node_count() < 300, "{}", run.graph.node_count());
        assert!(run.graph.tree_size() >= 1 << 8);
    }
}
