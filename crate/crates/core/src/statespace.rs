//! State-graph exploration, canonical state storage and deadlock checking.
//!
//! States are stored packed: each configuration becomes a fixed-width byte
//! key (cells, set bitsets, interned process term). [`Explorer`] expands
//! states on demand so that searches that stop early never build the rest of
//! the graph; [`explore`] expands everything breadth-first.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::hash::BuildHasher;

use hashbrown::HashTable;
use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;

use crate::kernel::{Config, EventLabel, GlobalState, Model, ModelError, Scalar, Sym, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExploreError {
    #[error("state limit exceeded: {0} states found")]
    StateLimitExceeded(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub type StateId = u32;

/// Label index into the graph's label table, plus target state.
pub type Edge = (u32, StateId);

/// A finite state graph with evaluated macros, read through successor queries.
pub trait StateGraph {
    /// Number of states discovered so far.
    fn state_count(&self) -> usize;
    fn initial(&self) -> StateId {
        0
    }
    fn successors(&mut self, s: StateId) -> Result<&[Edge], ExploreError>;
    fn label(&self, l: u32) -> &EventLabel;
    fn macro_bits(&self, s: StateId) -> u64;
    fn is_terminated(&self, s: StateId) -> bool;
    fn macro_index(&self, name: &str) -> Option<usize>;
}

const UNEXPANDED: u32 = u32::MAX;

fn scalar_code(s: Scalar) -> u8 {
    match s {
        Scalar::Sym(x) => x as u8,
        Scalar::Bool(false) => 0x80,
        Scalar::Bool(true) => 0x81,
    }
}

fn scalar_decode(b: u8) -> Scalar {
    match b {
        0x80 => Scalar::Bool(false),
        0x81 => Scalar::Bool(true),
        x => Scalar::Sym(Sym::ALL[x as usize]),
    }
}

/// Lazily expanded reachable graph of a model. Only the first 32 macros are
/// evaluated per state.
pub struct Explorer<'m> {
    model: &'m Model,
    limit: usize,
    cells: usize,
    /// (first word, byte count) per set; only the bytes the universe needs are kept.
    set_layout: Vec<(usize, usize)>,
    set_words: usize,
    set_bytes: usize,
    key_len: usize,
    count: usize,
    /// False while sweeping: no edges, spans or macro values are kept.
    record: bool,
    keys: Vec<u8>,
    table: HashTable<u32>,
    hasher: FxBuildHasher,
    terms: IndexSet<Term, FxBuildHasher>,
    term_terminated: Vec<bool>,
    macro_bits: Vec<u32>,
    /// (start, len) into `edges`; `start == UNEXPANDED` until expanded.
    spans: Vec<(u32, u32)>,
    edges: Vec<Edge>,
    labels: IndexSet<EventLabel, FxBuildHasher>,
    macro_names: Vec<String>,
    scratch: Vec<u8>,
}

impl<'m> Explorer<'m> {
    /// Creates an explorer holding only the initial state.
    pub fn new(model: &'m Model, state_limit: usize) -> Result<Explorer<'m>, ExploreError> {
        Explorer::with_recording(model, state_limit, true)
    }

    fn with_recording(model: &'m Model, state_limit: usize, record: bool) -> Result<Explorer<'m>, ExploreError> {
        let init = model.initial_config();
        let cells = init.globals.cells.len();
        let set_layout: Vec<(usize, usize)> =
            model.set_layout().into_iter().map(|(w, n)| (w, n.div_ceil(8))).collect();
        let set_bytes = set_layout.iter().map(|l| l.1).sum::<usize>();
        let mut ex = Explorer {
            model,
            limit: state_limit.max(1),
            cells,
            set_layout,
            set_words: init.globals.sets.len(),
            set_bytes,
            key_len: cells + set_bytes + 4,
            count: 0,
            record,
            keys: Vec::new(),
            table: HashTable::new(),
            hasher: FxBuildHasher,
            terms: IndexSet::default(),
            term_terminated: Vec::new(),
            macro_bits: Vec::new(),
            spans: Vec::new(),
            edges: Vec::new(),
            labels: IndexSet::default(),
            macro_names: model.macro_names().take(32).map(String::from).collect(),
            scratch: Vec::new(),
        };
        ex.intern(&init)?;
        Ok(ex)
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    fn key(&self, s: StateId) -> &[u8] {
        let a = s as usize * self.key_len;
        &self.keys[a..a + self.key_len]
    }

    fn encode(&mut self, c: &Config) -> u32 {
        let (term_id, fresh) = self.terms.insert_full(c.term.clone());
        if fresh {
            self.term_terminated.push(self.model.is_terminated_config(c));
        }
        self.scratch.clear();
        self.scratch.extend(c.globals.cells.iter().map(|s| scalar_code(*s)));
        for &(w, n) in &self.set_layout {
            let words = &c.globals.sets[w..w + n.div_ceil(8)];
            self.scratch.extend(words.iter().flat_map(|x| x.to_le_bytes()).take(n));
        }
        self.scratch.extend_from_slice(&(term_id as u32).to_le_bytes());
        term_id as u32
    }

    /// Returns the id of `c`, adding it if new.
    fn intern(&mut self, c: &Config) -> Result<StateId, ExploreError> {
        self.encode(c);
        let hash = self.hasher.hash_one(&self.scratch);
        let (keys, key_len, scratch) = (&self.keys, self.key_len, &self.scratch);
        let eq = |&id: &u32| &keys[id as usize * key_len..(id as usize + 1) * key_len] == scratch.as_slice();
        if let Some(&id) = self.table.find(hash, eq) {
            return Ok(id);
        }
        let id = self.count;
        if id >= self.limit {
            return Err(ExploreError::StateLimitExceeded(id + 1));
        }
        self.count += 1;
        self.keys.extend_from_slice(&self.scratch);
        let (keys, hasher) = (&self.keys, &self.hasher);
        self.table.insert_unique(hash, id as u32, |&i| {
            hasher.hash_one(&keys[i as usize * key_len..(i as usize + 1) * key_len])
        });
        if self.record {
            self.macro_bits.push(self.model.macro_bits(&c.globals)? as u32);
            self.spans.push((UNEXPANDED, 0));
        }
        Ok(id as StateId)
    }

    /// Reconstructs the configuration of a state.
    pub fn config(&self, s: StateId) -> Config {
        let k = self.key(s);
        let t = u32::from_le_bytes(k[self.cells + self.set_bytes..].try_into().unwrap());
        Config { globals: self.globals(s), term: self.terms[t as usize].clone() }
    }

    /// Global variables of a state, without rebuilding its process term.
    pub fn globals(&self, s: StateId) -> GlobalState {
        let k = self.key(s);
        let cells = k[..self.cells].iter().map(|b| scalar_decode(*b)).collect();
        let mut sets = vec![0u64; self.set_words];
        let mut at = self.cells;
        for &(w, n) in &self.set_layout {
            for (i, b) in k[at..at + n].iter().enumerate() {
                sets[w + i / 8] |= (*b as u64) << (8 * (i % 8));
            }
            at += n;
        }
        GlobalState { cells, sets: sets.into_boxed_slice() }
    }

    /// Finds the id of an already discovered configuration.
    pub fn state_of(&mut self, c: &Config) -> Option<StateId> {
        self.terms.get_index_of(&c.term)?;
        self.encode(c);
        let hash = self.hasher.hash_one(&self.scratch);
        let (keys, key_len, scratch) = (&self.keys, self.key_len, &self.scratch);
        self.table
            .find(hash, |&id| &keys[id as usize * key_len..(id as usize + 1) * key_len] == scratch.as_slice())
            .copied()
    }

    pub fn is_expanded(&self, s: StateId) -> bool {
        self.spans[s as usize].0 != UNEXPANDED
    }

    fn expand(&mut self, s: StateId) -> Result<(), ExploreError> {
        if self.is_expanded(s) {
            return Ok(());
        }
        let config = self.config(s);
        let succ = self.model.successors(&config)?;
        let start = self.edges.len() as u32;
        for (label, next) in succ {
            let d = self.intern(&next)?;
            let (l, _) = self.labels.insert_full(label);
            self.edges.push((l as u32, d));
        }
        self.spans[s as usize] = (start, self.edges.len() as u32 - start);
        Ok(())
    }

    /// Expands every reachable state breadth-first (ids are discovery order).
    pub fn explore_all(&mut self) -> Result<(), ExploreError> {
        let mut s = 0;
        while s < self.count {
            self.expand(s as StateId)?;
            s += 1;
        }
        Ok(())
    }

    pub fn transition_count(&self) -> usize {
        self.edges.len()
    }

    pub fn macro_names(&self) -> &[String] {
        &self.macro_names
    }

    pub fn labels(&self) -> impl Iterator<Item = &EventLabel> {
        self.labels.iter()
    }

    /// Number of distinct interned process terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }
}

impl StateGraph for Explorer<'_> {
    fn state_count(&self) -> usize {
        self.count
    }

    fn successors(&mut self, s: StateId) -> Result<&[Edge], ExploreError> {
        self.expand(s)?;
        let (a, n) = self.spans[s as usize];
        Ok(&self.edges[a as usize..a as usize + n as usize])
    }

    fn label(&self, l: u32) -> &EventLabel {
        &self.labels[l as usize]
    }

    fn macro_bits(&self, s: StateId) -> u64 {
        self.macro_bits[s as usize] as u64
    }

    fn is_terminated(&self, s: StateId) -> bool {
        let k = self.key(s);
        let t = u32::from_le_bytes(k[self.cells + self.set_bytes..].try_into().unwrap());
        self.term_terminated[t as usize]
    }

    fn macro_index(&self, name: &str) -> Option<usize> {
        self.macro_names.iter().position(|n| n == name)
    }
}

/// A fully expanded reachable graph. State 0 is initial; ids follow
/// breadth-first discovery order.
pub struct TransitionSystem<'m> {
    inner: Explorer<'m>,
}

impl<'m> TransitionSystem<'m> {
    pub fn config(&self, s: StateId) -> Config {
        self.inner.config(s)
    }

    pub fn state_of(&mut self, c: &Config) -> Option<StateId> {
        self.inner.state_of(c)
    }

    pub fn transition_count(&self) -> usize {
        self.inner.transition_count()
    }

    pub fn model(&self) -> &'m Model {
        self.inner.model
    }

    /// Outgoing edges of an (always expanded) state.
    pub fn edges(&self, s: StateId) -> &[Edge] {
        let (a, n) = self.inner.spans[s as usize];
        &self.inner.edges[a as usize..a as usize + n as usize]
    }

    /// All transitions as (source, label, target), in id order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, &EventLabel, StateId)> + '_ {
        (0..self.inner.spans.len() as StateId).flat_map(move |s| {
            self.edges(s).iter().map(move |&(l, d)| (s, self.inner.label(l), d))
        })
    }

    pub fn macro_names(&self) -> &[String] {
        self.inner.macro_names()
    }

    /// Line-oriented dump: `state <id> <bits-hex>` lines, then `edge <src> <label> <dst>` lines.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for s in 0..self.inner.spans.len() {
            writeln!(out, "state {s} {:x}", self.inner.macro_bits[s]).unwrap();
        }
        for (s, l, d) in self.transitions() {
            writeln!(out, "edge {s} {l} {d}").unwrap();
        }
        out
    }

    pub fn into_explorer(self) -> Explorer<'m> {
        self.inner
    }
}

impl StateGraph for TransitionSystem<'_> {
    fn state_count(&self) -> usize {
        self.inner.state_count()
    }

    fn successors(&mut self, s: StateId) -> Result<&[Edge], ExploreError> {
        Ok(self.edges(s))
    }

    fn label(&self, l: u32) -> &EventLabel {
        self.inner.label(l)
    }

    fn macro_bits(&self, s: StateId) -> u64 {
        self.inner.macro_bits(s)
    }

    fn is_terminated(&self, s: StateId) -> bool {
        self.inner.is_terminated(s)
    }

    fn macro_index(&self, name: &str) -> Option<usize> {
        self.inner.macro_index(name)
    }
}

/// Explores every configuration reachable from the model's initial one.
pub fn explore(model: &Model, state_limit: usize) -> Result<TransitionSystem<'_>, ExploreError> {
    let mut inner = Explorer::new(model, state_limit)?;
    inner.explore_all()?;
    Ok(TransitionSystem { inner })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeadlockReport {
    DeadlockFree,
    /// Shortest event path from the initial state to a deadlocked state.
    Deadlocked { witness: Vec<EventLabel>, state: StateId },
}

impl DeadlockReport {
    pub fn is_free(&self) -> bool {
        matches!(self, DeadlockReport::DeadlockFree)
    }
}

/// Breadth-first search for a state with no successors that has not terminated.
/// Works on lazy graphs too, expanding as it goes.
pub fn check_deadlock<G: StateGraph>(ts: &mut G) -> Result<DeadlockReport, ExploreError> {
    let mut parent: Vec<(StateId, u32)> = vec![(u32::MAX, 0)];
    let mut queue = VecDeque::from([ts.initial()]);
    parent.resize(ts.state_count().max(1), (u32::MAX, u32::MAX));
    parent[ts.initial() as usize] = (ts.initial(), u32::MAX);
    while let Some(s) = queue.pop_front() {
        let succ = ts.successors(s)?.to_vec();
        if parent.len() < ts.state_count() {
            parent.resize(ts.state_count(), (u32::MAX, u32::MAX));
        }
        for &(l, d) in &succ {
            if parent[d as usize].0 == u32::MAX {
                parent[d as usize] = (s, l);
                queue.push_back(d);
            }
        }
        if succ.is_empty() && !ts.is_terminated(s) {
            let mut witness = Vec::new();
            let mut cur = s;
            while cur != ts.initial() {
                let (p, l) = parent[cur as usize];
                witness.push(ts.label(l).clone());
                cur = p;
            }
            witness.reverse();
            return Ok(DeadlockReport::Deadlocked { witness, state: s });
        }
    }
    Ok(DeadlockReport::DeadlockFree)
}

/// One transition seen by [`sweep`].
pub struct SweepEdge<'a> {
    pub source: StateId,
    pub from: &'a Config,
    pub label: &'a EventLabel,
    pub target: StateId,
    pub to: &'a Config,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSummary {
    pub states: usize,
    pub transitions: usize,
    pub deadlock: DeadlockReport,
}

/// Visits every reachable transition breadth-first, keeping only the set of
/// seen states and parent links. Needs far less memory than [`explore`]; state
/// ids and the deadlock witness agree with it.
pub fn sweep<F: FnMut(&SweepEdge<'_>)>(
    model: &Model,
    state_limit: usize,
    mut visit: F,
) -> Result<SweepSummary, ExploreError> {
    let mut ex = Explorer::with_recording(model, state_limit, false)?;
    let mut parents: Vec<(StateId, u32)> = vec![(0, u32::MAX)];
    let mut labels: IndexSet<EventLabel, FxBuildHasher> = IndexSet::default();
    let mut transitions = 0;
    let mut deadlocked = None;
    let mut s = 0;
    while s < ex.count {
        let source = s as StateId;
        let from = ex.config(source);
        let succ = model.successors(&from)?;
        if succ.is_empty() && deadlocked.is_none() && !model.is_terminated_config(&from) {
            deadlocked = Some(source);
        }
        for (label, to) in &succ {
            let target = ex.intern(to)?;
            if target as usize == parents.len() {
                parents.push((source, labels.insert_full(label.clone()).0 as u32));
            }
            transitions += 1;
            visit(&SweepEdge { source, from: &from, label, target, to });
        }
        s += 1;
    }
    let deadlock = match deadlocked {
        None => DeadlockReport::DeadlockFree,
        Some(state) => {
            let mut witness = Vec::new();
            let mut cur = state;
            while cur != 0 {
                let (p, l) = parents[cur as usize];
                witness.push(labels[l as usize].clone());
                cur = p;
            }
            witness.reverse();
            DeadlockReport::Deadlocked { witness, state }
        }
    };
    Ok(SweepSummary { states: ex.count, transitions, deadlock })
}
