//! Checking a formula against a state graph.
//!
//! Positions are (incoming event, state). A state without successors repeats
//! forever with no incoming event, so every path is infinite.
//!
//! Safety formulas are decided by breadth-first search over the graph times a
//! subset monitor of the formula's automaton: the first empty subset marks a
//! shortest bad prefix. Other formulas use nested depth-first search on the
//! product with the automaton of the negation and yield a lasso.

use std::collections::HashMap;
use std::collections::VecDeque;
use std::time::Instant;

use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;

use super::buchi::{generalized, Buchi, Generalized};
use super::formula::{Atom, Ltl};
use crate::kernel::EventLabel;
use crate::statespace::{ExploreError, StateGraph, StateId};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Position {
    /// `None` at index 0 and on stutter steps.
    pub event: Option<EventLabel>,
    pub state: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    /// The path `prefix · lasso^ω` violates the formula. An empty lasso means
    /// the prefix is already bad: no continuation satisfies the formula.
    Violated { prefix: Vec<Position>, lasso: Vec<Position> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Graph states discovered when the search ended.
    pub states: usize,
    pub product_states: usize,
    pub wall_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub stats: Stats,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self.outcome, Outcome::Holds)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("formula mentions undeclared macro `{0}`")]
    UnboundMacro(String),
    #[error(transparent)]
    Explore(#[from] ExploreError),
    #[error("monitor and nested search disagree on `{0}`")]
    Disagreement(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Use nested depth-first search even for safety formulas.
    pub force_nested: bool,
    /// Run both procedures and fail if their verdicts differ.
    pub cross_check: bool,
}

pub fn check<G: StateGraph>(g: &mut G, f: &Ltl) -> Result<Verdict, CheckError> {
    check_with(g, f, CheckOptions::default())
}

pub fn check_with<G: StateGraph>(g: &mut G, f: &Ltl, opts: CheckOptions) -> Result<Verdict, CheckError> {
    let start = Instant::now();
    let safety = f.is_syntactic_safety() && !opts.force_nested;
    let mut verdict = if safety { monitor_search(g, f)? } else { nested_search(g, f)? };
    if opts.cross_check {
        let other = if safety { nested_search(g, f)? } else if f.is_syntactic_safety() {
            monitor_search(g, f)?
        } else {
            verdict.clone()
        };
        if other.holds() != verdict.holds() {
            return Err(CheckError::Disagreement(f.to_string()));
        }
    }
    verdict.stats.states = g.state_count();
    verdict.stats.wall_ms = start.elapsed().as_millis();
    Ok(verdict)
}

/// Maps graph positions to letters over a formula's atoms.
struct Valuation {
    /// Per formula atom: macro bit to copy, or the event it tests.
    atoms: Vec<Result<usize, EventLabel>>,
    /// Event-atom bits per graph label id, filled lazily.
    by_label: Vec<Option<u64>>,
}

impl Valuation {
    fn new<G: StateGraph>(g: &G, atoms: &[Atom]) -> Result<Valuation, CheckError> {
        let atoms = atoms
            .iter()
            .map(|a| match a {
                Atom::State(n) => g.macro_index(n).map(Ok).ok_or_else(|| CheckError::UnboundMacro(n.clone())),
                Atom::Event(e) => Ok(Err(e.clone())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Valuation { atoms, by_label: Vec::new() })
    }

    fn letter<G: StateGraph>(&mut self, g: &G, s: StateId, label: Option<u32>) -> u64 {
        let bits = g.macro_bits(s);
        let mut l = 0u64;
        for (i, a) in self.atoms.iter().enumerate() {
            if let Ok(m) = a {
                if bits >> m & 1 == 1 {
                    l |= 1 << i;
                }
            }
        }
        if let Some(id) = label {
            let id = id as usize;
            if self.by_label.len() <= id {
                self.by_label.resize(id + 1, None);
            }
            let ev = *self.by_label[id].get_or_insert_with(|| {
                let lab = g.label(id as u32);
                let mut b = 0;
                for (i, a) in self.atoms.iter().enumerate() {
                    if matches!(a, Err(e) if e == lab) {
                        b |= 1 << i;
                    }
                }
                b
            });
            l |= ev;
        }
        l
    }
}

/// Successors of a graph state, with the stutter loop for states without any.
fn moves<G: StateGraph>(g: &mut G, s: StateId) -> Result<Vec<(Option<u32>, StateId)>, CheckError> {
    let succ = g.successors(s)?;
    if succ.is_empty() {
        Ok(vec![(None, s)])
    } else {
        Ok(succ.iter().map(|&(l, d)| (Some(l), d)).collect())
    }
}

fn position<G: StateGraph>(g: &G, label: Option<u32>, state: StateId) -> Position {
    Position { event: label.map(|l| g.label(l).clone()), state }
}

struct Monitor {
    aut: Generalized,
    subsets: IndexSet<Vec<u32>, FxBuildHasher>,
    step: HashMap<(u32, u64), u32, FxBuildHasher>,
}

impl Monitor {
    fn new(f: &Ltl) -> Monitor {
        let aut = generalized(f);
        let mut subsets = IndexSet::default();
        subsets.insert(Vec::new());
        Monitor { aut, subsets, step: HashMap::default() }
    }

    fn initial(&mut self, letter: u64) -> u32 {
        let set: Vec<u32> =
            self.aut.initial.iter().copied().filter(|&b| self.aut.letters[b as usize] == letter).collect();
        self.subsets.insert_full(set).0 as u32
    }

    fn next(&mut self, q: u32, letter: u64) -> u32 {
        if let Some(&r) = self.step.get(&(q, letter)) {
            return r;
        }
        let mut set: Vec<u32> = self.subsets[q as usize]
            .iter()
            .flat_map(|&b| self.aut.succ[b as usize].iter().copied())
            .filter(|&b| self.aut.letters[b as usize] == letter)
            .collect();
        set.sort_unstable();
        set.dedup();
        let r = self.subsets.insert_full(set).0 as u32;
        self.step.insert((q, letter), r);
        r
    }
}

const EMPTY: u32 = 0;

fn monitor_search<G: StateGraph>(g: &mut G, f: &Ltl) -> Result<Verdict, CheckError> {
    let mut val = Valuation::new(g, &f.atoms())?;
    let mut mon = Monitor::new(f);
    // Product nodes: (graph state, subset, parent node, incoming label).
    let mut nodes: Vec<(StateId, u32, u32, Option<u32>)> = Vec::new();
    let mut seen: HashMap<u64, (), FxBuildHasher> = HashMap::default();
    let s0 = g.initial();
    let l0 = val.letter(g, s0, None);
    let q0 = mon.initial(l0);
    let path = |nodes: &[(StateId, u32, u32, Option<u32>)], g: &G, mut i: usize| {
        let mut out = Vec::new();
        loop {
            let (s, _, p, l) = nodes[i];
            out.push(position(g, l, s));
            if p == u32::MAX {
                break;
            }
            i = p as usize;
        }
        out.reverse();
        out
    };
    nodes.push((s0, q0, u32::MAX, None));
    if q0 == EMPTY {
        let prefix = path(&nodes, g, 0);
        return Ok(violated(prefix, Vec::new(), 1));
    }
    seen.insert((s0 as u64) << 32 | q0 as u64, ());
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (s, q, _, _) = nodes[i];
        for (l, d) in moves(g, s)? {
            let letter = val.letter(g, d, l);
            let q2 = mon.next(q, letter);
            if q2 == EMPTY {
                nodes.push((d, q2, i as u32, l));
                let prefix = path(&nodes, g, nodes.len() - 1);
                return Ok(violated(prefix, Vec::new(), seen.len()));
            }
            if seen.insert((d as u64) << 32 | q2 as u64, ()).is_none() {
                nodes.push((d, q2, i as u32, l));
                queue.push_back(nodes.len() - 1);
            }
        }
    }
    Ok(Verdict { outcome: Outcome::Holds, stats: Stats { product_states: seen.len(), ..Stats::default() } })
}

fn violated(prefix: Vec<Position>, lasso: Vec<Position>, product_states: usize) -> Verdict {
    Verdict { outcome: Outcome::Violated { prefix, lasso }, stats: Stats { product_states, ..Stats::default() } }
}

const CYAN: u8 = 1;
const BLUE: u8 = 2;
const RED: u8 = 3;

type PNode = (StateId, u32);

fn key(n: PNode) -> u64 {
    (n.0 as u64) << 32 | n.1 as u64
}

fn product_succ<G: StateGraph>(
    g: &mut G,
    ba: &Buchi,
    val: &mut Valuation,
    n: PNode,
) -> Result<Vec<(Option<u32>, PNode)>, CheckError> {
    let mut out = Vec::new();
    for (l, d) in moves(g, n.0)? {
        let letter = val.letter(g, d, l);
        for &b in &ba.succ[n.1 as usize] {
            if ba.letters[b as usize] == letter {
                out.push((l, (d, b)));
            }
        }
    }
    Ok(out)
}

struct Frame {
    node: PNode,
    label: Option<u32>,
    succ: Vec<(Option<u32>, PNode)>,
    next: usize,
}

/// Nested depth-first search (cyan/blue/red colouring) for an accepting lasso
/// of the graph times the automaton of `¬f`.
fn nested_search<G: StateGraph>(g: &mut G, f: &Ltl) -> Result<Verdict, CheckError> {
    let ba = super::buchi::to_buchi(&Ltl::not(f.clone()));
    let mut val = Valuation::new(g, &ba.atoms)?;
    let mut color: HashMap<u64, u8, FxBuildHasher> = HashMap::default();
    let s0 = g.initial();
    let l0 = val.letter(g, s0, None);
    let roots: Vec<PNode> =
        ba.initial.iter().copied().filter(|&b| ba.letters[b as usize] == l0).map(|b| (s0, b)).collect();
    let acc = |n: PNode| ba.accepting[n.1 as usize];
    for root in roots {
        if color.contains_key(&key(root)) {
            continue;
        }
        let succ = product_succ(g, &ba, &mut val, root)?;
        color.insert(key(root), CYAN);
        let mut blue = vec![Frame { node: root, label: None, succ, next: 0 }];
        while let Some(top) = blue.last_mut() {
            if top.next < top.succ.len() {
                let (l, t) = top.succ[top.next];
                top.next += 1;
                let s = top.node;
                match color.get(&key(t)).copied() {
                    Some(CYAN) if acc(s) || acc(t) => {
                        let lasso = close_cycle(g, &blue, t, &[(l, t)]);
                        return Ok(lasso_verdict(g, &blue, t, lasso, color.len()));
                    }
                    None => {
                        let succ = product_succ(g, &ba, &mut val, t)?;
                        color.insert(key(t), CYAN);
                        blue.push(Frame { node: t, label: l, succ, next: 0 });
                    }
                    _ => {}
                }
            } else {
                let s = top.node;
                if acc(s) {
                    if let Some((t, red_path)) = red_search(g, &ba, &mut val, &mut color, s)? {
                        let lasso = close_cycle(g, &blue, t, &red_path);
                        return Ok(lasso_verdict(g, &blue, t, lasso, color.len()));
                    }
                    color.insert(key(s), RED);
                } else {
                    color.insert(key(s), BLUE);
                }
                blue.pop();
            }
        }
    }
    Ok(Verdict { outcome: Outcome::Holds, stats: Stats { product_states: color.len(), ..Stats::default() } })
}

/// Searches from `seed` through blue nodes for a cyan node. Returns it and the path to it.
#[allow(clippy::type_complexity)]
fn red_search<G: StateGraph>(
    g: &mut G,
    ba: &Buchi,
    val: &mut Valuation,
    color: &mut HashMap<u64, u8, FxBuildHasher>,
    seed: PNode,
) -> Result<Option<(PNode, Vec<(Option<u32>, PNode)>)>, CheckError> {
    let mut stack: Vec<(Option<u32>, PNode, Vec<(Option<u32>, PNode)>, usize)> =
        vec![(None, seed, product_succ(g, ba, val, seed)?, 0)];
    while let Some(top) = stack.last_mut() {
        if top.3 < top.2.len() {
            let (l, t) = top.2[top.3];
            top.3 += 1;
            match color.get(&key(t)).copied() {
                Some(CYAN) => {
                    let mut path: Vec<(Option<u32>, PNode)> = stack[1..].iter().map(|f| (f.0, f.1)).collect();
                    path.push((l, t));
                    return Ok(Some((t, path)));
                }
                Some(BLUE) => {
                    color.insert(key(t), RED);
                    let succ = product_succ(g, ba, val, t)?;
                    stack.push((l, t, succ, 0));
                }
                _ => {}
            }
        } else {
            stack.pop();
        }
    }
    Ok(None)
}

/// Cycle positions after `t`: the blue stack above `t`, then `tail` (which ends at `t`).
fn close_cycle<G: StateGraph>(g: &G, blue: &[Frame], t: PNode, tail: &[(Option<u32>, PNode)]) -> Vec<Position> {
    let j = blue.iter().position(|f| f.node == t).expect("cycle target is on the stack");
    let mut lasso: Vec<Position> = blue[j + 1..].iter().map(|f| position(g, f.label, f.node.0)).collect();
    lasso.extend(tail.iter().map(|&(l, n)| position(g, l, n.0)));
    lasso
}

fn lasso_verdict<G: StateGraph>(g: &G, blue: &[Frame], t: PNode, lasso: Vec<Position>, product: usize) -> Verdict {
    let j = blue.iter().position(|f| f.node == t).expect("cycle target is on the stack");
    let prefix = blue[..=j].iter().map(|f| position(g, f.label, f.node.0)).collect();
    violated(prefix, lasso, product)
}
