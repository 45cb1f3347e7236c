//! Random labelled graphs, random formulas, and a brute-force lasso
//! semantics used to cross-examine the LTL checker.

use ceremony_checker::kernel::EventLabel;
use ceremony_checker::ltl::{check_with, Atom, CheckOptions, Ltl, Outcome, Position};
use ceremony_checker::statespace::{Edge, ExploreError, StateGraph, StateId};
use rand::Rng;

pub const ATOM_BITS: [&str; 2] = ["p", "q"];

pub fn event_e() -> EventLabel {
    EventLabel::named("e")
}

#[derive(Clone, Debug)]
pub struct RandomGraph {
    pub edges: Vec<Vec<Edge>>,
    pub labels: Vec<EventLabel>,
    pub bits: Vec<u64>,
}

impl StateGraph for RandomGraph {
    fn state_count(&self) -> usize {
        self.edges.len()
    }

    fn successors(&mut self, s: StateId) -> Result<&[Edge], ExploreError> {
        Ok(&self.edges[s as usize])
    }

    fn label(&self, l: u32) -> &EventLabel {
        &self.labels[l as usize]
    }

    fn macro_bits(&self, s: StateId) -> u64 {
        self.bits[s as usize]
    }

    fn is_terminated(&self, _: StateId) -> bool {
        false
    }

    fn macro_index(&self, name: &str) -> Option<usize> {
        ATOM_BITS.iter().position(|a| *a == name)
    }
}

/// Mostly sparse graphs so that bounded path enumeration stays cheap.
pub fn random_graph<R: Rng>(rng: &mut R, max_states: usize) -> RandomGraph {
    let n = rng.gen_range(1..=max_states);
    let labels = vec![event_e(), EventLabel::named("f")];
    let mut edges = Vec::with_capacity(n);
    for _ in 0..n {
        let degree = match rng.gen_range(0..100) {
            0..=5 => 0,
            6..=75 => 1,
            76..=95 => 2,
            _ => 3,
        };
        let mut out: Vec<Edge> = Vec::new();
        for _ in 0..degree {
            let e = (rng.gen_range(0..2u32), rng.gen_range(0..n as u32));
            if !out.contains(&e) {
                out.push(e);
            }
        }
        edges.push(out);
    }
    let bits = (0..n).map(|_| rng.gen_range(0..4u64)).collect();
    RandomGraph { edges, labels, bits }
}

pub fn random_formula<R: Rng>(rng: &mut R, depth: usize) -> Ltl {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..10) {
            0 => Ltl::True,
            1 => Ltl::False,
            2..=4 => Ltl::state("p"),
            5..=7 => Ltl::state("q"),
            _ => Ltl::event(event_e()),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..9) {
        0 => Ltl::not(random_formula(rng, d)),
        1 => Ltl::and(random_formula(rng, d), random_formula(rng, d)),
        2 => Ltl::or(random_formula(rng, d), random_formula(rng, d)),
        3 => Ltl::implies(random_formula(rng, d), random_formula(rng, d)),
        4 => Ltl::x(random_formula(rng, d)),
        5 => Ltl::g(random_formula(rng, d)),
        6 => Ltl::f(random_formula(rng, d)),
        _ => Ltl::u(random_formula(rng, d), random_formula(rng, d)),
    }
}

/// One position of a path: (event that entered it, state).
pub type Pos = (Option<u32>, u32);

/// Moves from a position: graph edges, or a silent self-loop at a sink.
fn steps(g: &RandomGraph, s: u32) -> Vec<Pos> {
    let es = &g.edges[s as usize];
    if es.is_empty() {
        vec![(None, s)]
    } else {
        es.iter().map(|&(l, t)| (Some(l), t)).collect()
    }
}

fn atom_at(g: &RandomGraph, a: &Atom, p: Pos) -> bool {
    match a {
        Atom::State(n) => g.bits[p.1 as usize] >> ATOM_BITS.iter().position(|x| x == n).unwrap() & 1 == 1,
        Atom::Event(e) => p.0.is_some_and(|l| g.labels[l as usize] == *e),
    }
}

/// Truth of `f` at every position of `word[..] · word[start..]^ω`.
pub fn eval_lasso(g: &RandomGraph, f: &Ltl, word: &[Pos], start: usize) -> Vec<bool> {
    let n = word.len();
    let next = |k: usize| if k + 1 == n { start } else { k + 1 };
    match f {
        Ltl::True => vec![true; n],
        Ltl::False => vec![false; n],
        Ltl::Atom(a) => word.iter().map(|&p| atom_at(g, a, p)).collect(),
        Ltl::Not(a) => eval_lasso(g, a, word, start).into_iter().map(|v| !v).collect(),
        Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) => {
            let (x, y) = (eval_lasso(g, a, word, start), eval_lasso(g, b, word, start));
            (0..n)
                .map(|k| match f {
                    Ltl::And(..) => x[k] && y[k],
                    Ltl::Or(..) => x[k] || y[k],
                    _ => !x[k] || y[k],
                })
                .collect()
        }
        Ltl::X(a) => {
            let x = eval_lasso(g, a, word, start);
            (0..n).map(|k| x[next(k)]).collect()
        }
        Ltl::F(b) => eval_lasso(g, &Ltl::u(Ltl::True, (**b).clone()), word, start),
        Ltl::G(a) => {
            let x = eval_lasso(g, a, word, start);
            // Greatest fixpoint: start from true, sweep backwards twice.
            let mut v = vec![true; n];
            for _ in 0..2 {
                for k in (0..n).rev() {
                    v[k] = x[k] && v[next(k)];
                }
            }
            v
        }
        Ltl::U(a, b) => {
            let (x, y) = (eval_lasso(g, a, word, start), eval_lasso(g, b, word, start));
            let mut v = vec![false; n];
            for _ in 0..2 {
                for k in (0..n).rev() {
                    v[k] = y[k] || (x[k] && v[next(k)]);
                }
            }
            v
        }
    }
}

/// Number of paths with `len` positions, saturating.
fn path_count(g: &RandomGraph, len: usize) -> u64 {
    let mut ways = vec![0u64; g.edges.len()];
    ways[0] = 1;
    let mut total = 1;
    for _ in 1..len {
        let mut nw = vec![0u64; g.edges.len()];
        for (s, &w) in ways.iter().enumerate() {
            for (_, t) in steps(g, s as u32) {
                nw[t as usize] = nw[t as usize].saturating_add(w);
            }
        }
        ways = nw;
        total = ways.iter().fold(0u64, |a, &w| a.saturating_add(w));
    }
    total
}

/// Longest lasso length worth enumerating: every state count plus a margin,
/// capped so that the number of paths stays manageable.
pub fn lasso_bound(g: &RandomGraph) -> usize {
    let mut b = 2;
    while b < g.edges.len() + 4 && path_count(g, b + 1) <= 20_000 {
        b += 1;
    }
    b
}

/// Searches every lasso with at most `bound` positions for one violating `f`.
pub fn find_violation(g: &RandomGraph, f: &Ltl, bound: usize) -> Option<(Vec<Pos>, usize)> {
    fn go(g: &RandomGraph, f: &Ltl, bound: usize, word: &mut Vec<Pos>) -> Option<(Vec<Pos>, usize)> {
        let last = *word.last().unwrap();
        let succ = steps(g, last.1);
        for start in 0..word.len() {
            if succ.contains(&word[start]) && !eval_lasso(g, f, word, start)[0] {
                return Some((word.clone(), start));
            }
        }
        if word.len() < bound {
            for p in succ {
                word.push(p);
                if let Some(w) = go(g, f, bound, word) {
                    return Some(w);
                }
                word.pop();
            }
        }
        None
    }
    go(g, f, bound, &mut vec![(None, 0)])
}

fn to_pos(g: &RandomGraph, p: &Position) -> Pos {
    (p.event.as_ref().map(|e| g.labels.iter().position(|l| l == e).unwrap() as u32), p.state)
}

/// True when `prefix · lasso^ω` is a path of `g` that violates `f`.
pub fn certifies(g: &RandomGraph, f: &Ltl, prefix: &[Position], lasso: &[Position]) -> bool {
    if lasso.is_empty() || prefix.first().map(|p| (p.event.is_none(), p.state)) != Some((true, 0)) {
        return false;
    }
    let word: Vec<Pos> = prefix.iter().chain(lasso).map(|p| to_pos(g, p)).collect();
    let start = prefix.len();
    let closes = steps(g, word[word.len() - 1].1).contains(&word[start]);
    let walks = word.windows(2).all(|w| steps(g, w[0].1).contains(&w[1]));
    closes && walks && !eval_lasso(g, f, &word, start)[0]
}

#[derive(Debug)]
pub struct Trial {
    pub formula: Ltl,
    pub checker_holds: bool,
    pub nested_holds: bool,
    pub oracle_holds: bool,
}

impl Trial {
    pub fn agrees(&self) -> bool {
        self.checker_holds == self.oracle_holds && self.nested_holds == self.oracle_holds
    }
}

/// Decides `f` on `g` with the checker (both procedures) and with lasso
/// enumeration. A nested-search lasso is accepted as a violation witness
/// only after it is replayed and evaluated here.
pub fn trial(g: &RandomGraph, f: &Ltl) -> Trial {
    let checker = check_with(&mut g.clone(), f, CheckOptions::default()).expect("check");
    let nested = check_with(&mut g.clone(), f, CheckOptions { force_nested: true, cross_check: false }).expect("check");
    let mut oracle_holds = find_violation(g, f, lasso_bound(g)).is_none();
    if let Outcome::Violated { prefix, lasso } = &nested.outcome {
        if certifies(g, f, prefix, lasso) {
            oracle_holds = false;
        }
    }
    Trial { formula: f.clone(), checker_holds: checker.holds(), nested_holds: nested.holds(), oracle_holds }
}
