//! Formula to Büchi automaton via elementary sets.
//!
//! Automaton states are labelled: a run `B0 B1 ...` reads the word
//! `letter(B0) letter(B1) ...`, so a transition into `B` is guarded by the
//! exact valuation `letter(B)` of the formula's atoms.

use std::collections::HashMap;

use super::formula::{Atom, Ltl};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Core {
    True,
    Atom(usize),
    Not(usize),
    And(usize, usize),
    X(usize),
    U(usize, usize),
}

/// Subformula closure with shared nodes. Children always precede parents.
#[derive(Default)]
struct Closure {
    nodes: Vec<Core>,
    index: HashMap<Core, usize>,
}

impl Closure {
    fn add(&mut self, c: Core) -> usize {
        if let Core::Not(a) = c {
            if let Core::Not(inner) = self.nodes[a] {
                return inner;
            }
        }
        if let Some(&i) = self.index.get(&c) {
            return i;
        }
        self.nodes.push(c.clone());
        self.index.insert(c, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn lower(&mut self, f: &Ltl, atoms: &[Atom]) -> usize {
        match f {
            Ltl::True => self.add(Core::True),
            Ltl::False => {
                let t = self.add(Core::True);
                self.add(Core::Not(t))
            }
            Ltl::Atom(a) => {
                let i = atoms.iter().position(|x| x == a).expect("atom collected");
                self.add(Core::Atom(i))
            }
            Ltl::Not(a) => {
                let a = self.lower(a, atoms);
                self.add(Core::Not(a))
            }
            Ltl::And(a, b) => {
                let (a, b) = (self.lower(a, atoms), self.lower(b, atoms));
                self.add(Core::And(a, b))
            }
            Ltl::Or(a, b) => {
                let (a, b) = (self.lower(a, atoms), self.lower(b, atoms));
                let (na, nb) = (self.add(Core::Not(a)), self.add(Core::Not(b)));
                let both = self.add(Core::And(na, nb));
                self.add(Core::Not(both))
            }
            Ltl::Implies(a, b) => {
                let (a, b) = (self.lower(a, atoms), self.lower(b, atoms));
                let nb = self.add(Core::Not(b));
                let both = self.add(Core::And(a, nb));
                self.add(Core::Not(both))
            }
            Ltl::X(a) => {
                let a = self.lower(a, atoms);
                self.add(Core::X(a))
            }
            Ltl::F(a) => {
                let a = self.lower(a, atoms);
                let t = self.add(Core::True);
                self.add(Core::U(t, a))
            }
            Ltl::G(a) => {
                let a = self.lower(a, atoms);
                let na = self.add(Core::Not(a));
                let t = self.add(Core::True);
                let f = self.add(Core::U(t, na));
                self.add(Core::Not(f))
            }
            Ltl::U(a, b) => {
                let (a, b) = (self.lower(a, atoms), self.lower(b, atoms));
                self.add(Core::U(a, b))
            }
        }
    }
}

/// A state-labelled Büchi automaton over valuations of `atoms`.
#[derive(Clone, Debug)]
pub struct Buchi {
    pub atoms: Vec<Atom>,
    /// Valuation read on entering each state; bit `i` is `atoms[i]`.
    pub letters: Vec<u64>,
    pub initial: Vec<u32>,
    pub succ: Vec<Vec<u32>>,
    pub accepting: Vec<bool>,
}

impl Buchi {
    pub fn state_count(&self) -> usize {
        self.letters.len()
    }

    /// Human-readable guard of transitions entering `state`.
    pub fn guard(&self, state: u32) -> String {
        if self.atoms.is_empty() {
            return "true".into();
        }
        self.atoms
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if self.letters[state as usize] >> i & 1 == 1 {
                    a.to_string()
                } else {
                    format!("!{a}")
                }
            })
            .collect::<Vec<_>>()
            .join(" && ")
    }

    /// Whether some accepting run exists at all.
    pub fn is_empty(&self) -> bool {
        self.initial.is_empty()
    }
}

/// Generalized automaton with one acceptance set per until-subformula,
/// restricted to states from which a fair run exists.
#[derive(Clone, Debug)]
pub(crate) struct Generalized {
    pub atoms: Vec<Atom>,
    pub letters: Vec<u64>,
    pub initial: Vec<u32>,
    pub succ: Vec<Vec<u32>>,
    /// `acc[k][s]`: state `s` is in acceptance set `k`.
    pub acc: Vec<Vec<bool>>,
}

pub(crate) fn generalized(f: &Ltl) -> Generalized {
    let atoms = f.atoms();
    assert!(atoms.len() <= 64, "at most 64 atoms per formula");
    let mut cl = Closure::default();
    let root = cl.lower(f, &atoms);
    let n = cl.nodes.len();
    assert!(n <= 128, "formula too large");
    let base: Vec<usize> = (0..n)
        .filter(|&i| matches!(cl.nodes[i], Core::Atom(_) | Core::X(_) | Core::U(..)))
        .collect();
    assert!(base.len() <= 24, "formula too large");
    let bit = |t: u128, i: usize| t >> i & 1 == 1;

    // Enumerate consistent elementary sets as truth vectors over the closure.
    let mut truths: Vec<u128> = Vec::new();
    'assign: for mask in 0u64..(1u64 << base.len()) {
        let mut t: u128 = 0;
        for (k, &i) in base.iter().enumerate() {
            if mask >> k & 1 == 1 {
                t |= 1 << i;
            }
        }
        for i in 0..n {
            let v = match cl.nodes[i] {
                Core::True => true,
                Core::Not(a) => !bit(t, a),
                Core::And(a, b) => bit(t, a) && bit(t, b),
                Core::U(a, b) => {
                    let u = bit(t, i);
                    if bit(t, b) && !u || u && !bit(t, b) && !bit(t, a) {
                        continue 'assign;
                    }
                    u
                }
                Core::Atom(_) | Core::X(_) => bit(t, i),
            };
            if v {
                t |= 1 << i;
            }
        }
        truths.push(t);
    }

    let letter = |t: u128| -> u64 {
        let mut l = 0;
        for (i, node) in cl.nodes.iter().enumerate() {
            if let Core::Atom(a) = node {
                if bit(t, i) {
                    l |= 1 << a;
                }
            }
        }
        l
    };
    // Requirement on the next state's truth vector: (next & mask) == value.
    // `None` when two obligations on the same subformula conflict.
    let requirement = |t: u128| -> Option<(u128, u128)> {
        let (mut mask, mut value) = (0u128, 0u128);
        let mut need = |j: usize, v: bool| {
            if mask >> j & 1 == 1 && (value >> j & 1 == 1) != v {
                return false;
            }
            mask |= 1 << j;
            value |= u128::from(v) << j;
            true
        };
        for (i, node) in cl.nodes.iter().enumerate() {
            let ok = match *node {
                Core::X(a) => need(a, bit(t, i)),
                Core::U(a, b) if !bit(t, b) && bit(t, a) => need(i, bit(t, i)),
                _ => true,
            };
            if !ok {
                return None;
            }
        }
        Some((mask, value))
    };

    let m = truths.len();
    let mut succ = vec![Vec::new(); m];
    for (s, &t) in truths.iter().enumerate() {
        let Some((mask, value)) = requirement(t) else { continue };
        for (d, &t2) in truths.iter().enumerate() {
            if t2 & mask == value {
                succ[s].push(d as u32);
            }
        }
    }
    let acc: Vec<Vec<bool>> = cl
        .nodes
        .iter()
        .enumerate()
        .filter_map(|(i, node)| match *node {
            Core::U(_, b) => Some(truths.iter().map(|&t| !bit(t, i) || bit(t, b)).collect()),
            _ => None,
        })
        .collect();
    let initial: Vec<u32> =
        (0..m).filter(|&s| bit(truths[s], root)).map(|s| s as u32).collect();
    let g = Generalized { atoms, letters: truths.iter().map(|&t| letter(t)).collect(), initial, succ, acc };
    g.prune()
}

impl Generalized {
    /// Keeps only states from which a run visiting every acceptance set infinitely often exists.
    fn prune(self) -> Generalized {
        let m = self.letters.len();
        let comp = tarjan(&self.succ);
        let ncomp = comp.iter().copied().max().map_or(0, |c| c + 1);
        let mut nontrivial = vec![false; ncomp];
        let mut covers = vec![vec![false; self.acc.len()]; ncomp];
        for s in 0..m {
            for &d in &self.succ[s] {
                if comp[d as usize] == comp[s] {
                    nontrivial[comp[s]] = true;
                }
            }
            for (k, set) in self.acc.iter().enumerate() {
                if set[s] {
                    covers[comp[s]][k] = true;
                }
            }
        }
        let fair: Vec<bool> =
            (0..ncomp).map(|c| nontrivial[c] && covers[c].iter().all(|&x| x)).collect();
        // Backward reachability from fair components.
        let mut pred = vec![Vec::new(); m];
        for s in 0..m {
            for &d in &self.succ[s] {
                pred[d as usize].push(s);
            }
        }
        let mut alive = vec![false; m];
        let mut stack: Vec<usize> = (0..m).filter(|&s| fair[comp[s]]).collect();
        for &s in &stack {
            alive[s] = true;
        }
        while let Some(s) = stack.pop() {
            for &p in &pred[s] {
                if !alive[p] {
                    alive[p] = true;
                    stack.push(p);
                }
            }
        }
        let mut renum = vec![u32::MAX; m];
        let mut k = 0;
        for s in 0..m {
            if alive[s] {
                renum[s] = k;
                k += 1;
            }
        }
        let keep = |s: usize| alive[s];
        Generalized {
            atoms: self.atoms,
            letters: (0..m).filter(|&s| keep(s)).map(|s| self.letters[s]).collect(),
            initial: self.initial.iter().filter(|&&s| keep(s as usize)).map(|&s| renum[s as usize]).collect(),
            succ: (0..m)
                .filter(|&s| keep(s))
                .map(|s| {
                    self.succ[s].iter().filter(|&&d| keep(d as usize)).map(|&d| renum[d as usize]).collect()
                })
                .collect(),
            acc: self
                .acc
                .iter()
                .map(|set| (0..m).filter(|&s| keep(s)).map(|s| set[s]).collect())
                .collect(),
        }
    }

    /// Counter-based degeneralization.
    pub fn degeneralize(&self) -> Buchi {
        let m = self.letters.len();
        let k = self.acc.len().max(1);
        let in_set = |c: usize, s: usize| self.acc.get(c).is_none_or(|set| set[s]);
        let id = |s: usize, c: usize| (s * k + c) as u32;
        let mut succ = vec![Vec::new(); m * k];
        let mut letters = vec![0; m * k];
        let mut accepting = vec![false; m * k];
        for s in 0..m {
            for c in 0..k {
                let next_c = if in_set(c, s) { (c + 1) % k } else { c };
                succ[id(s, c) as usize] =
                    self.succ[s].iter().map(|&d| id(d as usize, next_c)).collect();
                letters[id(s, c) as usize] = self.letters[s];
                accepting[id(s, c) as usize] = c == 0 && in_set(0, s);
            }
        }
        Buchi {
            atoms: self.atoms.clone(),
            letters,
            initial: self.initial.iter().map(|&s| id(s as usize, 0)).collect(),
            succ,
            accepting,
        }
    }
}

/// Strongly connected components; returns a component index per node.
fn tarjan(succ: &[Vec<u32>]) -> Vec<usize> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = work.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i] as usize;
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(p, _)) = work.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

/// Büchi automaton accepting exactly the words satisfying `f`.
pub fn to_buchi(f: &Ltl) -> Buchi {
    generalized(f).degeneralize()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn always_true_is_one_accepting_loop() {
        let b = to_buchi(&Ltl::g(Ltl::True));
        assert_eq!(b.state_count(), 1);
        assert_eq!(b.initial, vec![0]);
        assert_eq!(b.succ[0], vec![0]);
        assert!(b.accepting[0]);
        assert_eq!(b.guard(0), "true");
    }

    #[test]
    fn false_has_empty_language() {
        assert!(to_buchi(&Ltl::False).is_empty());
        assert!(to_buchi(&Ltl::and(Ltl::state("p"), Ltl::not(Ltl::state("p")))).is_empty());
    }

    #[test]
    fn next_and_until_obligations_on_one_subformula() {
        // On `X F p` with p never true, X forces `F p` false next while the
        // pending until forces it true; no such state may continue.
        let g = generalized(&Ltl::not(Ltl::x(Ltl::f(Ltl::state("p")))));
        for (s, succ) in g.succ.iter().enumerate() {
            assert!(!succ.is_empty(), "state {s} has no successor after pruning");
        }
        assert_eq!(g.initial.len(), 2);
    }

    #[test]
    fn eventually_needs_acceptance() {
        let b = to_buchi(&Ltl::f(Ltl::state("p")));
        assert!(!b.is_empty());
        assert!(b.accepting.iter().any(|&a| a));
        assert!(b.accepting.iter().any(|&a| !a));
    }
}
