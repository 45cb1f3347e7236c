//! Shortest bad prefixes of invariant-shaped formulas by plain BFS.
//!
//! Handles `G B` and `G (A -> X G B)` with propositional `A` and `B`, which
//! covers every ceremony property.

use std::collections::{HashSet, VecDeque};

use ceremony_checker::ltl::{Atom, Ltl};
use ceremony_checker::statespace::{StateGraph, StateId};

/// (trigger, invariant) of a supported formula.
pub fn split(f: &Ltl) -> Option<(Option<Ltl>, Ltl)> {
    let Ltl::G(body) = f else { return None };
    if let Ltl::Implies(a, rest) = &**body {
        if let Ltl::X(inner) = &**rest {
            if let Ltl::G(b) = &**inner {
                if propositional(a) && propositional(b) {
                    return Some((Some((**a).clone()), (**b).clone()));
                }
            }
        }
    }
    propositional(body).then(|| (None, (**body).clone()))
}

fn propositional(f: &Ltl) -> bool {
    match f {
        Ltl::True | Ltl::False | Ltl::Atom(_) => true,
        Ltl::Not(a) => propositional(a),
        Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) => propositional(a) && propositional(b),
        _ => false,
    }
}

pub fn holds_at<G: StateGraph>(g: &G, f: &Ltl, label: Option<u32>, s: StateId) -> bool {
    match f {
        Ltl::True => true,
        Ltl::False => false,
        Ltl::Atom(Atom::State(n)) => g.macro_bits(s) >> g.macro_index(n).expect("macro") & 1 == 1,
        Ltl::Atom(Atom::Event(e)) => label.is_some_and(|l| g.label(l) == e),
        Ltl::Not(a) => !holds_at(g, a, label, s),
        Ltl::And(a, b) => holds_at(g, a, label, s) && holds_at(g, b, label, s),
        Ltl::Or(a, b) => holds_at(g, a, label, s) || holds_at(g, b, label, s),
        Ltl::Implies(a, b) => !holds_at(g, a, label, s) || holds_at(g, b, label, s),
        _ => unreachable!("temporal operator in a propositional position"),
    }
}

/// Number of positions in a shortest bad prefix, or `None` if no position
/// can violate the formula.
pub fn shortest_bad_prefix<G: StateGraph>(g: &mut G, f: &Ltl) -> Option<usize> {
    let (trigger, inv) = split(f).expect("supported shape");
    let fires = |g: &G, l: Option<u32>, s: StateId| trigger.as_ref().is_some_and(|a| holds_at(g, a, l, s));
    let s0 = g.initial();
    if trigger.is_none() && !holds_at(g, &inv, None, s0) {
        return Some(1);
    }
    // `armed`: the trigger held at some position so far.
    let start = (s0, fires(g, None, s0));
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([(start, 1usize)]);
    while let Some(((s, armed), len)) = queue.pop_front() {
        let moves: Vec<(Option<u32>, StateId)> = {
            let es = g.successors(s).expect("explore");
            if es.is_empty() {
                vec![(None, s)]
            } else {
                es.iter().map(|&(l, t)| (Some(l), t)).collect()
            }
        };
        for (l, t) in moves {
            let checked = trigger.is_none() || armed;
            if checked && !holds_at(g, &inv, l, t) {
                return Some(len + 1);
            }
            let next = (t, armed || fires(g, l, t));
            if seen.insert(next) {
                queue.push_back((next, len + 1));
            }
        }
    }
    None
}
