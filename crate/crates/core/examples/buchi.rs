//! Translates formulas to generalized Büchi automata and reports their size.

use ceremony_checker::ltl::{parse_formula, property, to_buchi, Ltl};
use ceremony_checker::models::PropertyId;

fn main() {
    let mut formulas: Vec<(String, Ltl)> =
        PropertyId::ALL.iter().map(|&p| (format!("P{} {p}", p.number()), property(p))).collect();
    for src in ["G F p", "F G p", "p U (q U r)", "G (p -> X (q U r))"] {
        formulas.push((src.to_string(), parse_formula(src).unwrap()));
    }
    for (name, f) in formulas {
        let b = to_buchi(&Ltl::not(f.clone()));
        println!("{name:<28} {f}\n{:<28} negation: {} states", "", b.state_count());
    }
}
