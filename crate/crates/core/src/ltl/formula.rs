use std::fmt;

use crate::kernel::EventLabel;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    /// A state macro, true when its bit is set on the position's state.
    State(String),
    /// True when the position was entered by exactly this event.
    Event(EventLabel),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::State(n) => f.write_str(n),
            Atom::Event(e) => write!(f, "@{e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ltl {
    True,
    False,
    Atom(Atom),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Implies(Box<Ltl>, Box<Ltl>),
    X(Box<Ltl>),
    G(Box<Ltl>),
    F(Box<Ltl>),
    U(Box<Ltl>, Box<Ltl>),
}

impl Ltl {
    pub fn state(name: &str) -> Ltl {
        Ltl::Atom(Atom::State(name.to_string()))
    }

    pub fn event(e: EventLabel) -> Ltl {
        Ltl::Atom(Atom::Event(e))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Ltl) -> Ltl {
        Ltl::Not(Box::new(a))
    }

    pub fn and(a: Ltl, b: Ltl) -> Ltl {
        Ltl::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Implies(Box::new(a), Box::new(b))
    }

    pub fn x(a: Ltl) -> Ltl {
        Ltl::X(Box::new(a))
    }

    pub fn g(a: Ltl) -> Ltl {
        Ltl::G(Box::new(a))
    }

    pub fn f(a: Ltl) -> Ltl {
        Ltl::F(Box::new(a))
    }

    pub fn u(a: Ltl, b: Ltl) -> Ltl {
        Ltl::U(Box::new(a), Box::new(b))
    }

    /// Conjunction of all items; `True` when empty.
    pub fn all<I: IntoIterator<Item = Ltl>>(items: I) -> Ltl {
        items.into_iter().reduce(Ltl::and).unwrap_or(Ltl::True)
    }

    /// Distinct atoms in first-occurrence order.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<Atom>) {
        match self {
            Ltl::True | Ltl::False => {}
            Ltl::Atom(a) => {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
            Ltl::Not(a) | Ltl::X(a) | Ltl::G(a) | Ltl::F(a) => a.collect_atoms(out),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) | Ltl::U(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) => 0,
            Ltl::Not(a) | Ltl::X(a) | Ltl::G(a) | Ltl::F(a) => 1 + a.depth(),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) | Ltl::U(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    pub fn has_next(&self) -> bool {
        match self {
            Ltl::X(_) => true,
            Ltl::True | Ltl::False | Ltl::Atom(_) => false,
            Ltl::Not(a) | Ltl::G(a) | Ltl::F(a) => a.has_next(),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) | Ltl::U(a, b) => {
                a.has_next() || b.has_next()
            }
        }
    }

    /// Replaces state atom `from` by `to` everywhere.
    pub fn rename_state(&self, from: &str, to: &str) -> Ltl {
        let r = |a: &Ltl| Box::new(a.rename_state(from, to));
        match self {
            Ltl::Atom(Atom::State(n)) if n == from => Ltl::state(to),
            Ltl::True | Ltl::False | Ltl::Atom(_) => self.clone(),
            Ltl::Not(a) => Ltl::Not(r(a)),
            Ltl::X(a) => Ltl::X(r(a)),
            Ltl::G(a) => Ltl::G(r(a)),
            Ltl::F(a) => Ltl::F(r(a)),
            Ltl::And(a, b) => Ltl::And(r(a), r(b)),
            Ltl::Or(a, b) => Ltl::Or(r(a), r(b)),
            Ltl::Implies(a, b) => Ltl::Implies(r(a), r(b)),
            Ltl::U(a, b) => Ltl::U(r(a), r(b)),
        }
    }

    /// True when the negation normal form contains no `U` or `F`: such
    /// formulas are violated exactly by paths with a finite bad prefix.
    pub fn is_syntactic_safety(&self) -> bool {
        self.safe(true)
    }

    fn safe(&self, positive: bool) -> bool {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) => true,
            Ltl::Not(a) => a.safe(!positive),
            Ltl::And(a, b) | Ltl::Or(a, b) => a.safe(positive) && b.safe(positive),
            Ltl::Implies(a, b) => a.safe(!positive) && b.safe(positive),
            Ltl::X(a) => a.safe(positive),
            Ltl::G(a) => positive && a.safe(positive),
            Ltl::F(a) => !positive && a.safe(positive),
            Ltl::U(..) => false,
        }
    }
}

impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ltl::True => f.write_str("true"),
            Ltl::False => f.write_str("false"),
            Ltl::Atom(a) => write!(f, "{a}"),
            Ltl::Not(a) => write!(f, "!{a}"),
            Ltl::And(a, b) => write!(f, "({a} && {b})"),
            Ltl::Or(a, b) => write!(f, "({a} || {b})"),
            Ltl::Implies(a, b) => write!(f, "({a} -> {b})"),
            Ltl::X(a) => write!(f, "X {a}"),
            Ltl::G(a) => write!(f, "G {a}"),
            Ltl::F(a) => write!(f, "F {a}"),
            Ltl::U(a, b) => write!(f, "({a} U {b})"),
        }
    }
}
