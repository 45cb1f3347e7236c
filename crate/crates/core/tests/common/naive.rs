//! A deliberately simple enumerator over source process expressions.
//!
//! States are (globals, closed process expression). Binders are removed by
//! textual substitution before anything is evaluated, so nothing here shares
//! code with the compiled kernel beyond the AST and value types.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use ceremony_checker::kernel::{EventLabel, Expr, ModelDef, Pattern, ProcessExpr, Snapshot, Stmt, Target, Value};

pub type Globals = Snapshot;
pub type Key = (Globals, ProcessExpr);

pub struct NaiveGraph {
    pub states: Vec<Key>,
    pub index: HashMap<Key, usize>,
    pub transitions: Vec<(usize, EventLabel, usize)>,
}

#[derive(Clone)]
enum Wrap {
    Seq(ProcessExpr),
    Par(Vec<ProcessExpr>, usize),
}

#[derive(Clone)]
struct Offer {
    channel: String,
    send: Option<Vec<Value>>,
    /// The Output or Input expression itself.
    at: ProcessExpr,
    wraps: Vec<Wrap>,
}

enum Mv {
    Local(EventLabel, Globals, ProcessExpr),
    Offer(Offer),
}

fn rebuild(mut p: ProcessExpr, wraps: &[Wrap]) -> ProcessExpr {
    for w in wraps {
        p = match w {
            Wrap::Seq(k) => ProcessExpr::Seq(Box::new(p), Box::new(k.clone())),
            Wrap::Par(sibs, i) => {
                let mut v = sibs.clone();
                v[*i] = p;
                ProcessExpr::Interleave(v)
            }
        };
    }
    p
}

pub fn subst_expr(e: &Expr, x: &str, v: &Value) -> Expr {
    let s = |a: &Expr| Box::new(subst_expr(a, x, v));
    match e {
        Expr::Var(n) if n == x => Expr::Const(v.clone()),
        Expr::Const(_) | Expr::Var(_) | Expr::Index(..) | Expr::Macro(_) => e.clone(),
        Expr::Contains(set, a) => Expr::Contains(set.clone(), s(a)),
        Expr::Eq(a, b) => Expr::Eq(s(a), s(b)),
        Expr::Ne(a, b) => Expr::Ne(s(a), s(b)),
        Expr::And(a, b) => Expr::And(s(a), s(b)),
        Expr::Or(a, b) => Expr::Or(s(a), s(b)),
        Expr::Not(a) => Expr::Not(s(a)),
    }
}

fn subst_stmts(ss: &[Stmt], x: &str, v: &Value) -> Vec<Stmt> {
    ss.iter()
        .map(|st| match st {
            Stmt::Assign { target, value } => Stmt::Assign { target: target.clone(), value: subst_expr(value, x, v) },
            Stmt::Add { set, elem } => Stmt::Add { set: set.clone(), elem: subst_expr(elem, x, v) },
            Stmt::If { cond, then, otherwise } => Stmt::If {
                cond: subst_expr(cond, x, v),
                then: subst_stmts(then, x, v),
                otherwise: subst_stmts(otherwise, x, v),
            },
        })
        .collect()
}

pub fn subst(p: &ProcessExpr, x: &str, v: &Value) -> ProcessExpr {
    let s = |a: &ProcessExpr| Box::new(subst(a, x, v));
    match p {
        ProcessExpr::Stop | ProcessExpr::Skip => p.clone(),
        ProcessExpr::Event { label, stmts, next } => {
            ProcessExpr::Event { label: label.clone(), stmts: subst_stmts(stmts, x, v), next: s(next) }
        }
        ProcessExpr::Output { channel, values, stmts, next } => ProcessExpr::Output {
            channel: channel.clone(),
            values: values.iter().map(|e| subst_expr(e, x, v)).collect(),
            stmts: subst_stmts(stmts, x, v),
            next: s(next),
        },
        ProcessExpr::Input { channel, pattern, stmts, next } => {
            let shadowed = pattern.iter().any(|q| matches!(q, Pattern::Bind(b) if b == x));
            ProcessExpr::Input {
                channel: channel.clone(),
                pattern: pattern
                    .iter()
                    .map(|q| match q {
                        Pattern::Match(e) => Pattern::Match(subst_expr(e, x, v)),
                        b => b.clone(),
                    })
                    .collect(),
                stmts: if shadowed { stmts.clone() } else { subst_stmts(stmts, x, v) },
                next: if shadowed { next.clone() } else { s(next) },
            }
        }
        ProcessExpr::Choice(a, b) => ProcessExpr::Choice(s(a), s(b)),
        ProcessExpr::IndexedChoice { binder, domain, body } => ProcessExpr::IndexedChoice {
            binder: binder.clone(),
            domain: domain.clone(),
            body: if binder == x { body.clone() } else { s(body) },
        },
        ProcessExpr::Conditional { guard, then, otherwise, atomic } => ProcessExpr::Conditional {
            guard: subst_expr(guard, x, v),
            then: s(then),
            otherwise: otherwise.as_ref().map(|o| s(o)),
            atomic: *atomic,
        },
        ProcessExpr::Case { arms, default } => ProcessExpr::Case {
            arms: arms.iter().map(|(c, b)| (subst_expr(c, x, v), subst(b, x, v))).collect(),
            default: s(default),
        },
        ProcessExpr::Seq(a, b) => ProcessExpr::Seq(s(a), s(b)),
        ProcessExpr::Interleave(ps) => ProcessExpr::Interleave(ps.iter().map(|q| subst(q, x, v)).collect()),
        ProcessExpr::Call(n, args) => ProcessExpr::Call(n.clone(), args.iter().map(|e| subst_expr(e, x, v)).collect()),
    }
}

pub struct Naive<'d> {
    def: &'d ModelDef,
}

impl<'d> Naive<'d> {
    pub fn new(def: &'d ModelDef) -> Self {
        Naive { def }
    }

    pub fn initial(&self) -> Key {
        let mut vars = BTreeMap::new();
        for v in &self.def.vars {
            vars.insert(v.name.clone(), Value::from(v.init));
        }
        for a in &self.def.arrays {
            vars.insert(a.name.clone(), Value::Tuple(vec![Value::from(a.init); a.len]));
        }
        let sets = self.def.sets.iter().map(|s| (s.name.clone(), BTreeSet::new())).collect();
        (Snapshot { vars, sets }, ProcessExpr::Call(self.def.entry.clone(), vec![]))
    }

    pub fn eval(&self, e: &Expr, g: &Globals) -> Value {
        let b = |a: &Expr| self.eval(a, g).as_bool().expect("boolean operand");
        match e {
            Expr::Const(v) => v.clone(),
            Expr::Var(n) => match g.vars.get(n) {
                Some(v) => v.clone(),
                None => self.eval(self.def.macro_body(n).unwrap_or_else(|| panic!("unbound {n}")), g),
            },
            Expr::Macro(n) => self.eval(self.def.macro_body(n).expect("macro"), g),
            Expr::Index(n, i) => match &g.vars[n] {
                Value::Tuple(items) => items[*i].clone(),
                other => panic!("{n} is {other}, not an array"),
            },
            Expr::Contains(set, a) => Value::Bool(g.sets[set].contains(&self.eval(a, g))),
            Expr::Eq(x, y) => Value::Bool(self.eval(x, g) == self.eval(y, g)),
            Expr::Ne(x, y) => Value::Bool(self.eval(x, g) != self.eval(y, g)),
            Expr::And(x, y) => Value::Bool(b(x) && b(y)),
            Expr::Or(x, y) => Value::Bool(b(x) || b(y)),
            Expr::Not(x) => Value::Bool(!b(x)),
        }
    }

    fn exec(&self, ss: &[Stmt], g: &mut Globals) {
        for st in ss {
            match st {
                Stmt::Assign { target: Target::Var(n), value } => {
                    let v = self.eval(value, g);
                    g.vars.insert(n.clone(), v);
                }
                Stmt::Assign { target: Target::Cell(n, i), value } => {
                    let v = self.eval(value, g);
                    match g.vars.get_mut(n) {
                        Some(Value::Tuple(items)) => items[*i] = v,
                        _ => panic!("{n} is not an array"),
                    }
                }
                Stmt::Add { set, elem } => {
                    let v = self.eval(elem, g);
                    g.sets.get_mut(set).expect("set").insert(v);
                }
                Stmt::If { cond, then, otherwise } => {
                    if self.eval(cond, g).as_bool().expect("boolean") {
                        self.exec(then, g);
                    } else {
                        self.exec(otherwise, g);
                    }
                }
            }
        }
    }

    fn terminated(p: &ProcessExpr) -> bool {
        match p {
            ProcessExpr::Skip => true,
            ProcessExpr::Interleave(ps) => ps.iter().all(Self::terminated),
            _ => false,
        }
    }

    fn moves(&self, p: &ProcessExpr, g: &Globals, offers: bool, depth: usize, out: &mut Vec<Mv>) {
        assert!(depth < 64, "unguarded recursion");
        match p {
            ProcessExpr::Stop | ProcessExpr::Skip => {}
            ProcessExpr::Event { label, stmts, next } => {
                let mut g2 = g.clone();
                self.exec(stmts, &mut g2);
                let l = label.as_deref().map_or(EventLabel::Tau, EventLabel::named);
                out.push(Mv::Local(l, g2, (**next).clone()));
            }
            ProcessExpr::Output { channel, values, .. } if offers => out.push(Mv::Offer(Offer {
                channel: channel.clone(),
                send: Some(values.iter().map(|e| self.eval(e, g)).collect()),
                at: p.clone(),
                wraps: vec![],
            })),
            ProcessExpr::Input { channel, .. } if offers => {
                out.push(Mv::Offer(Offer { channel: channel.clone(), send: None, at: p.clone(), wraps: vec![] }))
            }
            ProcessExpr::Output { .. } | ProcessExpr::Input { .. } => {}
            ProcessExpr::Choice(a, b) => {
                self.moves(a, g, offers, depth, out);
                self.moves(b, g, offers, depth, out);
            }
            ProcessExpr::IndexedChoice { binder, domain, body } => {
                for v in domain {
                    self.moves(&subst(body, binder, &Value::from(*v)), g, offers, depth, out);
                }
            }
            ProcessExpr::Conditional { guard, then, otherwise, .. } => {
                let next = if self.eval(guard, g).as_bool().expect("guard") {
                    (**then).clone()
                } else {
                    otherwise.as_deref().cloned().unwrap_or(ProcessExpr::Skip)
                };
                out.push(Mv::Local(EventLabel::Tau, g.clone(), next));
            }
            ProcessExpr::Case { arms, default } => {
                let next = arms
                    .iter()
                    .find(|(c, _)| self.eval(c, g).as_bool().expect("arm"))
                    .map_or((**default).clone(), |(_, b)| b.clone());
                out.push(Mv::Local(EventLabel::Tau, g.clone(), next));
            }
            ProcessExpr::Seq(a, b) => {
                if Self::terminated(a) {
                    out.push(Mv::Local(EventLabel::Tau, g.clone(), (**b).clone()));
                    return;
                }
                let mut inner = Vec::new();
                self.moves(a, g, offers, depth, &mut inner);
                for m in inner {
                    out.push(match m {
                        Mv::Local(l, g2, a2) => Mv::Local(l, g2, ProcessExpr::Seq(Box::new(a2), b.clone())),
                        Mv::Offer(mut o) => {
                            o.wraps.push(Wrap::Seq((**b).clone()));
                            Mv::Offer(o)
                        }
                    });
                }
            }
            ProcessExpr::Interleave(ps) => self.par(ps, g, offers, depth, out),
            ProcessExpr::Call(name, args) => {
                let d = self.def.process(name).unwrap_or_else(|| panic!("no process {name}"));
                let mut body = d.body.clone();
                for (x, a) in d.params.iter().zip(args) {
                    body = subst(&body, x, &self.eval(a, g));
                }
                self.moves(&body, g, offers, depth + 1, out);
            }
        }
    }

    fn par(&self, ps: &[ProcessExpr], g: &Globals, offers: bool, depth: usize, out: &mut Vec<Mv>) {
        let mut pending: Vec<(usize, Offer)> = Vec::new();
        for (i, child) in ps.iter().enumerate() {
            let mut ms = Vec::new();
            self.moves(child, g, true, depth, &mut ms);
            for m in ms {
                match m {
                    Mv::Local(l, g2, c) => {
                        let mut v = ps.to_vec();
                        v[i] = c;
                        out.push(Mv::Local(l, g2, ProcessExpr::Interleave(v)));
                    }
                    Mv::Offer(o) => pending.push((i, o)),
                }
            }
        }
        for (i, s) in &pending {
            let Some(values) = &s.send else { continue };
            for (j, r) in &pending {
                if i == j || r.send.is_some() || r.channel != s.channel {
                    continue;
                }
                if let Some((l, g2, sp, rp)) = self.sync(s, values, r, g) {
                    let mut v = ps.to_vec();
                    v[*i] = sp;
                    v[*j] = rp;
                    out.push(Mv::Local(l, g2, ProcessExpr::Interleave(v)));
                }
            }
        }
        if offers {
            for (i, mut o) in pending {
                o.wraps.push(Wrap::Par(ps.to_vec(), i));
                out.push(Mv::Offer(o));
            }
        }
    }

    fn sync(&self, s: &Offer, values: &[Value], r: &Offer, g: &Globals) -> Option<(EventLabel, Globals, ProcessExpr, ProcessExpr)> {
        let ProcessExpr::Input { pattern, stmts: rstmts, next: rnext, .. } = &r.at else { unreachable!() };
        let ProcessExpr::Output { stmts: sstmts, next: snext, .. } = &s.at else { unreachable!() };
        if pattern.len() != values.len() {
            return None;
        }
        let mut rstmts = rstmts.clone();
        let mut rnext = (**rnext).clone();
        for (q, v) in pattern.iter().zip(values) {
            match q {
                Pattern::Bind(x) => {
                    if matches!(v, Value::Tuple(_)) {
                        return None;
                    }
                    rstmts = subst_stmts(&rstmts, x, v);
                    rnext = subst(&rnext, x, v);
                }
                Pattern::Match(e) => {
                    if self.eval(e, g) != *v {
                        return None;
                    }
                }
            }
        }
        let mut g2 = g.clone();
        self.exec(sstmts, &mut g2);
        self.exec(&rstmts, &mut g2);
        let label = EventLabel::comm(&s.channel, values.iter().cloned());
        Some((label, g2, rebuild((**snext).clone(), &s.wraps), rebuild(rnext, &r.wraps)))
    }

    pub fn successors(&self, k: &Key) -> Vec<(EventLabel, Key)> {
        let mut ms = Vec::new();
        self.moves(&k.1, &k.0, false, 0, &mut ms);
        let mut out: Vec<(EventLabel, Key)> = Vec::new();
        for m in ms {
            if let Mv::Local(l, g, p) = m {
                let t = (l, (g, p));
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        out
    }

    /// Breadth-first enumeration of everything reachable from the initial state.
    pub fn enumerate(&self, limit: usize) -> NaiveGraph {
        let init = self.initial();
        let mut index = HashMap::new();
        let mut states = vec![init.clone()];
        index.insert(init, 0);
        let mut queue = VecDeque::from([0usize]);
        let mut transitions = Vec::new();
        while let Some(s) = queue.pop_front() {
            for (l, k) in self.successors(&states[s].clone()) {
                let t = match index.get(&k) {
                    Some(&t) => t,
                    None => {
                        assert!(states.len() < limit, "naive enumerator passed {limit} states");
                        states.push(k.clone());
                        index.insert(k, states.len() - 1);
                        queue.push_back(states.len() - 1);
                        states.len() - 1
                    }
                };
                transitions.push((s, l, t));
            }
        }
        NaiveGraph { states, index, transitions }
    }
}
