//! One-step successor relation.
//!
//! A term yields either local moves (already complete transitions of the
//! subterm) or channel offers. Offers rise through the term until an
//! interleaving node pairs a sender in one child with a receiver in another.

use super::compile::{CPat, Model, Node, NodeId};
use super::error::ModelError;
use super::state::{Closure, Config, EventLabel, Frame, GlobalState, Term};
use super::value::{Scalar, Value};

const MAX_UNFOLD: usize = 64;

#[derive(Clone, Debug)]
enum Wrap {
    Seq(Closure),
    Par(Box<[Term]>, usize),
}

#[derive(Clone, Debug)]
enum Dir {
    Send(Vec<Value>),
    Recv,
}

#[derive(Clone, Debug)]
struct Offer {
    chan: u16,
    dir: Dir,
    /// The `Output` or `Input` node making the offer.
    node: NodeId,
    frame: Frame,
    /// Innermost first.
    wraps: Vec<Wrap>,
}

enum Move {
    Local(EventLabel, GlobalState, Term),
    Offer(Offer),
}

fn wrap_term(mut t: Term, wraps: &[Wrap]) -> Term {
    for w in wraps {
        t = match w {
            Wrap::Seq(k) => Term::Seq(Box::new(t), k.clone()),
            Wrap::Par(sibs, i) => {
                let mut v = sibs.clone();
                v[*i] = t;
                Term::Par(v)
            }
        };
    }
    t
}

impl Model {
    pub(crate) fn close(&self, node: NodeId, frame: &Frame) -> Closure {
        let env = self
            .info(node)
            .free
            .iter()
            .map(|l| frame.get(*l).expect("free binder has a value"))
            .collect();
        self.canonical(Closure { node, env })
    }

    /// Distinct positions that close to the same process text are one state.
    fn canonical(&self, c: Closure) -> Closure {
        if let Some(r) = self.canon.read().unwrap().by_closure.get(&c) {
            return r.clone();
        }
        let source = self.render_closure(&c);
        let mut canon = self.canon.write().unwrap();
        let r = canon.by_source.entry(source).or_insert_with(|| c.clone()).clone();
        canon.by_closure.insert(c, r.clone());
        r
    }

    /// A resting term for `c`: sequential and interleaved nodes are opened
    /// into their running shape so both forms compare equal.
    pub(crate) fn settle(&self, c: Closure) -> Term {
        match self.node(c.node) {
            Node::Seq(a, b) => {
                let f = self.open(&c);
                Term::Seq(Box::new(self.settle(self.close(*a, &f))), self.close(*b, &f))
            }
            Node::Interleave(ps) => {
                let f = self.open(&c);
                Term::Par(ps.iter().map(|p| self.settle(self.close(*p, &f))).collect())
            }
            _ => Term::At(c),
        }
    }

    pub(crate) fn open(&self, c: &Closure) -> Frame {
        let mut f = Frame::empty();
        for (l, v) in self.info(c.node).free.iter().zip(c.env.iter()) {
            f.set(*l, *v);
        }
        f
    }

    /// All transitions enabled in `config`, in a fixed order, without duplicates.
    pub fn successors(&self, config: &Config) -> Result<Vec<(EventLabel, Config)>, ModelError> {
        let mut moves = Vec::new();
        self.term_moves(&config.term, &config.globals, false, 0, &mut moves)?;
        let mut out: Vec<(EventLabel, Config)> = Vec::with_capacity(moves.len());
        for m in moves {
            if let Move::Local(label, globals, term) = m {
                let next = (label, Config { globals, term });
                if !out.contains(&next) {
                    out.push(next);
                }
            }
        }
        Ok(out)
    }

    fn term_moves(
        &self,
        t: &Term,
        g: &GlobalState,
        offers: bool,
        depth: usize,
        out: &mut Vec<Move>,
    ) -> Result<(), ModelError> {
        match t {
            Term::At(c) => self.node_moves(c.node, &self.open(c), g, offers, depth, out),
            Term::Seq(first, k) => {
                if self.is_terminated(first) {
                    out.push(Move::Local(EventLabel::Tau, g.clone(), self.settle(k.clone())));
                    return Ok(());
                }
                let start = out.len();
                self.term_moves(first, g, offers, depth, out)?;
                for m in &mut out[start..] {
                    match m {
                        Move::Local(_, _, t) => {
                            let inner = std::mem::replace(t, Term::Par(Box::new([])));
                            *t = Term::Seq(Box::new(inner), k.clone());
                        }
                        Move::Offer(o) => o.wraps.push(Wrap::Seq(k.clone())),
                    }
                }
                Ok(())
            }
            Term::Par(ts) => self.par_moves(ts, g, offers, depth, out),
        }
    }

    fn par_moves(
        &self,
        ts: &[Term],
        g: &GlobalState,
        offers: bool,
        depth: usize,
        out: &mut Vec<Move>,
    ) -> Result<(), ModelError> {
        let mut child_offers: Vec<(usize, Offer)> = Vec::new();
        for (i, child) in ts.iter().enumerate() {
            let mut ms = Vec::new();
            self.term_moves(child, g, true, depth, &mut ms)?;
            for m in ms {
                match m {
                    Move::Local(l, g2, t) => {
                        let mut v: Box<[Term]> = ts.into();
                        v[i] = t;
                        out.push(Move::Local(l, g2, Term::Par(v)));
                    }
                    Move::Offer(o) => child_offers.push((i, o)),
                }
            }
        }
        for (i, s) in &child_offers {
            let Dir::Send(values) = &s.dir else { continue };
            for (j, r) in &child_offers {
                if i == j || r.chan != s.chan || !matches!(r.dir, Dir::Recv) {
                    continue;
                }
                if let Some((label, g2, ts_new, tr_new)) = self.rendezvous(s, values, r, g)? {
                    let mut v: Box<[Term]> = ts.into();
                    v[*i] = ts_new;
                    v[*j] = tr_new;
                    out.push(Move::Local(label, g2, Term::Par(v)));
                }
            }
        }
        if offers {
            let sibs: Box<[Term]> = ts.into();
            for (i, mut o) in child_offers {
                o.wraps.push(Wrap::Par(sibs.clone(), i));
                out.push(Move::Offer(o));
            }
        }
        Ok(())
    }

    /// Tries to match a send against a receive. Sender statements run first.
    fn rendezvous(
        &self,
        s: &Offer,
        values: &[Value],
        r: &Offer,
        g: &GlobalState,
    ) -> Result<Option<(EventLabel, GlobalState, Term, Term)>, ModelError> {
        let Node::Input { pattern, stmts: rstmts, next: rnext, .. } = self.node(r.node) else {
            unreachable!()
        };
        if pattern.len() != values.len() {
            return Ok(None);
        }
        let mut rframe = r.frame;
        for (p, v) in pattern.iter().zip(values) {
            match p {
                CPat::Bind(l) => match v.as_scalar() {
                    Some(x) => rframe.set(*l, x),
                    None => return Ok(None),
                },
                CPat::Match(e) => {
                    if self.eval(e, g, &r.frame, Some(r.node))? != *v {
                        return Ok(None);
                    }
                }
            }
        }
        let Node::Output { stmts: sstmts, next: snext, .. } = self.node(s.node) else {
            unreachable!()
        };
        let mut g2 = g.clone();
        self.exec(sstmts, &mut g2, &s.frame, Some(s.node))?;
        self.exec(rstmts, &mut g2, &rframe, Some(r.node))?;
        let st = wrap_term(self.settle(self.close(*snext, &s.frame)), &s.wraps);
        let rt = wrap_term(self.settle(self.close(*rnext, &rframe)), &r.wraps);
        let label = EventLabel::Comm {
            channel: self.channels[s.chan as usize].clone(),
            values: values.to_vec(),
        };
        Ok(Some((label, g2, st, rt)))
    }

    fn node_moves(
        &self,
        id: NodeId,
        frame: &Frame,
        g: &GlobalState,
        offers: bool,
        depth: usize,
        out: &mut Vec<Move>,
    ) -> Result<(), ModelError> {
        let at = |n: NodeId, f: &Frame| self.settle(self.close(n, f));
        match self.node(id) {
            Node::Stop | Node::Skip => {}
            Node::Event { label, stmts, next } => {
                let mut g2 = g.clone();
                self.exec(stmts, &mut g2, frame, Some(id))?;
                let l = match label {
                    Some(i) => EventLabel::Named(self.labels[*i as usize].clone()),
                    None => EventLabel::Tau,
                };
                out.push(Move::Local(l, g2, at(*next, frame)));
            }
            Node::Output { chan, values, .. } => {
                if offers {
                    let vs = values
                        .iter()
                        .map(|v| self.eval(v, g, frame, Some(id)))
                        .collect::<Result<Vec<_>, _>>()?;
                    out.push(Move::Offer(Offer {
                        chan: *chan,
                        dir: Dir::Send(vs),
                        node: id,
                        frame: *frame,
                        wraps: Vec::new(),
                    }));
                }
            }
            Node::Input { chan, .. } => {
                if offers {
                    out.push(Move::Offer(Offer {
                        chan: *chan,
                        dir: Dir::Recv,
                        node: id,
                        frame: *frame,
                        wraps: Vec::new(),
                    }));
                }
            }
            Node::Choice(a, b) => {
                self.node_moves(*a, frame, g, offers, depth, out)?;
                self.node_moves(*b, frame, g, offers, depth, out)?;
            }
            Node::IndexedChoice { level, domain, body } => {
                for v in domain {
                    let mut f = *frame;
                    f.set(*level, *v);
                    self.node_moves(*body, &f, g, offers, depth, out)?;
                }
            }
            Node::Cond { guard, then, otherwise } => {
                let branch = if self.eval_bool(guard, g, frame, Some(id))? { then } else { otherwise };
                out.push(Move::Local(EventLabel::Tau, g.clone(), at(*branch, frame)));
            }
            Node::Case { arms, default } => {
                let mut target = *default;
                for (c, body) in arms {
                    if self.eval_bool(c, g, frame, Some(id))? {
                        target = *body;
                        break;
                    }
                }
                out.push(Move::Local(EventLabel::Tau, g.clone(), at(target, frame)));
            }
            Node::Seq(a, b) => {
                let t = Term::Seq(Box::new(at(*a, frame)), self.close(*b, frame));
                self.term_moves(&t, g, offers, depth, out)?;
            }
            Node::Interleave(ps) => {
                let t = Term::Par(ps.iter().map(|p| at(*p, frame)).collect());
                self.term_moves(&t, g, offers, depth, out)?;
            }
            Node::Call { def, args } => {
                let d = &self.defs[*def as usize];
                if depth >= MAX_UNFOLD {
                    return Err(ModelError::UnguardedRecursion { context: d.name.clone() });
                }
                let mut f = Frame::empty();
                for (k, a) in args.iter().enumerate() {
                    let v = self.eval(a, g, frame, Some(id))?;
                    let s: Scalar = v.as_scalar().ok_or_else(|| ModelError::TypeMismatch {
                        context: d.name.clone(),
                        expr: format!("argument {k}"),
                        detail: "process arguments must be scalars".into(),
                    })?;
                    f.set(k as u8, s);
                }
                self.node_moves(d.body, &f, g, offers, depth + 1, out)?;
            }
        }
        Ok(())
    }
}
