//! Runtime data: shared globals, process terms, configurations and event labels.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::ast::{Expr, ProcessExpr, Stmt};
use super::compile::{CExpr, CStmt, GlobalSlot, Model, Node, NodeId, MAX_LOCALS};
use super::error::ModelError;
use super::value::{Scalar, Value};

/// Valuation of every global: scalar/array cells plus set contents as bitsets
/// over each set's declared universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlobalState {
    pub(crate) cells: Box<[Scalar]>,
    pub(crate) sets: Box<[u64]>,
}

/// A readable, model-independent view of a [`GlobalState`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Snapshot {
    pub vars: BTreeMap<String, Value>,
    pub sets: BTreeMap<String, BTreeSet<Value>>,
}

/// An observable (or internal) step.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventLabel {
    Tau,
    Named(Arc<str>),
    /// A rendezvous on a channel, observed as `channel.v1.v2...`.
    Comm { channel: Arc<str>, values: Vec<Value> },
}

impl EventLabel {
    pub fn named(name: &str) -> EventLabel {
        EventLabel::Named(Arc::from(name))
    }

    pub fn comm<I: IntoIterator<Item = V>, V: Into<Value>>(channel: &str, values: I) -> EventLabel {
        EventLabel::Comm {
            channel: Arc::from(channel),
            values: values.into_iter().map(Into::into).collect(),
        }
    }

    /// Parses `tau`, `Name`, or `chan.v1.v2`; `channels` decides which.
    pub fn parse(text: &str, channels: &[&str]) -> Option<EventLabel> {
        let text = text.trim();
        if text == "tau" {
            return Some(EventLabel::Tau);
        }
        let mut parts = text.split('.');
        let head = parts.next()?;
        if channels.contains(&head) {
            let mut values = Vec::new();
            for p in parts {
                values.push(match p {
                    "true" => Value::Bool(true),
                    "false" => Value::Bool(false),
                    _ => Value::Sym(super::value::Sym::from_name(p)?),
                });
            }
            Some(EventLabel::Comm { channel: Arc::from(head), values })
        } else if parts.next().is_none() && !head.is_empty() {
            Some(EventLabel::named(head))
        } else {
            None
        }
    }
}

impl fmt::Display for EventLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventLabel::Tau => f.write_str("tau"),
            EventLabel::Named(n) => f.write_str(n),
            EventLabel::Comm { channel, values } => {
                f.write_str(channel)?;
                for v in values {
                    write!(f, ".{v}")?;
                }
                Ok(())
            }
        }
    }
}

/// A static process position together with the values of its free binders.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Closure {
    pub(crate) node: NodeId,
    pub(crate) env: Box<[Scalar]>,
}

impl Closure {
    pub fn node(&self) -> NodeId {
        self.node
    }
}

/// A running process.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    At(Closure),
    /// `first ; rest` where `first` has started.
    Seq(Box<Term>, Closure),
    /// Interleaved components in declaration order.
    Par(Box<[Term]>),
}

/// Globals plus the running process: one state of the transition system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    pub globals: GlobalState,
    pub term: Term,
}

impl Config {
    /// Top-level interleaved components, or the whole term when it is not (yet) a `Par`.
    pub fn components(&self) -> &[Term] {
        match &self.term {
            Term::Par(ts) => ts,
            t => std::slice::from_ref(t),
        }
    }
}

/// Binder values visible while stepping one closure.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Frame([Option<Scalar>; MAX_LOCALS]);

impl Frame {
    pub(crate) fn empty() -> Frame {
        Frame([None; MAX_LOCALS])
    }

    pub(crate) fn get(&self, level: u8) -> Option<Scalar> {
        self.0[level as usize]
    }

    pub(crate) fn set(&mut self, level: u8, v: Scalar) {
        self.0[level as usize] = Some(v);
    }
}

fn mismatch(model: &Model, ctx_node: Option<NodeId>, e: &CExpr, detail: String) -> ModelError {
    let context = match ctx_node {
        Some(n) => model.node_owners(n).next().unwrap_or("?").to_string(),
        None => "expression".to_string(),
    };
    ModelError::TypeMismatch { context, expr: format!("{e:?}"), detail }
}

impl Model {
    pub fn initial_globals(&self) -> GlobalState {
        GlobalState {
            cells: self.initial_cells.clone().into_boxed_slice(),
            sets: vec![0u64; self.set_words].into_boxed_slice(),
        }
    }

    pub fn initial_config(&self) -> Config {
        Config {
            globals: self.initial_globals(),
            term: Term::At(Closure { node: self.entry, env: Box::new([]) }),
        }
    }

    pub(crate) fn set_contains(&self, g: &GlobalState, set: u16, idx: usize) -> bool {
        let info = &self.sets[set as usize];
        g.sets[info.word_offset + idx / 64] >> (idx % 64) & 1 == 1
    }

    pub(crate) fn eval(
        &self,
        e: &CExpr,
        g: &GlobalState,
        frame: &Frame,
        ctx: Option<NodeId>,
    ) -> Result<Value, ModelError> {
        Ok(match e {
            CExpr::Const(v) => v.clone(),
            CExpr::Cell(c) => g.cells[*c as usize].into(),
            CExpr::Array { start, len } => Value::Tuple(
                g.cells[*start as usize..(*start + *len) as usize]
                    .iter()
                    .map(|s| Value::from(*s))
                    .collect(),
            ),
            CExpr::Local(l) => match frame.get(*l) {
                Some(v) => v.into(),
                None => {
                    return Err(ModelError::Invalid {
                        context: "binder".into(),
                        detail: format!("unbound local at level {l}"),
                    })
                }
            },
            CExpr::Contains { set, elem } => {
                let v = self.eval(elem, g, frame, ctx)?;
                match self.sets[*set as usize].index.get(&v) {
                    Some(&i) => Value::Bool(self.set_contains(g, *set, i)),
                    None => Value::Bool(false),
                }
            }
            CExpr::Eq(a, b) => Value::Bool(self.eval(a, g, frame, ctx)? == self.eval(b, g, frame, ctx)?),
            CExpr::Ne(a, b) => Value::Bool(self.eval(a, g, frame, ctx)? != self.eval(b, g, frame, ctx)?),
            CExpr::And(a, b) => {
                let x = self.eval_bool(a, g, frame, ctx)?;
                Value::Bool(x && self.eval_bool(b, g, frame, ctx)?)
            }
            CExpr::Or(a, b) => {
                let x = self.eval_bool(a, g, frame, ctx)?;
                Value::Bool(x || self.eval_bool(b, g, frame, ctx)?)
            }
            CExpr::Not(a) => Value::Bool(!self.eval_bool(a, g, frame, ctx)?),
        })
    }

    pub(crate) fn eval_bool(
        &self,
        e: &CExpr,
        g: &GlobalState,
        frame: &Frame,
        ctx: Option<NodeId>,
    ) -> Result<bool, ModelError> {
        match self.eval(e, g, frame, ctx)? {
            Value::Bool(b) => Ok(b),
            other => Err(mismatch(self, ctx, e, format!("expected boolean, got {other}"))),
        }
    }

    pub(crate) fn exec(
        &self,
        stmts: &[CStmt],
        g: &mut GlobalState,
        frame: &Frame,
        ctx: Option<NodeId>,
    ) -> Result<(), ModelError> {
        for s in stmts {
            match s {
                CStmt::Assign { cell, value } => {
                    let v = self.eval(value, g, frame, ctx)?;
                    match v.as_scalar() {
                        Some(x) => g.cells[*cell as usize] = x,
                        None => {
                            return Err(mismatch(self, ctx, value, "cannot store a tuple in a cell".into()))
                        }
                    }
                }
                CStmt::Add { set, elem } => {
                    let v = self.eval(elem, g, frame, ctx)?;
                    let info = &self.sets[*set as usize];
                    let Some(&i) = info.index.get(&v) else {
                        return Err(ModelError::OutsideUniverse {
                            context: ctx
                                .and_then(|n| self.node_owners(n).next())
                                .unwrap_or("statement")
                                .to_string(),
                            set: info.name.clone(),
                            value: v.to_string(),
                        });
                    };
                    g.sets[info.word_offset + i / 64] |= 1 << (i % 64);
                }
                CStmt::If { cond, then, otherwise } => {
                    if self.eval_bool(cond, g, frame, ctx)? {
                        self.exec(then, g, frame, ctx)?;
                    } else {
                        self.exec(otherwise, g, frame, ctx)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Evaluates a closed source expression against `state`.
    pub fn eval_expr(&self, state: &GlobalState, e: &Expr) -> Result<Value, ModelError> {
        let ce = self.compile_closed_expr(e)?;
        self.eval(&ce, state, &Frame::empty(), None)
    }

    /// Executes a statement list, returning the new state. `state` is not modified.
    pub fn exec_stmts(&self, state: &GlobalState, stmts: &[Stmt]) -> Result<GlobalState, ModelError> {
        let cs = self.compile_closed_stmts(stmts)?;
        let mut g = state.clone();
        self.exec(&cs, &mut g, &Frame::empty(), None)?;
        Ok(g)
    }

    /// Evaluates the macro with index `i` (declaration order).
    pub fn eval_macro(&self, i: usize, g: &GlobalState) -> Result<bool, ModelError> {
        let (name, e) = &self.macros[i];
        match self.eval(e, g, &Frame::empty(), None)? {
            Value::Bool(b) => Ok(b),
            other => Err(ModelError::TypeMismatch {
                context: name.clone(),
                expr: name.clone(),
                detail: format!("macro evaluates to {other}, not a boolean"),
            }),
        }
    }

    /// One bit per declared macro (macro `i` is bit `i`). At most 64 macros.
    pub fn macro_bits(&self, g: &GlobalState) -> Result<u64, ModelError> {
        let mut bits = 0u64;
        for i in 0..self.macros.len().min(64) {
            if self.eval_macro(i, g)? {
                bits |= 1 << i;
            }
        }
        Ok(bits)
    }

    pub fn global(&self, g: &GlobalState, name: &str) -> Option<Value> {
        let slot = &self.globals.iter().find(|(n, _)| n == name)?.1;
        Some(match slot {
            GlobalSlot::Scalar(c) => g.cells[*c as usize].into(),
            GlobalSlot::Array { start, len } => Value::Tuple(
                g.cells[*start as usize..(*start + *len) as usize]
                    .iter()
                    .map(|s| Value::from(*s))
                    .collect(),
            ),
        })
    }

    pub fn set_contents(&self, g: &GlobalState, name: &str) -> Option<Vec<Value>> {
        let (si, info) = self.sets.iter().enumerate().find(|(_, s)| s.name == name)?;
        Some(
            (0..info.universe.len())
                .filter(|&i| self.set_contains(g, si as u16, i))
                .map(|i| info.universe[i].clone())
                .collect(),
        )
    }

    pub fn snapshot(&self, g: &GlobalState) -> Snapshot {
        let vars = self
            .globals
            .iter()
            .map(|(n, _)| (n.clone(), self.global(g, n).expect("declared")))
            .collect();
        let sets = self
            .sets
            .iter()
            .map(|s| {
                (s.name.clone(), self.set_contents(g, &s.name).expect("declared").into_iter().collect())
            })
            .collect();
        Snapshot { vars, sets }
    }

    /// Builds a state from a snapshot-like assignment on top of the initial state.
    pub fn globals_with(
        &self,
        vars: &[(&str, Value)],
        sets: &[(&str, Vec<Value>)],
    ) -> Result<GlobalState, ModelError> {
        let mut g = self.initial_globals();
        for (name, v) in vars {
            let slot = &self
                .globals
                .iter()
                .find(|(n, _)| n == name)
                .ok_or_else(|| ModelError::UndeclaredName {
                    context: "globals".into(),
                    name: name.to_string(),
                })?
                .1;
            match (slot, v) {
                (GlobalSlot::Scalar(c), v) => {
                    g.cells[*c as usize] = v.as_scalar().ok_or_else(|| ModelError::TypeMismatch {
                        context: "globals".into(),
                        expr: name.to_string(),
                        detail: "tuple for scalar".into(),
                    })?
                }
                (GlobalSlot::Array { start, len }, Value::Tuple(items)) if items.len() == *len as usize => {
                    for (k, it) in items.iter().enumerate() {
                        g.cells[*start as usize + k] =
                            it.as_scalar().ok_or_else(|| ModelError::TypeMismatch {
                                context: "globals".into(),
                                expr: name.to_string(),
                                detail: "nested tuple".into(),
                            })?;
                    }
                }
                _ => {
                    return Err(ModelError::TypeMismatch {
                        context: "globals".into(),
                        expr: name.to_string(),
                        detail: "array needs a tuple of matching length".into(),
                    })
                }
            }
        }
        for (name, items) in sets {
            let si = self.sets.iter().position(|s| s.name == *name).ok_or_else(|| {
                ModelError::UndeclaredName { context: "globals".into(), name: name.to_string() }
            })?;
            let info = &self.sets[si];
            for it in items {
                let i = *info.index.get(it).ok_or_else(|| ModelError::OutsideUniverse {
                    context: "globals".into(),
                    set: name.to_string(),
                    value: it.to_string(),
                })?;
                g.sets[info.word_offset + i / 64] |= 1 << (i % 64);
            }
        }
        Ok(g)
    }

    fn compile_closed_expr(&self, e: &Expr) -> Result<CExpr, ModelError> {
        self.lower_expr(e, "expression")
    }

    fn compile_closed_stmts(&self, stmts: &[Stmt]) -> Result<Vec<CStmt>, ModelError> {
        stmts.iter().map(|s| self.lower_stmt(s, "statement")).collect()
    }

    /// Renders a running term back into (substituted) source form.
    pub fn render_term(&self, t: &Term) -> ProcessExpr {
        match t {
            Term::At(c) => self.render_closure(c),
            Term::Seq(a, k) => {
                ProcessExpr::Seq(Box::new(self.render_term(a)), Box::new(self.render_closure(k)))
            }
            Term::Par(ts) => ProcessExpr::Interleave(ts.iter().map(|t| self.render_term(t)).collect()),
        }
    }

    pub fn render_closure(&self, c: &Closure) -> ProcessExpr {
        let info = self.info(c.node);
        let subst: Vec<(&str, Value)> = info
            .free_names
            .iter()
            .map(String::as_str)
            .zip(c.env.iter().map(|s| Value::from(*s)))
            .collect();
        super::subst::substitute(&info.source, &subst)
    }

    pub(crate) fn is_terminated(&self, t: &Term) -> bool {
        match t {
            Term::At(c) => matches!(self.node(c.node), Node::Skip),
            Term::Seq(..) => false,
            Term::Par(ts) => ts.iter().all(|t| self.is_terminated(t)),
        }
    }

    /// Names of the process definitions the term is currently executing.
    pub fn active_processes(&self, t: &Term) -> BTreeSet<&str> {
        match t {
            Term::At(c) => self.node_owners(c.node).collect(),
            Term::Seq(a, _) => self.active_processes(a),
            Term::Par(ts) => ts.iter().flat_map(|t| self.active_processes(t)).collect(),
        }
    }

    /// (first word, element count) of every set, in declaration order.
    pub(crate) fn set_layout(&self) -> Vec<(usize, usize)> {
        self.sets.iter().map(|s| (s.word_offset, s.universe.len())).collect()
    }

    pub(crate) fn set_word_range(&self, name: &str) -> Option<std::ops::Range<usize>> {
        let info = self.sets.iter().find(|s| s.name == name)?;
        Some(info.word_offset..info.word_offset + info.universe.len().div_ceil(64))
    }

    /// True when no component can move any further because all are finished.
    pub fn is_terminated_config(&self, c: &Config) -> bool {
        self.is_terminated(&c.term)
    }
}
