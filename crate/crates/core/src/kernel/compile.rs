//! Lowering of a [`ModelDef`] into a compact, hash-consed node graph.
//!
//! Structurally identical process fragments share one [`NodeId`], and local
//! binders are addressed by their binding depth. A running process position
//! is then just a node plus the values of that node's free binders, which
//! makes two positions equal exactly when their substituted source text is.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, RwLock};

use rustc_hash::FxHashMap;

use super::ast::*;
use super::error::ModelError;
use super::state::Closure;
use super::value::{Scalar, Value};

pub(crate) const MAX_LOCALS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum CExpr {
    Const(Value),
    Cell(u16),
    Array { start: u16, len: u16 },
    Local(u8),
    Contains { set: u16, elem: Box<CExpr> },
    Eq(Box<CExpr>, Box<CExpr>),
    Ne(Box<CExpr>, Box<CExpr>),
    And(Box<CExpr>, Box<CExpr>),
    Or(Box<CExpr>, Box<CExpr>),
    Not(Box<CExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum CStmt {
    Assign { cell: u16, value: CExpr },
    Add { set: u16, elem: CExpr },
    If { cond: CExpr, then: Vec<CStmt>, otherwise: Vec<CStmt> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum CPat {
    Bind(u8),
    Match(CExpr),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Stop,
    Skip,
    Event { label: Option<u32>, stmts: Vec<CStmt>, next: NodeId },
    Output { chan: u16, values: Vec<CExpr>, stmts: Vec<CStmt>, next: NodeId },
    Input { chan: u16, pattern: Vec<CPat>, stmts: Vec<CStmt>, next: NodeId },
    Choice(NodeId, NodeId),
    IndexedChoice { level: u8, domain: Vec<Scalar>, body: NodeId },
    Cond { guard: CExpr, then: NodeId, otherwise: NodeId },
    Case { arms: Vec<(CExpr, NodeId)>, default: NodeId },
    Seq(NodeId, NodeId),
    Interleave(Vec<NodeId>),
    Call { def: u16, args: Vec<CExpr> },
}

#[derive(Clone, Debug)]
pub(crate) struct NodeInfo {
    pub node: Node,
    /// Free binder levels, ascending. A closure's environment lists their values in this order.
    pub free: Vec<u8>,
    /// Binder names for `free`, used to render closures back to source.
    pub free_names: Vec<String>,
    pub source: ProcessExpr,
    /// Definitions whose bodies contain this node.
    pub owners: BTreeSet<u16>,
}

#[derive(Clone, Debug)]
pub(crate) struct CompiledDef {
    pub name: String,
    pub params: usize,
    pub body: NodeId,
}

#[derive(Clone, Debug)]
pub(crate) enum GlobalSlot {
    Scalar(u16),
    Array { start: u16, len: u16 },
}

#[derive(Clone, Debug)]
pub(crate) struct SetInfo {
    pub name: String,
    pub universe: Vec<Value>,
    pub index: HashMap<Value, usize>,
    pub word_offset: usize,
}

/// A compiled, validated ceremony model. Immutable and shareable across threads.
#[derive(Debug)]
pub struct Model {
    pub(crate) def: ModelDef,
    pub(crate) nodes: Vec<NodeInfo>,
    pub(crate) defs: Vec<CompiledDef>,
    pub(crate) globals: Vec<(String, GlobalSlot)>,
    pub(crate) initial_cells: Vec<Scalar>,
    pub(crate) sets: Vec<SetInfo>,
    pub(crate) set_words: usize,
    pub(crate) channels: Vec<Arc<str>>,
    pub(crate) labels: Vec<Arc<str>>,
    pub(crate) macros: Vec<(String, CExpr)>,
    pub(crate) entry: NodeId,
    /// Closures keyed by (node, env), mapped to the first closure seen with
    /// the same closed source form.
    pub(crate) canon: RwLock<Canon>,
}

#[derive(Debug, Default)]
pub(crate) struct Canon {
    pub(crate) by_closure: FxHashMap<Closure, Closure>,
    pub(crate) by_source: FxHashMap<ProcessExpr, Closure>,
}

struct Compiler<'a> {
    def: &'a ModelDef,
    nodes: Vec<NodeInfo>,
    interned: HashMap<Node, NodeId>,
    def_index: HashMap<String, u16>,
    globals: HashMap<String, GlobalSlot>,
    set_index: HashMap<String, u16>,
    chan_index: HashMap<String, u16>,
    labels: Vec<Arc<str>>,
    label_index: HashMap<String, u32>,
    macro_src: HashMap<String, &'a Expr>,
    macro_cache: HashMap<String, CExpr>,
    macro_stack: Vec<String>,
    current_def: u16,
}

fn dup(context: &str, name: &str) -> ModelError {
    ModelError::DuplicateName { context: context.to_string(), name: name.to_string() }
}

impl Model {
    /// Validates and compiles a model definition.
    pub fn compile(def: ModelDef) -> Result<Model, ModelError> {
        let mut names = BTreeSet::new();
        let decl = "declarations";
        for n in def
            .channels
            .iter()
            .chain(def.vars.iter().map(|v| &v.name))
            .chain(def.arrays.iter().map(|a| &a.name))
            .chain(def.sets.iter().map(|s| &s.name))
            .chain(def.macros.iter().map(|m| &m.0))
            .chain(def.processes.iter().map(|p| &p.name))
        {
            if !names.insert(n.clone()) {
                return Err(dup(decl, n));
            }
        }

        let mut globals = HashMap::new();
        let mut global_list = Vec::new();
        let mut cell_names = Vec::new();
        let mut initial_cells = Vec::new();
        for v in &def.vars {
            let slot = GlobalSlot::Scalar(cell_names.len() as u16);
            cell_names.push(v.name.clone());
            initial_cells.push(v.init);
            globals.insert(v.name.clone(), slot.clone());
            global_list.push((v.name.clone(), slot));
        }
        for a in &def.arrays {
            let slot = GlobalSlot::Array { start: cell_names.len() as u16, len: a.len as u16 };
            for i in 0..a.len {
                cell_names.push(format!("{}[{}]", a.name, i));
                initial_cells.push(a.init);
            }
            globals.insert(a.name.clone(), slot.clone());
            global_list.push((a.name.clone(), slot));
        }

        let mut sets = Vec::new();
        let mut set_index = HashMap::new();
        let mut word_offset = 0;
        for (i, s) in def.sets.iter().enumerate() {
            let mut index = HashMap::new();
            for (k, v) in s.universe.iter().enumerate() {
                if index.insert(v.clone(), k).is_some() {
                    return Err(dup(&s.name, &v.to_string()));
                }
            }
            let words = s.universe.len().div_ceil(64).max(1);
            sets.push(SetInfo {
                name: s.name.clone(),
                universe: s.universe.clone(),
                index,
                word_offset,
            });
            word_offset += words;
            set_index.insert(s.name.clone(), i as u16);
        }

        let chan_index =
            def.channels.iter().enumerate().map(|(i, c)| (c.clone(), i as u16)).collect();
        let def_index =
            def.processes.iter().enumerate().map(|(i, p)| (p.name.clone(), i as u16)).collect();
        let macro_src = def.macros.iter().map(|(n, e)| (n.clone(), e)).collect();

        let mut c = Compiler {
            def: &def,
            nodes: Vec::new(),
            interned: HashMap::new(),
            def_index,
            globals,
            set_index,
            chan_index,
            labels: Vec::new(),
            label_index: HashMap::new(),
            macro_src,
            macro_cache: HashMap::new(),
            macro_stack: Vec::new(),
            current_def: 0,
        };

        let mut macros = Vec::new();
        for (name, _) in &def.macros {
            let ce = c.macro_expr(name, name)?;
            macros.push((name.clone(), ce));
        }

        let mut defs = Vec::new();
        for (i, p) in def.processes.iter().enumerate() {
            c.current_def = i as u16;
            if p.params.len() > MAX_LOCALS {
                return Err(ModelError::Invalid {
                    context: p.name.clone(),
                    detail: "too many parameters".into(),
                });
            }
            let mut scope: Vec<String> = p.params.clone();
            let body = c.process(&p.body, &mut scope, &p.name)?;
            defs.push(CompiledDef { name: p.name.clone(), params: p.params.len(), body });
        }

        let entry_idx = *c.def_index.get(&def.entry).ok_or_else(|| ModelError::UndeclaredName {
            context: "entry".into(),
            name: def.entry.clone(),
        })?;
        if defs[entry_idx as usize].params != 0 {
            return Err(ModelError::Arity {
                context: "entry".into(),
                name: def.entry.clone(),
                expected: 0,
                got: defs[entry_idx as usize].params,
            });
        }
        c.current_def = entry_idx;
        let entry = c.intern(
            Node::Call { def: entry_idx, args: Vec::new() },
            vec![],
            ProcessExpr::Call(def.entry.clone(), Vec::new()),
        );

        let Compiler { nodes, labels, .. } = c;
        let channels = def.channels.iter().map(|s| Arc::from(s.as_str())).collect();
        Ok(Model {
            nodes,
            defs,
            globals: global_list,
            initial_cells,
            sets,
            set_words: word_offset,
            channels,
            labels,
            macros,
            entry,
            def,
            canon: RwLock::default(),
        })
    }

    pub fn definition(&self) -> &ModelDef {
        &self.def
    }

    pub(crate) fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0 as usize].node
    }

    pub(crate) fn info(&self, id: NodeId) -> &NodeInfo {
        &self.nodes[id.0 as usize]
    }

    /// Names of the process definitions whose bodies contain `id`.
    pub fn node_owners(&self, id: NodeId) -> impl Iterator<Item = &str> {
        self.info(id).owners.iter().map(|d| self.defs[*d as usize].name.as_str())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn macro_names(&self) -> impl Iterator<Item = &str> {
        self.macros.iter().map(|(n, _)| n.as_str())
    }

    pub fn macro_index(&self, name: &str) -> Option<usize> {
        self.macros.iter().position(|(n, _)| n == name)
    }
}

impl Model {
    fn global_slot(&self, name: &str) -> Option<&GlobalSlot> {
        self.globals.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub(crate) fn global_cell(&self, name: &str) -> Option<usize> {
        match self.global_slot(name)? {
            GlobalSlot::Scalar(c) => Some(*c as usize),
            _ => None,
        }
    }

    fn set_id(&self, name: &str, ctx: &str) -> Result<u16, ModelError> {
        self.sets.iter().position(|s| s.name == name).map(|i| i as u16).ok_or_else(|| {
            ModelError::UndeclaredName { context: ctx.to_string(), name: name.to_string() }
        })
    }

    /// Lowers an expression with no local binders against this model's globals and macros.
    pub(crate) fn lower_expr(&self, e: &Expr, ctx: &str) -> Result<CExpr, ModelError> {
        let b = |x: &Expr| self.lower_expr(x, ctx).map(Box::new);
        let undeclared =
            |n: &str| ModelError::UndeclaredName { context: ctx.to_string(), name: n.to_string() };
        Ok(match e {
            Expr::Const(v) => CExpr::Const(v.clone()),
            Expr::Var(n) | Expr::Macro(n) => match self.global_slot(n) {
                Some(GlobalSlot::Scalar(c)) if matches!(e, Expr::Var(_)) => CExpr::Cell(*c),
                Some(GlobalSlot::Array { start, len }) if matches!(e, Expr::Var(_)) => {
                    CExpr::Array { start: *start, len: *len }
                }
                _ => match self.macro_index(n) {
                    Some(i) => self.macros[i].1.clone(),
                    None => return Err(undeclared(n)),
                },
            },
            Expr::Index(n, i) => match self.global_slot(n) {
                Some(GlobalSlot::Array { start, len }) if *i < *len as usize => {
                    CExpr::Cell(start + *i as u16)
                }
                Some(GlobalSlot::Array { .. }) => {
                    return Err(ModelError::IndexOutOfRange {
                        context: ctx.to_string(),
                        name: n.clone(),
                        index: *i,
                    })
                }
                Some(_) => {
                    return Err(ModelError::TypeMismatch {
                        context: ctx.to_string(),
                        expr: e.to_string(),
                        detail: format!("`{n}` is not an array"),
                    })
                }
                None => return Err(undeclared(n)),
            },
            Expr::Contains(s, x) => CExpr::Contains { set: self.set_id(s, ctx)?, elem: b(x)? },
            Expr::Eq(x, y) => CExpr::Eq(b(x)?, b(y)?),
            Expr::Ne(x, y) => CExpr::Ne(b(x)?, b(y)?),
            Expr::And(x, y) => CExpr::And(b(x)?, b(y)?),
            Expr::Or(x, y) => CExpr::Or(b(x)?, b(y)?),
            Expr::Not(x) => CExpr::Not(b(x)?),
        })
    }

    pub(crate) fn lower_stmt(&self, s: &Stmt, ctx: &str) -> Result<CStmt, ModelError> {
        Ok(match s {
            Stmt::Assign { target, value } => {
                let cell = match (target, self.global_slot(target_name(target))) {
                    (Target::Var(_), Some(GlobalSlot::Scalar(c))) => *c,
                    (Target::Cell(_, i), Some(GlobalSlot::Array { start, len })) if *i < *len as usize => {
                        start + *i as u16
                    }
                    (_, None) => {
                        return Err(ModelError::UndeclaredName {
                            context: ctx.to_string(),
                            name: target_name(target).to_string(),
                        })
                    }
                    _ => {
                        return Err(ModelError::TypeMismatch {
                            context: ctx.to_string(),
                            expr: s.to_string(),
                            detail: "assignment target shape does not match declaration".into(),
                        })
                    }
                };
                CStmt::Assign { cell, value: self.lower_expr(value, ctx)? }
            }
            Stmt::Add { set, elem } => {
                CStmt::Add { set: self.set_id(set, ctx)?, elem: self.lower_expr(elem, ctx)? }
            }
            Stmt::If { cond, then, otherwise } => CStmt::If {
                cond: self.lower_expr(cond, ctx)?,
                then: then.iter().map(|s| self.lower_stmt(s, ctx)).collect::<Result<_, _>>()?,
                otherwise: otherwise
                    .iter()
                    .map(|s| self.lower_stmt(s, ctx))
                    .collect::<Result<_, _>>()?,
            },
        })
    }
}

impl<'a> Compiler<'a> {
    fn intern(&mut self, node: Node, free: Vec<(u8, String)>, source: ProcessExpr) -> NodeId {
        if let Some(&id) = self.interned.get(&node) {
            self.nodes[id.0 as usize].owners.insert(self.current_def);
            return id;
        }
        let id = NodeId(self.nodes.len() as u32);
        let (free, free_names) = free.into_iter().unzip();
        self.nodes.push(NodeInfo {
            node: node.clone(),
            free,
            free_names,
            source,
            owners: BTreeSet::from([self.current_def]),
        });
        self.interned.insert(node, id);
        id
    }

    fn label(&mut self, name: &str) -> u32 {
        if let Some(&i) = self.label_index.get(name) {
            return i;
        }
        let i = self.labels.len() as u32;
        self.labels.push(Arc::from(name));
        self.label_index.insert(name.to_string(), i);
        i
    }

    fn macro_expr(&mut self, name: &str, ctx: &str) -> Result<CExpr, ModelError> {
        if let Some(e) = self.macro_cache.get(name) {
            return Ok(e.clone());
        }
        if self.macro_stack.iter().any(|m| m == name) {
            return Err(ModelError::Invalid {
                context: ctx.to_string(),
                detail: format!("macro `{name}` is recursive"),
            });
        }
        let src = *self.macro_src.get(name).ok_or_else(|| ModelError::UndeclaredName {
            context: ctx.to_string(),
            name: name.to_string(),
        })?;
        self.macro_stack.push(name.to_string());
        let e = self.expr(src, &[], name);
        self.macro_stack.pop();
        let e = e?;
        self.macro_cache.insert(name.to_string(), e.clone());
        Ok(e)
    }

    fn expr(&mut self, e: &Expr, scope: &[String], ctx: &str) -> Result<CExpr, ModelError> {
        let b = |c: &mut Self, x: &Expr| c.expr(x, scope, ctx).map(Box::new);
        Ok(match e {
            Expr::Const(v) => CExpr::Const(v.clone()),
            Expr::Var(n) => {
                if let Some(level) = scope.iter().rposition(|s| s == n) {
                    CExpr::Local(level as u8)
                } else if let Some(slot) = self.globals.get(n) {
                    match slot {
                        GlobalSlot::Scalar(c) => CExpr::Cell(*c),
                        GlobalSlot::Array { start, len } => {
                            CExpr::Array { start: *start, len: *len }
                        }
                    }
                } else if self.macro_src.contains_key(n) {
                    self.macro_expr(n, ctx)?
                } else {
                    return Err(ModelError::UndeclaredName {
                        context: ctx.to_string(),
                        name: n.clone(),
                    });
                }
            }
            Expr::Macro(n) => self.macro_expr(n, ctx)?,
            Expr::Index(n, i) => match self.globals.get(n) {
                Some(GlobalSlot::Array { start, len }) => {
                    if *i >= *len as usize {
                        return Err(ModelError::IndexOutOfRange {
                            context: ctx.to_string(),
                            name: n.clone(),
                            index: *i,
                        });
                    }
                    CExpr::Cell(start + *i as u16)
                }
                Some(GlobalSlot::Scalar(_)) => {
                    return Err(ModelError::TypeMismatch {
                        context: ctx.to_string(),
                        expr: e.to_string(),
                        detail: format!("`{n}` is not an array"),
                    })
                }
                None => {
                    return Err(ModelError::UndeclaredName {
                        context: ctx.to_string(),
                        name: n.clone(),
                    })
                }
            },
            Expr::Contains(s, x) => {
                let set = *self.set_index.get(s).ok_or_else(|| ModelError::UndeclaredName {
                    context: ctx.to_string(),
                    name: s.clone(),
                })?;
                CExpr::Contains { set, elem: b(self, x)? }
            }
            Expr::Eq(x, y) => CExpr::Eq(b(self, x)?, b(self, y)?),
            Expr::Ne(x, y) => CExpr::Ne(b(self, x)?, b(self, y)?),
            Expr::And(x, y) => CExpr::And(b(self, x)?, b(self, y)?),
            Expr::Or(x, y) => CExpr::Or(b(self, x)?, b(self, y)?),
            Expr::Not(x) => CExpr::Not(b(self, x)?),
        })
    }

    fn stmts(&mut self, ss: &[Stmt], scope: &[String], ctx: &str) -> Result<Vec<CStmt>, ModelError> {
        ss.iter().map(|s| self.stmt(s, scope, ctx)).collect()
    }

    fn stmt(&mut self, s: &Stmt, scope: &[String], ctx: &str) -> Result<CStmt, ModelError> {
        Ok(match s {
            Stmt::Assign { target, value } => {
                let cell = match (target, self.globals.get(target_name(target))) {
                    (Target::Var(_), Some(GlobalSlot::Scalar(c))) => *c,
                    (Target::Cell(n, i), Some(GlobalSlot::Array { start, len })) => {
                        if *i >= *len as usize {
                            return Err(ModelError::IndexOutOfRange {
                                context: ctx.to_string(),
                                name: n.clone(),
                                index: *i,
                            });
                        }
                        start + *i as u16
                    }
                    (_, None) => {
                        return Err(ModelError::UndeclaredName {
                            context: ctx.to_string(),
                            name: target_name(target).to_string(),
                        })
                    }
                    _ => {
                        return Err(ModelError::TypeMismatch {
                            context: ctx.to_string(),
                            expr: s.to_string(),
                            detail: "assignment target shape does not match declaration".into(),
                        })
                    }
                };
                CStmt::Assign { cell, value: self.expr(value, scope, ctx)? }
            }
            Stmt::Add { set, elem } => {
                let set_id = *self.set_index.get(set).ok_or_else(|| ModelError::UndeclaredName {
                    context: ctx.to_string(),
                    name: set.clone(),
                })?;
                CStmt::Add { set: set_id, elem: self.expr(elem, scope, ctx)? }
            }
            Stmt::If { cond, then, otherwise } => CStmt::If {
                cond: self.expr(cond, scope, ctx)?,
                then: self.stmts(then, scope, ctx)?,
                otherwise: self.stmts(otherwise, scope, ctx)?,
            },
        })
    }

    fn chan(&self, name: &str, ctx: &str) -> Result<u16, ModelError> {
        self.chan_index.get(name).copied().ok_or_else(|| ModelError::UndeclaredName {
            context: ctx.to_string(),
            name: name.to_string(),
        })
    }

    fn free_of(&self, id: NodeId) -> impl Iterator<Item = (u8, String)> + '_ {
        let info = &self.nodes[id.0 as usize];
        info.free.iter().copied().zip(info.free_names.iter().cloned())
    }

    /// Compiles `p` with `scope` listing the names bound at each level.
    fn process(
        &mut self,
        p: &ProcessExpr,
        scope: &mut Vec<String>,
        ctx: &str,
    ) -> Result<NodeId, ModelError> {
        let mut free = BTreeMap::<u8, String>::new();
        let node = match p {
            ProcessExpr::Stop => Node::Stop,
            ProcessExpr::Skip => Node::Skip,
            ProcessExpr::Event { label, stmts, next } => {
                let stmts = self.stmts(stmts, scope, ctx)?;
                collect_stmts(&stmts, scope, &mut free);
                let next = self.process(next, scope, ctx)?;
                free.extend(self.free_of(next));
                let label = label.as_deref().map(|l| self.label(l));
                Node::Event { label, stmts, next }
            }
            ProcessExpr::Output { channel, values, stmts, next } => {
                let chan = self.chan(channel, ctx)?;
                let values = values
                    .iter()
                    .map(|v| self.expr(v, scope, ctx))
                    .collect::<Result<Vec<_>, _>>()?;
                for v in &values {
                    collect_expr(v, scope, &mut free);
                }
                let stmts = self.stmts(stmts, scope, ctx)?;
                collect_stmts(&stmts, scope, &mut free);
                let next = self.process(next, scope, ctx)?;
                free.extend(self.free_of(next));
                Node::Output { chan, values, stmts, next }
            }
            ProcessExpr::Input { channel, pattern, stmts, next } => {
                let chan = self.chan(channel, ctx)?;
                let depth = scope.len();
                let mut cpat = Vec::new();
                for pe in pattern {
                    match pe {
                        Pattern::Match(e) => {
                            let ce = self.expr(e, scope, ctx)?;
                            collect_expr(&ce, scope, &mut free);
                            cpat.push(CPat::Match(ce));
                        }
                        Pattern::Bind(n) => {
                            if scope.len() >= MAX_LOCALS {
                                return Err(ModelError::Invalid {
                                    context: ctx.to_string(),
                                    detail: "too many nested binders".into(),
                                });
                            }
                            cpat.push(CPat::Bind(scope.len() as u8));
                            scope.push(n.clone());
                        }
                    }
                }
                let stmts = self.stmts(stmts, scope, ctx);
                let next = stmts.and_then(|s| self.process(next, scope, ctx).map(|n| (s, n)));
                scope.truncate(depth);
                let (stmts, next) = next?;
                let mut inner = BTreeMap::new();
                collect_stmts(&stmts, scope, &mut inner);
                inner.extend(self.free_of(next));
                free.extend(inner.into_iter().filter(|(l, _)| (*l as usize) < depth));
                Node::Input { chan, pattern: cpat, stmts, next }
            }
            ProcessExpr::Choice(a, b) => {
                let a = self.process(a, scope, ctx)?;
                let b = self.process(b, scope, ctx)?;
                free.extend(self.free_of(a));
                free.extend(self.free_of(b));
                Node::Choice(a, b)
            }
            ProcessExpr::IndexedChoice { binder, domain, body } => {
                if domain.is_empty() {
                    return Err(ModelError::EmptyDomain { context: ctx.to_string() });
                }
                if scope.len() >= MAX_LOCALS {
                    return Err(ModelError::Invalid {
                        context: ctx.to_string(),
                        detail: "too many nested binders".into(),
                    });
                }
                let level = scope.len() as u8;
                scope.push(binder.clone());
                let body = self.process(body, scope, ctx);
                scope.pop();
                let body = body?;
                free.extend(self.free_of(body).filter(|(l, _)| *l < level));
                Node::IndexedChoice { level, domain: domain.clone(), body }
            }
            ProcessExpr::Conditional { guard, then, otherwise, .. } => {
                let guard = self.expr(guard, scope, ctx)?;
                collect_expr(&guard, scope, &mut free);
                let then = self.process(then, scope, ctx)?;
                let otherwise = match otherwise {
                    Some(o) => self.process(o, scope, ctx)?,
                    None => self.process(&ProcessExpr::Skip, scope, ctx)?,
                };
                free.extend(self.free_of(then));
                free.extend(self.free_of(otherwise));
                Node::Cond { guard, then, otherwise }
            }
            ProcessExpr::Case { arms, default } => {
                let mut carms = Vec::new();
                for (c, body) in arms {
                    let c = self.expr(c, scope, ctx)?;
                    collect_expr(&c, scope, &mut free);
                    let body = self.process(body, scope, ctx)?;
                    free.extend(self.free_of(body));
                    carms.push((c, body));
                }
                let default = self.process(default, scope, ctx)?;
                free.extend(self.free_of(default));
                Node::Case { arms: carms, default }
            }
            ProcessExpr::Seq(a, b) => {
                let a = self.process(a, scope, ctx)?;
                let b = self.process(b, scope, ctx)?;
                free.extend(self.free_of(a));
                free.extend(self.free_of(b));
                Node::Seq(a, b)
            }
            ProcessExpr::Interleave(ps) => {
                let mut ids = Vec::new();
                for q in ps {
                    let id = self.process(q, scope, ctx)?;
                    free.extend(self.free_of(id));
                    ids.push(id);
                }
                Node::Interleave(ids)
            }
            ProcessExpr::Call(name, args) => {
                let def = *self.def_index.get(name).ok_or_else(|| ModelError::UndeclaredName {
                    context: ctx.to_string(),
                    name: name.clone(),
                })?;
                let expected = self.def.processes[def as usize].params.len();
                if expected != args.len() {
                    return Err(ModelError::Arity {
                        context: ctx.to_string(),
                        name: name.clone(),
                        expected,
                        got: args.len(),
                    });
                }
                let args = args
                    .iter()
                    .map(|a| self.expr(a, scope, ctx))
                    .collect::<Result<Vec<_>, _>>()?;
                for a in &args {
                    collect_expr(a, scope, &mut free);
                }
                Node::Call { def, args }
            }
        };
        Ok(self.intern(node, free.into_iter().collect(), p.clone()))
    }
}

fn target_name(t: &Target) -> &str {
    match t {
        Target::Var(n) | Target::Cell(n, _) => n,
    }
}

fn name_at(scope: &[String], level: u8) -> String {
    scope.get(level as usize).cloned().unwrap_or_default()
}

fn collect_expr(e: &CExpr, scope: &[String], out: &mut BTreeMap<u8, String>) {
    match e {
        CExpr::Local(l) => {
            out.entry(*l).or_insert_with(|| name_at(scope, *l));
        }
        CExpr::Const(_) | CExpr::Cell(_) | CExpr::Array { .. } => {}
        CExpr::Contains { elem, .. } => collect_expr(elem, scope, out),
        CExpr::Not(a) => collect_expr(a, scope, out),
        CExpr::Eq(a, b) | CExpr::Ne(a, b) | CExpr::And(a, b) | CExpr::Or(a, b) => {
            collect_expr(a, scope, out);
            collect_expr(b, scope, out);
        }
    }
}

fn collect_stmts(ss: &[CStmt], scope: &[String], out: &mut BTreeMap<u8, String>) {
    for s in ss {
        match s {
            CStmt::Assign { value, .. } => collect_expr(value, scope, out),
            CStmt::Add { elem, .. } => collect_expr(elem, scope, out),
            CStmt::If { cond, then, otherwise } => {
                collect_expr(cond, scope, out);
                collect_stmts(then, scope, out);
                collect_stmts(otherwise, scope, out);
            }
        }
    }
}
