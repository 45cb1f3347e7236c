//! Source-level syntax of ceremony models: expressions, statement blocks,
//! process expressions and whole model definitions.

use std::fmt;

use super::value::{Scalar, Value};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Value),
    /// A global scalar, a whole global array (read as a tuple), or a local binder.
    Var(String),
    /// Array cell read with a literal index.
    Index(String, usize),
    /// `set.Contains(e)`
    Contains(String, Box<Expr>),
    /// Reference to a `#define`d macro.
    Macro(String),
    Eq(Box<Expr>, Box<Expr>),
    Ne(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn konst(v: impl Into<Value>) -> Expr {
        Expr::Const(v.into())
    }

    pub fn index(name: &str, i: usize) -> Expr {
        Expr::Index(name.to_string(), i)
    }

    pub fn eq(a: Expr, b: Expr) -> Expr {
        Expr::Eq(Box::new(a), Box::new(b))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Expr) -> Expr {
        Expr::Not(Box::new(a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Var(String),
    Cell(String, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Stmt {
    Assign { target: Target, value: Expr },
    /// `set.Add(e)`; idempotent.
    Add { set: String, elem: Expr },
    If { cond: Expr, then: Vec<Stmt>, otherwise: Vec<Stmt> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    Bind(String),
    Match(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProcessExpr {
    Stop,
    Skip,
    /// `name{stmts} -> next`; a `None` label is an internal (tau) step.
    Event { label: Option<String>, stmts: Vec<Stmt>, next: Box<ProcessExpr> },
    Output { channel: String, values: Vec<Expr>, stmts: Vec<Stmt>, next: Box<ProcessExpr> },
    Input { channel: String, pattern: Vec<Pattern>, stmts: Vec<Stmt>, next: Box<ProcessExpr> },
    Choice(Box<ProcessExpr>, Box<ProcessExpr>),
    IndexedChoice { binder: String, domain: Vec<Scalar>, body: Box<ProcessExpr> },
    Conditional {
        guard: Expr,
        then: Box<ProcessExpr>,
        otherwise: Option<Box<ProcessExpr>>,
        atomic: bool,
    },
    /// `case { c1: P1 ... default: Q }`, first matching arm wins.
    Case { arms: Vec<(Expr, ProcessExpr)>, default: Box<ProcessExpr> },
    Seq(Box<ProcessExpr>, Box<ProcessExpr>),
    Interleave(Vec<ProcessExpr>),
    Call(String, Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: ProcessExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub init: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrayDecl {
    pub name: String,
    pub len: usize,
    pub init: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetDecl {
    pub name: String,
    /// Every value the set may ever contain, in a fixed order.
    pub universe: Vec<Value>,
}

/// A complete ceremony model: declarations plus named process definitions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelDef {
    pub channels: Vec<String>,
    pub vars: Vec<VarDecl>,
    pub arrays: Vec<ArrayDecl>,
    pub sets: Vec<SetDecl>,
    pub macros: Vec<(String, Expr)>,
    pub processes: Vec<ProcessDef>,
    pub entry: String,
}

impl ModelDef {
    pub fn process(&self, name: &str) -> Option<&ProcessDef> {
        self.processes.iter().find(|p| p.name == name)
    }

    pub fn process_mut(&mut self, name: &str) -> Option<&mut ProcessDef> {
        self.processes.iter_mut().find(|p| p.name == name)
    }

    pub fn macro_body(&self, name: &str) -> Option<&Expr> {
        self.macros.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    pub fn set_mut(&mut self, name: &str) -> Option<&mut SetDecl> {
        self.sets.iter_mut().find(|s| s.name == name)
    }

    /// Adds or replaces a process definition.
    pub fn define(&mut self, def: ProcessDef) {
        match self.process_mut(&def.name) {
            Some(slot) => *slot = def,
            None => self.processes.push(def),
        }
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{it}")?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Var(n) | Expr::Macro(n) => f.write_str(n),
            Expr::Index(n, i) => write!(f, "{n}[{i}]"),
            Expr::Contains(s, e) => write!(f, "{s}.Contains({e})"),
            Expr::Eq(a, b) => write!(f, "({a}=={b})"),
            Expr::Ne(a, b) => write!(f, "({a}!={b})"),
            Expr::And(a, b) => write!(f, "({a} && {b})"),
            Expr::Or(a, b) => write!(f, "({a} || {b})"),
            Expr::Not(a) => write!(f, "!{a}"),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Var(n) => f.write_str(n),
            Target::Cell(n, i) => write!(f, "{n}[{i}]"),
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Assign { target, value } => write!(f, "{target}={value}"),
            Stmt::Add { set, elem } => write!(f, "{set}.Add({elem})"),
            Stmt::If { cond, then, otherwise } => {
                write!(f, "if ({cond}) {{")?;
                write_list(f, then, "; ")?;
                f.write_str("}")?;
                if !otherwise.is_empty() {
                    f.write_str(" else {")?;
                    write_list(f, otherwise, "; ")?;
                    f.write_str("}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Bind(n) => f.write_str(n),
            Pattern::Match(e) => write!(f, "{e}"),
        }
    }
}

fn write_block(f: &mut fmt::Formatter<'_>, stmts: &[Stmt]) -> fmt::Result {
    if stmts.is_empty() {
        return Ok(());
    }
    f.write_str("{")?;
    write_list(f, stmts, "; ")?;
    f.write_str("}")
}

impl fmt::Display for ProcessExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcessExpr::Stop => f.write_str("Stop"),
            ProcessExpr::Skip => f.write_str("Skip"),
            ProcessExpr::Event { label, stmts, next } => {
                f.write_str(label.as_deref().unwrap_or("tau"))?;
                write_block(f, stmts)?;
                write!(f, " -> {next}")
            }
            ProcessExpr::Output { channel, values, stmts, next } => {
                write!(f, "{channel}!")?;
                write_list(f, values, ".")?;
                write_block(f, stmts)?;
                write!(f, " -> {next}")
            }
            ProcessExpr::Input { channel, pattern, stmts, next } => {
                write!(f, "{channel}?")?;
                write_list(f, pattern, ".")?;
                write_block(f, stmts)?;
                write!(f, " -> {next}")
            }
            ProcessExpr::Choice(a, b) => write!(f, "({a} [] {b})"),
            ProcessExpr::IndexedChoice { binder, domain, body } => {
                write!(f, "([]{binder}:{{")?;
                write_list(f, domain, ",")?;
                write!(f, "}}@ {body})")
            }
            ProcessExpr::Conditional { guard, then, otherwise, atomic } => {
                let kw = if *atomic { "ifa" } else { "if" };
                write!(f, "{kw} ({guard}) {{{then}}}")?;
                if let Some(o) = otherwise {
                    write!(f, " else {{{o}}}")?;
                }
                Ok(())
            }
            ProcessExpr::Case { arms, default } => {
                f.write_str("case {")?;
                for (c, p) in arms {
                    write!(f, "{c}: {p} ")?;
                }
                write!(f, "default: {default}}}")
            }
            ProcessExpr::Seq(a, b) => write!(f, "({a}; {b})"),
            ProcessExpr::Interleave(ps) => {
                f.write_str("(")?;
                write_list(f, ps, " ||| ")?;
                f.write_str(")")
            }
            ProcessExpr::Call(n, args) => {
                write!(f, "{n}(")?;
                write_list(f, args, ",")?;
                f.write_str(")")
            }
        }
    }
}
