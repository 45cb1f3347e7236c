//! Process language: syntax, parsing, compilation and the step relation.

pub mod ast;
mod compile;
pub mod error;
pub mod parse;
mod state;
mod step;
pub mod subst;
pub mod value;

pub use ast::{ArrayDecl, Expr, ModelDef, Pattern, ProcessDef, ProcessExpr, SetDecl, Stmt, Target, VarDecl};
pub use compile::{Model, NodeId};
pub use error::{ModelError, ParseError};
pub use parse::{parse_expr, parse_model, parse_process};
pub use state::{Closure, Config, EventLabel, GlobalState, Snapshot, Term};
pub use value::{Scalar, Sym, Value};
