//! Capture-aware substitution of values for local names in source syntax.

use super::ast::{Expr, Pattern, ProcessExpr, Stmt};
use super::value::Value;

type Binding<'a> = (&'a str, Value);

fn lookup<'a>(s: &'a [Binding<'_>], name: &str) -> Option<&'a Value> {
    s.iter().rev().find(|(n, _)| *n == name).map(|(_, v)| v)
}

pub fn substitute_expr(e: &Expr, s: &[Binding<'_>]) -> Expr {
    let b = |x: &Expr| Box::new(substitute_expr(x, s));
    match e {
        Expr::Var(n) => match lookup(s, n) {
            Some(v) => Expr::Const(v.clone()),
            None => e.clone(),
        },
        Expr::Const(_) | Expr::Index(..) | Expr::Macro(_) => e.clone(),
        Expr::Contains(set, x) => Expr::Contains(set.clone(), b(x)),
        Expr::Eq(x, y) => Expr::Eq(b(x), b(y)),
        Expr::Ne(x, y) => Expr::Ne(b(x), b(y)),
        Expr::And(x, y) => Expr::And(b(x), b(y)),
        Expr::Or(x, y) => Expr::Or(b(x), b(y)),
        Expr::Not(x) => Expr::Not(b(x)),
    }
}

pub fn substitute_stmts(ss: &[Stmt], s: &[Binding<'_>]) -> Vec<Stmt> {
    ss.iter()
        .map(|st| match st {
            Stmt::Assign { target, value } => {
                Stmt::Assign { target: target.clone(), value: substitute_expr(value, s) }
            }
            Stmt::Add { set, elem } => Stmt::Add { set: set.clone(), elem: substitute_expr(elem, s) },
            Stmt::If { cond, then, otherwise } => Stmt::If {
                cond: substitute_expr(cond, s),
                then: substitute_stmts(then, s),
                otherwise: substitute_stmts(otherwise, s),
            },
        })
        .collect()
}

fn without<'a>(s: &[Binding<'a>], names: &[&str]) -> Vec<Binding<'a>> {
    s.iter().filter(|(n, _)| !names.contains(n)).cloned().collect()
}

/// Replaces free occurrences of each bound name by its value. Names rebound by
/// an input pattern or an indexed choice are left alone below the binder.
pub fn substitute(p: &ProcessExpr, s: &[Binding<'_>]) -> ProcessExpr {
    if s.is_empty() {
        return p.clone();
    }
    let b = |q: &ProcessExpr| Box::new(substitute(q, s));
    match p {
        ProcessExpr::Stop | ProcessExpr::Skip => p.clone(),
        ProcessExpr::Event { label, stmts, next } => ProcessExpr::Event {
            label: label.clone(),
            stmts: substitute_stmts(stmts, s),
            next: b(next),
        },
        ProcessExpr::Output { channel, values, stmts, next } => ProcessExpr::Output {
            channel: channel.clone(),
            values: values.iter().map(|v| substitute_expr(v, s)).collect(),
            stmts: substitute_stmts(stmts, s),
            next: b(next),
        },
        ProcessExpr::Input { channel, pattern, stmts, next } => {
            let bound: Vec<&str> = pattern
                .iter()
                .filter_map(|pt| match pt {
                    Pattern::Bind(n) => Some(n.as_str()),
                    Pattern::Match(_) => None,
                })
                .collect();
            let inner = without(s, &bound);
            ProcessExpr::Input {
                channel: channel.clone(),
                pattern: pattern
                    .iter()
                    .map(|pt| match pt {
                        Pattern::Bind(_) => pt.clone(),
                        Pattern::Match(e) => Pattern::Match(substitute_expr(e, s)),
                    })
                    .collect(),
                stmts: substitute_stmts(stmts, &inner),
                next: Box::new(substitute(next, &inner)),
            }
        }
        ProcessExpr::Choice(x, y) => ProcessExpr::Choice(b(x), b(y)),
        ProcessExpr::IndexedChoice { binder, domain, body } => ProcessExpr::IndexedChoice {
            binder: binder.clone(),
            domain: domain.clone(),
            body: Box::new(substitute(body, &without(s, &[binder.as_str()]))),
        },
        ProcessExpr::Conditional { guard, then, otherwise, atomic } => ProcessExpr::Conditional {
            guard: substitute_expr(guard, s),
            then: b(then),
            otherwise: otherwise.as_ref().map(|o| b(o)),
            atomic: *atomic,
        },
        ProcessExpr::Case { arms, default } => ProcessExpr::Case {
            arms: arms.iter().map(|(c, q)| (substitute_expr(c, s), substitute(q, s))).collect(),
            default: b(default),
        },
        ProcessExpr::Seq(x, y) => ProcessExpr::Seq(b(x), b(y)),
        ProcessExpr::Interleave(ps) => {
            ProcessExpr::Interleave(ps.iter().map(|q| substitute(q, s)).collect())
        }
        ProcessExpr::Call(n, args) => {
            ProcessExpr::Call(n.clone(), args.iter().map(|a| substitute_expr(a, s)).collect())
        }
    }
}
