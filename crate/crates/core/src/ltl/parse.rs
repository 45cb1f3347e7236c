//! Text syntax: `G X F U ! && || ->`, parentheses, `true`, `false`, bare
//! macro names and `@event` atoms such as `@ui.Data` or `@Finish_TLS`.
//!
//! Precedence, loosest first: `->` (right), `||`, `&&`, `U` (right), unary.

use std::sync::Arc;

use super::formula::Ltl;
use crate::kernel::{EventLabel, Sym, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("formula syntax error at byte {pos}: {message}")]
pub struct FormulaError {
    pub pos: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Event(String),
    Op(&'static str),
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let b = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    let word = |c: u8| c.is_ascii_alphanumeric() || c == b'_';
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'@' {
            let start = i + 1;
            i += 1;
            while i < b.len() && (word(b[i]) || b[i] == b'.') {
                i += 1;
            }
            if i == start {
                return Err(FormulaError { pos: start, message: "empty event atom".into() });
            }
            out.push((Tok::Event(src[start..i].to_string()), start - 1));
        } else if word(c) {
            let start = i;
            while i < b.len() && word(b[i]) {
                i += 1;
            }
            out.push((Tok::Word(src[start..i].to_string()), start));
        } else {
            let op = ["->", "&&", "||", "!", "(", ")"]
                .into_iter()
                .find(|op| src[i..].starts_with(op))
                .ok_or(FormulaError { pos: i, message: format!("unexpected {:?}", c as char) })?;
            out.push((Tok::Op(op), i));
            i += op.len();
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

/// Interprets `chan.v1.v2` as a channel event and a dot-free name as a named activity.
pub fn event_label(text: &str) -> Option<EventLabel> {
    if text == "tau" {
        return Some(EventLabel::Tau);
    }
    let mut parts = text.split('.');
    let head = parts.next()?;
    let rest: Vec<&str> = parts.collect();
    if rest.is_empty() {
        return Some(EventLabel::named(head));
    }
    let values = rest
        .iter()
        .map(|p| match *p {
            "true" => Some(Value::Bool(true)),
            "false" => Some(Value::Bool(false)),
            s => Sym::from_name(s).map(Value::Sym),
        })
        .collect::<Option<Vec<_>>>()?;
    Some(EventLabel::Comm { channel: Arc::from(head), values })
}

struct P {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl P {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn err<T>(&self, message: &str) -> Result<T, FormulaError> {
        Err(FormulaError { pos: self.toks[self.pos].1, message: message.to_string() })
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if matches!(self.peek(), Tok::Op(o) if *o == op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if matches!(self.peek(), Tok::Word(x) if x == w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn implies(&mut self) -> Result<Ltl, FormulaError> {
        let a = self.or()?;
        if self.eat_op("->") {
            Ok(Ltl::implies(a, self.implies()?))
        } else {
            Ok(a)
        }
    }

    fn or(&mut self) -> Result<Ltl, FormulaError> {
        let mut a = self.and()?;
        while self.eat_op("||") {
            a = Ltl::or(a, self.and()?);
        }
        Ok(a)
    }

    fn and(&mut self) -> Result<Ltl, FormulaError> {
        let mut a = self.until()?;
        while self.eat_op("&&") {
            a = Ltl::and(a, self.until()?);
        }
        Ok(a)
    }

    fn until(&mut self) -> Result<Ltl, FormulaError> {
        let a = self.unary()?;
        if self.eat_word("U") {
            Ok(Ltl::u(a, self.until()?))
        } else {
            Ok(a)
        }
    }

    fn unary(&mut self) -> Result<Ltl, FormulaError> {
        if self.eat_op("!") {
            return Ok(Ltl::not(self.unary()?));
        }
        if self.eat_op("(") {
            let f = self.implies()?;
            if !self.eat_op(")") {
                return self.err("expected `)`");
            }
            return Ok(f);
        }
        let tok = self.peek().clone();
        self.pos += 1;
        match tok {
            Tok::Word(w) => Ok(match w.as_str() {
                "G" => Ltl::g(self.unary()?),
                "X" => Ltl::x(self.unary()?),
                "F" => Ltl::f(self.unary()?),
                "true" => Ltl::True,
                "false" => Ltl::False,
                "U" => {
                    self.pos -= 1;
                    return self.err("`U` needs a left operand");
                }
                _ => Ltl::state(&w),
            }),
            Tok::Event(e) => match event_label(&e) {
                Some(l) => Ok(Ltl::event(l)),
                None => {
                    self.pos -= 1;
                    self.err("event values must be alphabet constants")
                }
            },
            _ => {
                self.pos -= 1;
                self.err("expected a formula")
            }
        }
    }
}

pub fn parse_formula(src: &str) -> Result<Ltl, FormulaError> {
    let mut p = P { toks: lex(src)?, pos: 0 };
    let f = p.implies()?;
    if *p.peek() != Tok::End {
        return p.err("trailing input");
    }
    Ok(f)
}
