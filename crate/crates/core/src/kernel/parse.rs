//! Parser for the CSP#-style model text used by the ceremony library.
//!
//! Supported: `channel`, `var` (scalars, arrays, `var<Set>`), `#define`,
//! process definitions, prefixing with attached statement blocks, channel
//! input/output, `[]`, indexed `[]x:{..}@`, `if`/`ifa`, `case`, `;`, `|||`
//! and calls. `enum`, `#import` and `#assert` lines are accepted and ignored
//! (constants are the fixed [`Sym`] alphabet).

use super::ast::*;
use super::error::ParseError;
use super::value::{Scalar, Sym, Value};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(usize),
    Sym(&'static str),
    Eof,
}

struct Lexer;

const PUNCT: &[&str] = &[
    "|||", "->", "[]", "||", "|=", "&&", "==", "!=", "..", "=", "!", "?", ".", ";", ":", ",", "{", "}",
    "(", ")", "[", "]", "@", "<", ">", "#",
];

impl Lexer {
    fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut out = Vec::new();
        let bytes = src.as_bytes();
        let mut i = 0;
        let mut line = 1;
        'outer: while i < bytes.len() {
            let c = bytes[i];
            if c == b'\n' {
                line += 1;
                i += 1;
                continue;
            }
            if c.is_ascii_whitespace() {
                i += 1;
                continue;
            }
            if src[i..].starts_with("//") {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            if c == b'"' {
                // Only `#import` paths use strings, and those lines are ignored.
                i += 1;
                while i < bytes.len() && bytes[i] != b'"' {
                    i += 1;
                }
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == b'_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), line));
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Num(src[start..i].parse().unwrap()), line));
                continue;
            }
            for p in PUNCT {
                if src[i..].starts_with(p) {
                    out.push((Tok::Sym(p), line));
                    i += p.len();
                    continue 'outer;
                }
            }
            return Err(ParseError { line, message: format!("unexpected character {:?}", c as char) });
        }
        out.push((Tok::Eof, line));
        Ok(out)
    }
}

/// Parses model text into a [`ModelDef`]. The entry process is left empty;
/// set `entry` (and set universes) before compiling.
pub fn parse_model(src: &str) -> Result<ModelDef, ParseError> {
    let mut p = Parser { toks: Lexer::lex(src)?, pos: 0 };
    let mut def = ModelDef::default();
    p.model(&mut def)?;
    Ok(def)
}

/// Parses a single process expression.
pub fn parse_process(src: &str) -> Result<ProcessExpr, ParseError> {
    let mut p = Parser { toks: Lexer::lex(src)?, pos: 0 };
    let e = p.process()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parses a single boolean/value expression.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: Lexer::lex(src)?, pos: 0 };
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn literal(name: &str) -> Option<Value> {
    match name {
        "true" => Some(Value::Bool(true)),
        "false" => Some(Value::Bool(false)),
        _ => Sym::from_name(name).map(Value::Sym),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn line(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { line: self.line(), message: format!("{} (at {:?})", msg.into(), self.peek()) })
    }

    fn is(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => self.err("trailing input"),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.bump() {
            Tok::Ident(s) => Ok(s),
            _ => {
                self.pos -= 1;
                self.err("expected identifier")
            }
        }
    }

    fn num(&mut self) -> Result<usize, ParseError> {
        match self.bump() {
            Tok::Num(n) => Ok(n),
            _ => {
                self.pos -= 1;
                self.err("expected number")
            }
        }
    }

    fn skip_to_semicolon(&mut self) {
        while !self.is(";") && *self.peek() != Tok::Eof {
            self.bump();
        }
        self.eat(";");
    }

    fn model(&mut self, def: &mut ModelDef) -> Result<(), ParseError> {
        loop {
            match self.peek().clone() {
                Tok::Eof => return Ok(()),
                Tok::Sym("#") => {
                    self.bump();
                    let kw = self.ident()?;
                    match kw.as_str() {
                        "define" => {
                            let name = self.ident()?;
                            let body = self.expr()?;
                            self.expect(";")?;
                            def.macros.push((name, body));
                        }
                        "import" | "assert" => self.skip_to_semicolon(),
                        _ => return self.err(format!("unknown directive #{kw}")),
                    }
                }
                Tok::Ident(kw) if kw == "enum" => {
                    self.bump();
                    self.expect("{")?;
                    loop {
                        let n = self.ident()?;
                        if Sym::from_name(&n).is_none() {
                            return self.err(format!("constant {n} outside the symbol alphabet"));
                        }
                        if !self.eat(",") {
                            break;
                        }
                    }
                    self.expect("}")?;
                    self.expect(";")?;
                }
                Tok::Ident(kw) if kw == "channel" => {
                    self.bump();
                    let name = self.ident()?;
                    let cap = self.num()?;
                    if cap != 0 {
                        return self.err("only synchronous (size 0) channels are supported");
                    }
                    self.expect(";")?;
                    def.channels.push(name);
                }
                Tok::Ident(kw) if kw == "var" => {
                    self.bump();
                    self.var_decl(def)?;
                }
                Tok::Ident(_) => {
                    let pd = self.process_def()?;
                    def.processes.push(pd);
                }
                _ => return self.err("expected declaration"),
            }
        }
    }

    fn var_decl(&mut self, def: &mut ModelDef) -> Result<(), ParseError> {
        if self.eat("<") {
            let kind = self.ident()?;
            if kind != "Set" && kind != "SetArray" {
                return self.err(format!("unsupported var type {kind}"));
            }
            self.expect(">")?;
            let name = self.ident()?;
            self.expect(";")?;
            def.sets.push(SetDecl { name, universe: Vec::new() });
            return Ok(());
        }
        let name = self.ident()?;
        if self.eat("[") {
            let len = self.num()?;
            self.expect("]")?;
            self.expect(";")?;
            // Uninitialised cells hold the first enumeration constant (PAT's 0).
            def.arrays.push(ArrayDecl { name, len, init: Scalar::Sym(Sym::HelloClient) });
            return Ok(());
        }
        if self.eat(":") {
            // Range annotation `{A..B}`, informational only.
            self.expect("{")?;
            while !self.eat("}") {
                self.bump();
            }
        }
        let init = if self.eat("=") {
            let n = self.ident()?;
            match literal(&n).and_then(|v| v.as_scalar()) {
                Some(s) => s,
                None => return self.err(format!("bad initial value {n}")),
            }
        } else {
            Scalar::Sym(Sym::HelloClient)
        };
        self.expect(";")?;
        def.vars.push(VarDecl { name, init });
        Ok(())
    }

    fn process_def(&mut self) -> Result<ProcessDef, ParseError> {
        let name = self.ident()?;
        let mut params = Vec::new();
        if self.eat("(") {
            if !self.is(")") {
                loop {
                    params.push(self.ident()?);
                    if !self.eat(",") {
                        break;
                    }
                }
            }
            self.expect(")")?;
        }
        self.expect("=")?;
        let body = self.process()?;
        self.eat(";");
        Ok(ProcessDef { name, params, body })
    }

    /// True when the tokens at the cursor begin a new top-level item rather
    /// than continuing a sequential composition.
    fn at_item_start(&self) -> bool {
        match self.peek() {
            Tok::Eof | Tok::Sym("#") | Tok::Sym("}") | Tok::Sym(")") => true,
            Tok::Ident(k) if k == "var" || k == "channel" || k == "enum" || k == "default" => true,
            Tok::Ident(_) => {
                let mut k = 1;
                if matches!(self.peek_at(1), Tok::Sym("(")) {
                    let mut depth = 0;
                    loop {
                        match self.peek_at(k) {
                            Tok::Sym("(") => depth += 1,
                            Tok::Sym(")") => {
                                depth -= 1;
                                if depth == 0 {
                                    k += 1;
                                    break;
                                }
                            }
                            Tok::Eof => return true,
                            _ => {}
                        }
                        k += 1;
                    }
                }
                matches!(self.peek_at(k), Tok::Sym("="))
            }
            _ => false,
        }
    }

    fn process(&mut self) -> Result<ProcessExpr, ParseError> {
        let mut left = self.interleave()?;
        while self.is(";") {
            self.bump();
            if self.at_item_start() {
                // The `;` terminated the definition.
                self.pos -= 1;
                break;
            }
            let right = self.interleave()?;
            left = ProcessExpr::Seq(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn interleave(&mut self) -> Result<ProcessExpr, ParseError> {
        let first = self.choice()?;
        if !self.is("|||") {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.eat("|||") {
            parts.push(self.choice()?);
        }
        Ok(ProcessExpr::Interleave(parts))
    }

    fn choice(&mut self) -> Result<ProcessExpr, ParseError> {
        let mut left = self.prefix()?;
        while self.is("[]") {
            self.bump();
            let right = self.prefix()?;
            left = ProcessExpr::Choice(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        if self.is("{") {
            self.bump();
            let s = self.stmts()?;
            self.expect("}")?;
            Ok(s)
        } else {
            Ok(Vec::new())
        }
    }

    fn prefix(&mut self) -> Result<ProcessExpr, ParseError> {
        match self.peek().clone() {
            Tok::Sym("[]") => {
                // Indexed choice: its body extends as far right as possible.
                self.bump();
                let binder = self.ident()?;
                self.expect(":")?;
                self.expect("{")?;
                let mut domain = Vec::new();
                loop {
                    let n = self.ident()?;
                    match literal(&n).and_then(|v| v.as_scalar()) {
                        Some(s) => domain.push(s),
                        None => return self.err(format!("domain element {n} is not a constant")),
                    }
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect("}")?;
                self.expect("@")?;
                let body = self.process()?;
                Ok(ProcessExpr::IndexedChoice { binder, domain, body: Box::new(body) })
            }
            Tok::Sym("{") => {
                let stmts = self.block()?;
                self.expect("->")?;
                let next = self.prefix()?;
                Ok(ProcessExpr::Event { label: None, stmts, next: Box::new(next) })
            }
            Tok::Sym("(") => {
                self.bump();
                let p = self.process()?;
                self.expect(")")?;
                Ok(p)
            }
            Tok::Ident(name) => match name.as_str() {
                "Skip" => {
                    self.bump();
                    Ok(ProcessExpr::Skip)
                }
                "Stop" => {
                    self.bump();
                    Ok(ProcessExpr::Stop)
                }
                "if" | "ifa" => self.conditional(),
                "case" => self.case(),
                _ => self.named_prefix(),
            },
            _ => self.err("expected process"),
        }
    }

    fn conditional(&mut self) -> Result<ProcessExpr, ParseError> {
        let atomic = self.ident()? == "ifa";
        self.expect("(")?;
        let guard = self.expr()?;
        self.expect(")")?;
        self.expect("{")?;
        let then = self.process()?;
        self.expect("}")?;
        let otherwise = if self.is_kw("else") {
            self.bump();
            if self.is_kw("if") || self.is_kw("ifa") {
                Some(Box::new(self.conditional()?))
            } else {
                self.expect("{")?;
                let o = self.process()?;
                self.expect("}")?;
                Some(Box::new(o))
            }
        } else {
            None
        };
        Ok(ProcessExpr::Conditional { guard, then: Box::new(then), otherwise, atomic })
    }

    fn case(&mut self) -> Result<ProcessExpr, ParseError> {
        self.bump();
        self.expect("{")?;
        let mut arms = Vec::new();
        loop {
            if self.is_kw("default") {
                self.bump();
                self.expect(":")?;
                let d = self.process()?;
                self.expect("}")?;
                return Ok(ProcessExpr::Case { arms, default: Box::new(d) });
            }
            let c = self.expr()?;
            self.expect(":")?;
            let p = self.process()?;
            arms.push((c, p));
        }
    }

    fn named_prefix(&mut self) -> Result<ProcessExpr, ParseError> {
        let name = self.ident()?;
        if self.is("(") {
            self.bump();
            let mut args = Vec::new();
            if !self.is(")") {
                loop {
                    args.push(self.expr()?);
                    if !self.eat(",") {
                        break;
                    }
                }
            }
            self.expect(")")?;
            return Ok(ProcessExpr::Call(name, args));
        }
        if self.eat("!") {
            let mut values = vec![self.field_expr()?];
            while self.eat(".") {
                values.push(self.field_expr()?);
            }
            let stmts = self.block()?;
            self.expect("->")?;
            let next = self.prefix()?;
            return Ok(ProcessExpr::Output { channel: name, values, stmts, next: Box::new(next) });
        }
        if self.eat("?") {
            let mut pattern = vec![self.pattern()?];
            while self.eat(".") {
                pattern.push(self.pattern()?);
            }
            let stmts = self.block()?;
            self.expect("->")?;
            let next = self.prefix()?;
            return Ok(ProcessExpr::Input { channel: name, pattern, stmts, next: Box::new(next) });
        }
        let stmts = self.block()?;
        if !self.is("->") {
            // Bare identifier: a parameterless process reference.
            if stmts.is_empty() {
                return Ok(ProcessExpr::Call(name, Vec::new()));
            }
            return self.err("expected `->` after event");
        }
        self.bump();
        let next = self.prefix()?;
        let label = if name == "tau" { None } else { Some(name) };
        Ok(ProcessExpr::Event { label, stmts, next: Box::new(next) })
    }

    fn field_expr(&mut self) -> Result<Expr, ParseError> {
        let n = self.ident()?;
        Ok(match literal(&n) {
            Some(v) => Expr::Const(v),
            None => {
                if self.eat("[") {
                    let i = self.num()?;
                    self.expect("]")?;
                    Expr::Index(n, i)
                } else {
                    Expr::Var(n)
                }
            }
        })
    }

    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        let n = self.ident()?;
        Ok(match literal(&n) {
            Some(v) => Pattern::Match(Expr::Const(v)),
            None => Pattern::Bind(n),
        })
    }

    fn stmts(&mut self) -> Result<Vec<Stmt>, ParseError> {
        let mut out = Vec::new();
        while !self.is("}") {
            if self.eat(";") {
                continue;
            }
            self.stmt(&mut out)?;
        }
        Ok(out)
    }

    fn stmt(&mut self, out: &mut Vec<Stmt>) -> Result<(), ParseError> {
        if self.is_kw("if") {
            self.bump();
            self.expect("(")?;
            let cond = self.expr()?;
            self.expect(")")?;
            self.expect("{")?;
            let then = self.stmts()?;
            self.expect("}")?;
            let otherwise = if self.is_kw("else") {
                self.bump();
                self.expect("{")?;
                let o = self.stmts()?;
                self.expect("}")?;
                o
            } else {
                Vec::new()
            };
            out.push(Stmt::If { cond, then, otherwise });
            return Ok(());
        }
        let name = self.ident()?;
        if self.eat(".") {
            let method = self.ident()?;
            if method != "Add" {
                return self.err(format!("unsupported set operation {method}"));
            }
            self.expect("(")?;
            let elem = self.expr()?;
            self.expect(")")?;
            out.push(Stmt::Add { set: name, elem });
            return Ok(());
        }
        // Possibly chained: `a[0]=b[0]=x` assigns right to left.
        let mut targets = vec![self.target_rest(name)?];
        self.expect("=")?;
        loop {
            // Look ahead for another `lvalue =`.
            let save = self.pos;
            if let Tok::Ident(n) = self.peek().clone() {
                self.bump();
                if let Ok(t) = self.target_rest(n) {
                    if self.eat("=") {
                        targets.push(t);
                        continue;
                    }
                }
            }
            self.pos = save;
            break;
        }
        let value = self.expr()?;
        let last = targets.pop().unwrap();
        let src = match &last {
            Target::Var(n) => Expr::Var(n.clone()),
            Target::Cell(n, i) => Expr::Index(n.clone(), *i),
        };
        out.push(Stmt::Assign { target: last, value });
        for t in targets.into_iter().rev() {
            out.push(Stmt::Assign { target: t, value: src.clone() });
        }
        Ok(())
    }

    fn target_rest(&mut self, name: String) -> Result<Target, ParseError> {
        if self.is("[") {
            self.bump();
            let i = self.num()?;
            self.expect("]")?;
            Ok(Target::Cell(name, i))
        } else {
            Ok(Target::Var(name))
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.and_expr()?;
        while self.eat("||") {
            let r = self.and_expr()?;
            left = Expr::Or(Box::new(left), Box::new(r));
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.cmp_expr()?;
        while self.eat("&&") {
            let r = self.cmp_expr()?;
            left = Expr::And(Box::new(left), Box::new(r));
        }
        Ok(left)
    }

    fn cmp_expr(&mut self) -> Result<Expr, ParseError> {
        let left = self.unary()?;
        if self.eat("==") {
            let r = self.unary()?;
            return Ok(Expr::Eq(Box::new(left), Box::new(r)));
        }
        if self.eat("!=") {
            let r = self.unary()?;
            return Ok(Expr::Ne(Box::new(left), Box::new(r)));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat("!") {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        let n = self.ident()?;
        if let Some(v) = literal(&n) {
            return Ok(Expr::Const(v));
        }
        if self.is(".") && matches!(self.peek_at(1), Tok::Ident(m) if m == "Contains") {
            self.bump();
            self.bump();
            self.expect("(")?;
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(Expr::Contains(n, Box::new(e)));
        }
        if self.eat("[") {
            let i = self.num()?;
            self.expect("]")?;
            return Ok(Expr::Index(n, i));
        }
        Ok(Expr::Var(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_prefix_with_block_and_choice() {
        let p = parse_process("ui!S{typed_url=S} -> User() [] ui!I{typed_url=I} -> User()").unwrap();
        match p {
            ProcessExpr::Choice(a, _) => match *a {
                ProcessExpr::Output { ref channel, ref values, ref stmts, .. } => {
                    assert_eq!(channel, "ui");
                    assert_eq!(values, &vec![Expr::Const(Value::Sym(Sym::S))]);
                    assert_eq!(stmts.len(), 1);
                }
                ref other => panic!("unexpected {other:?}"),
            },
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn chained_assignment_expands_right_to_left() {
        let p = parse_process("c?x{a[0]=b[0]=x} -> Skip").unwrap();
        let ProcessExpr::Input { stmts, pattern, .. } = p else { panic!() };
        assert_eq!(pattern, vec![Pattern::Bind("x".into())]);
        assert_eq!(
            stmts,
            vec![
                Stmt::Assign { target: Target::Cell("b".into(), 0), value: Expr::var("x") },
                Stmt::Assign { target: Target::Cell("a".into(), 0), value: Expr::index("b", 0) },
            ]
        );
    }

    #[test]
    fn indexed_choice_scopes_over_sequence() {
        let p = parse_process("[]h:{HSTS, No_HSTS}@ a -> Skip; b -> Skip").unwrap();
        let ProcessExpr::IndexedChoice { body, domain, .. } = p else { panic!() };
        assert_eq!(domain.len(), 2);
        assert!(matches!(*body, ProcessExpr::Seq(..)));
    }

    #[test]
    fn sequence_stops_at_next_definition() {
        let m = parse_model("P() = a -> Skip; P();\nQ = b -> Stop;").unwrap();
        assert_eq!(m.processes.len(), 2);
        assert!(matches!(m.processes[0].body, ProcessExpr::Seq(..)));
        assert_eq!(m.processes[1].name, "Q");
    }

    #[test]
    fn declarations() {
        let m = parse_model(
            "enum {S, I}; channel ui 0; var<Set> hs; var cert[3]; var t: {S..I}=S; var f=false;\n#define V cert[0]==t && !f;",
        )
        .unwrap();
        assert_eq!(m.channels, vec!["ui"]);
        assert_eq!(m.sets[0].name, "hs");
        assert_eq!(m.arrays[0].len, 3);
        assert_eq!(m.vars[0].init, Scalar::Sym(Sym::S));
        assert_eq!(m.vars[1].init, Scalar::Bool(false));
        assert_eq!(m.macros[0].0, "V");
    }

    #[test]
    fn rejects_buffered_channels_and_unknown_constants() {
        assert!(parse_model("channel c 1;").is_err());
        assert!(parse_model("enum {Foo};").is_err());
    }

    #[test]
    fn expression_precedence() {
        let e = parse_expr("a || b && !c == d").unwrap();
        assert_eq!(e.to_string(), "(a || (b && (!c==d)))");
    }
}
