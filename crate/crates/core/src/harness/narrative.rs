//! Replays counterexamples and renders them session by session.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::kernel::{Config, EventLabel, Model, Snapshot, Sym, Term, Value};
use crate::ltl::Position;
use crate::statespace::Explorer;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("trace does not replay at position {index}: {reason}")]
pub struct NonReplayableTrace {
    pub index: usize,
    pub reason: String,
}

/// One replayed step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub event: EventLabel,
    pub roles: Vec<&'static str>,
    pub deltas: Vec<String>,
    /// First step of the repeating part of a lasso.
    pub loop_start: bool,
    pub stutter: bool,
}

pub fn session_marker() -> EventLabel {
    EventLabel::comm("ui", [Sym::Webpage])
}

/// Which server process a component-0 term is running, if it is unambiguous.
fn server_of(model: &Model, t: &Term) -> Option<&'static str> {
    let p = model.active_processes(t);
    match (p.contains("ServerI"), p.contains("ServerH")) {
        (true, false) => Some("Intruder"),
        (false, true) => Some("Honest Server"),
        _ => None,
    }
}

/// Roles whose components changed. `server` remembers who plays the server
/// side of the current session, since both server processes share code.
fn roles(model: &Model, before: &Config, after: &Config, event: &EventLabel, server: &mut &'static str) -> Vec<&'static str> {
    let names = |i: usize, server: &'static str| match i {
        0 => server,
        1 => "User",
        _ => "Browser",
    };
    match (&before.term, &after.term) {
        (Term::Par(a), Term::Par(b)) if a.len() == b.len() && a.len() == 3 => {
            if a[0] != b[0] {
                if let Some(r) = server_of(model, &a[0]).or_else(|| server_of(model, &b[0])) {
                    *server = r;
                }
            }
            let out: Vec<&'static str> = (0..3).filter(|&i| a[i] != b[i]).map(|i| names(i, server)).collect();
            if out.is_empty() {
                vec!["System"]
            } else {
                out
            }
        }
        // The step that starts the three components.
        (_, Term::Par(b)) if b.len() == 3 => {
            if let Some(r) = server_of(model, &b[0]) {
                *server = r;
                vec![r]
            } else if matches!(event, EventLabel::Comm { channel, .. } if &**channel == "ui") {
                vec!["User", "Browser"]
            } else {
                vec!["System"]
            }
        }
        _ => vec!["System"],
    }
}

fn render_value(v: &Value) -> String {
    v.to_string()
}

fn deltas(before: &Snapshot, after: &Snapshot) -> Vec<String> {
    let mut out = Vec::new();
    for (name, v) in &after.vars {
        if before.vars.get(name) != Some(v) {
            out.push(format!("{name} := {}", render_value(v)));
        }
    }
    let empty = Default::default();
    for (name, set) in &after.sets {
        let old = before.sets.get(name).unwrap_or(&empty);
        for v in set.difference(old) {
            out.push(format!("{name} += {}", render_value(v)));
        }
        for v in old.difference(set) {
            out.push(format!("{name} -= {}", render_value(v)));
        }
    }
    out
}

/// Checks every step of `prefix · lasso` against the kernel's successor
/// relation and annotates it. The closing step of a lasso is checked too.
pub fn replay(ex: &Explorer<'_>, prefix: &[Position], lasso: &[Position]) -> Result<Vec<Step>, NonReplayableTrace> {
    let model = ex.model();
    let all: Vec<&Position> = prefix.iter().chain(lasso).collect();
    let Some(first) = all.first() else {
        return Ok(Vec::new());
    };
    if first.state != 0 || first.event.is_some() {
        return Err(NonReplayableTrace { index: 0, reason: "trace must start at the initial state".into() });
    }
    let mut steps = Vec::new();
    let mut server = "Intruder";
    let mut pairs: Vec<(usize, &Position, &Position)> =
        all.windows(2).enumerate().map(|(i, w)| (i + 1, w[0], w[1])).collect();
    if let (Some(last), Some(head)) = (all.last(), lasso.first()) {
        pairs.push((all.len(), last, head));
    }
    for (index, from, to) in pairs {
        let before = ex.config(from.state);
        let after = ex.config(to.state);
        let succ = model
            .successors(&before)
            .map_err(|e| NonReplayableTrace { index, reason: e.to_string() })?;
        let stutter = to.event.is_none();
        let ok = match &to.event {
            None => succ.is_empty() && from.state == to.state,
            Some(e) => succ.iter().any(|(l, c)| l == e && *c == after),
        };
        if !ok {
            return Err(NonReplayableTrace { index, reason: format!("no move {:?} to state {}", to.event, to.state) });
        }
        if index == all.len() {
            break;
        }
        let event = to.event.clone().unwrap_or(EventLabel::Tau);
        steps.push(Step {
            roles: if stutter { vec!["System"] } else { roles(model, &before, &after, &event, &mut server) },
            event,
            deltas: deltas(&model.snapshot(&before.globals), &model.snapshot(&after.globals)),
            loop_start: !lasso.is_empty() && index == prefix.len(),
            stutter,
        });
    }
    Ok(steps)
}

/// Number of sessions opened in the trace.
pub fn session_count(steps: &[Step]) -> usize {
    let marker = session_marker();
    steps.iter().filter(|s| !s.stutter && s.event == marker).count()
}

/// Renders replayed steps as numbered sessions. Steps before the first
/// `ui.Webpage` are listed under "Setup"; silent `tau` steps are left out.
pub fn render_narrative(title: &str, steps: &[Step]) -> String {
    let marker = session_marker();
    let mut out = String::new();
    writeln!(out, "{title}").unwrap();
    writeln!(out, "{} step(s), {} session(s)", steps.len(), session_count(steps)).unwrap();
    let mut session = 0;
    let mut opened = false;
    for s in steps {
        if !s.stutter && s.event == marker {
            session += 1;
            writeln!(out, "Session {session}").unwrap();
            opened = true;
        } else if !opened {
            writeln!(out, "Setup").unwrap();
            opened = true;
        }
        if s.loop_start {
            writeln!(out, "  -- repeats forever from here --").unwrap();
        }
        if s.event == EventLabel::Tau && s.deltas.is_empty() && !s.stutter {
            continue;
        }
        let event = if s.stutter { "(no further moves)".to_string() } else { s.event.to_string() };
        let mut line = format!("  {:<22} {}", s.roles.join(" & "), event);
        if !s.deltas.is_empty() {
            write!(line, "   [{}]", s.deltas.join(", ")).unwrap();
        }
        writeln!(out, "{}", line.trim_end()).unwrap();
    }
    out
}

/// Groups event texts by session, for structural checks.
pub fn sessions(steps: &[Step]) -> BTreeMap<usize, Vec<String>> {
    let marker = session_marker();
    let mut out: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    let mut session = 0;
    for s in steps {
        if !s.stutter && s.event == marker {
            session += 1;
        }
        out.entry(session).or_default().push(s.event.to_string());
    }
    out
}
