//! Text, JSON and Markdown renderings of run and matrix reports.

use std::fmt::Write as _;

use serde_json::{json, Value as Json};

use super::{CellResult, DeadlockResult, DeadlockRow, MatrixReport, RunReport};
use crate::models::{Expected, PropertyId, ScenarioId};

pub fn report_json(r: &RunReport) -> Json {
    json!({
        "scenario": r.scenario.as_str(),
        "property": r.property.as_str(),
        "options": { "assume_no_expiry": r.assume_no_expiry },
        "verdict": r.verdict.as_str(),
        "expected": r.expected.as_str(),
        "match": r.status.as_str(),
        "states": r.states,
        "product_states": r.product_states,
        "wall_ms": r.wall_ms as u64,
        "counterexample": r.counterexample.as_ref().map(|c| json!({
            "events": c.events(),
            "sessions": c.sessions(),
        })),
    })
}

fn failed_json(scenario: ScenarioId, property: PropertyId, no_expiry: bool, error: &str) -> Json {
    json!({
        "scenario": scenario.as_str(),
        "property": property.as_str(),
        "options": { "assume_no_expiry": no_expiry },
        "verdict": "error",
        "expected": crate::models::expected(scenario, property).as_str(),
        "match": "error",
        "states": null,
        "product_states": null,
        "wall_ms": null,
        "counterexample": null,
        "error": error,
    })
}

fn deadlock_json(d: &DeadlockResult) -> Json {
    match d {
        DeadlockResult::Done(r) => json!({
            "scenario": r.scenario.as_str(),
            "options": { "assume_no_expiry": r.assume_no_expiry },
            "deadlock_free": r.deadlock_free,
            "witness": r.witness.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "states": r.states,
            "wall_ms": r.wall_ms as u64,
        }),
        DeadlockResult::Failed { scenario, assume_no_expiry, error, .. } => json!({
            "scenario": scenario.as_str(),
            "options": { "assume_no_expiry": assume_no_expiry },
            "deadlock_free": null,
            "witness": [],
            "states": null,
            "wall_ms": null,
            "error": error,
        }),
    }
}

pub fn matrix_json(m: &MatrixReport) -> Json {
    let s = m.summary();
    json!({
        "cells": m.cells.iter().map(|c| match c {
            CellResult::Done(r) => report_json(r),
            CellResult::Failed { scenario, property, assume_no_expiry, error, .. } =>
                failed_json(*scenario, *property, *assume_no_expiry, error),
        }).collect::<Vec<_>>(),
        "deadlock": m.deadlocks.iter().map(deadlock_json).collect::<Vec<_>>(),
        "summary": {
            "cells": s.cells,
            "matches": s.matches,
            "mismatches": s.mismatches,
            "off_fixture": s.off_fixture,
            "errors": s.errors,
            "deadlock_free": s.deadlock_free,
            "deadlocked": s.deadlocked,
            "deadlock_errors": s.deadlock_errors,
        },
    })
}

fn cell_line(r: &RunReport) -> String {
    let mut line = format!(
        "{:<20} {:<19} {:<9} expected {:<9} {:<13} states={} product={} {} ms",
        r.scenario.as_str(),
        r.property.as_str(),
        r.verdict.as_str(),
        r.expected.as_str(),
        r.status.as_str(),
        r.states,
        r.product_states,
        r.wall_ms
    );
    if r.assume_no_expiry {
        line.push_str(" [no expiry]");
    }
    if r.over_budget {
        line.push_str(" [over budget]");
    }
    line
}

fn deadlock_line(d: &DeadlockRow) -> String {
    let mut line = format!(
        "{:<20} deadlock            {:<9} states={} {} ms",
        d.scenario.as_str(),
        if d.deadlock_free { "free" } else { "found" },
        d.states,
        d.wall_ms
    );
    if d.assume_no_expiry {
        line.push_str(" [no expiry]");
    }
    if !d.deadlock_free {
        let w: Vec<String> = d.witness.iter().map(|e| e.to_string()).collect();
        write!(line, "\n    witness: {}", w.join(" ")).unwrap();
    }
    line
}

/// Summary line plus counterexample rendering (`trace`: narrative, raw or none).
pub fn report_text(r: &RunReport, deadlock: Option<&DeadlockRow>, trace: &str) -> String {
    let mut out = cell_line(r);
    out.push('\n');
    if let Some(d) = deadlock {
        out.push_str(&deadlock_line(d));
        out.push('\n');
    }
    if let Some(c) = &r.counterexample {
        match trace {
            "raw" => {
                for (i, p) in c.prefix.iter().chain(&c.lasso).enumerate() {
                    if i == c.prefix.len() && !c.lasso.is_empty() {
                        out.push_str("-- loop --\n");
                    }
                    let ev = p.event.as_ref().map(|e| e.to_string()).unwrap_or_else(|| "-".into());
                    writeln!(out, "{i:>4} {ev} -> state {}", p.state).unwrap();
                }
            }
            "none" => {}
            _ => out.push_str(&c.narrative),
        }
    }
    out
}

fn mark(v: &str) -> &'static str {
    match v {
        "holds" => "✓",
        "violated" => "×",
        "not-applicable" => "–",
        _ => "?",
    }
}

pub fn report_markdown(r: &RunReport, deadlock: Option<&DeadlockRow>) -> String {
    let mut out = String::from("| scenario | property | verdict | expected | match | states | product states | ms |\n");
    out.push_str("|---|---|---|---|---|---|---|---|\n");
    writeln!(
        out,
        "| {} | {} | {} | {} | {} | {} | {} | {} |",
        r.scenario.as_str(),
        r.property.as_str(),
        r.verdict.as_str(),
        r.expected.as_str(),
        r.status.as_str(),
        r.states,
        r.product_states,
        r.wall_ms
    )
    .unwrap();
    if let Some(d) = deadlock {
        writeln!(out, "\nDeadlock free: {}", d.deadlock_free).unwrap();
    }
    if let Some(c) = &r.counterexample {
        out.push_str("\n```\n");
        out.push_str(&c.narrative);
        out.push_str("```\n");
    }
    out
}

pub fn matrix_text(m: &MatrixReport) -> String {
    let mut out = String::new();
    for c in &m.cells {
        match c {
            CellResult::Done(r) => writeln!(out, "{}", cell_line(r)).unwrap(),
            CellResult::Failed { scenario, property, error, .. } => {
                writeln!(out, "{:<20} {:<19} error: {error}", scenario.as_str(), property.as_str()).unwrap()
            }
        }
    }
    for d in &m.deadlocks {
        match d {
            DeadlockResult::Done(r) => writeln!(out, "{}", deadlock_line(r)).unwrap(),
            DeadlockResult::Failed { scenario, error, .. } => {
                writeln!(out, "{:<20} deadlock            error: {error}", scenario.as_str()).unwrap()
            }
        }
    }
    let s = m.summary();
    writeln!(
        out,
        "{} cells: {} match, {} mismatch, {} off-fixture, {} error; deadlock: {} free, {} found, {} error",
        s.cells, s.matches, s.mismatches, s.off_fixture, s.errors, s.deadlock_free, s.deadlocked, s.deadlock_errors
    )
    .unwrap();
    out
}

/// The verdict table in the layout of the fixture: one row per scenario.
pub fn matrix_markdown(m: &MatrixReport) -> String {
    let mut out = String::from("| scenario | P1 | P2 | P3 | P4 | P5 | deadlock-free |\n|---|---|---|---|---|---|---|\n");
    for id in ScenarioId::ALL {
        let ran = m.cells.iter().any(|c| match c {
            CellResult::Done(r) => r.scenario == id,
            CellResult::Failed { scenario, .. } => *scenario == id,
        }) || m.deadlocks.iter().any(|d| match d {
            DeadlockResult::Done(r) => r.scenario == id,
            DeadlockResult::Failed { scenario, .. } => *scenario == id,
        });
        if !ran {
            continue;
        }
        let mut row = format!("| {} ", id.short());
        for p in PropertyId::ALL {
            let cell = m.cells.iter().find_map(|c| match c {
                CellResult::Done(r) if r.scenario == id && r.property == p => {
                    let flag = if r.status.as_str() == "mismatch" { " (!)" } else { "" };
                    Some(format!("{}{flag}", mark(r.verdict.as_str())))
                }
                CellResult::Failed { scenario, property, .. } if *scenario == id && *property == p => {
                    Some("?".to_string())
                }
                _ => None,
            });
            let cell = cell.unwrap_or_else(|| {
                if crate::models::expected(id, p) == Expected::NotApplicable { "–".into() } else { " ".into() }
            });
            write!(row, "| {cell} ").unwrap();
        }
        let dl = m.deadlocks.iter().find_map(|d| match d {
            DeadlockResult::Done(r) if r.scenario == id => Some(if r.deadlock_free { "yes" } else { "no" }),
            DeadlockResult::Failed { scenario, .. } if *scenario == id => Some("?"),
            _ => None,
        });
        writeln!(row, "| {} |", dl.unwrap_or(" ")).unwrap();
        out.push_str(&row);
    }
    out
}
