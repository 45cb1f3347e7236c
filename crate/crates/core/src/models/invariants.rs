//! Structural invariants of the ceremony scenarios, checked edge by edge over
//! the whole reachable graph.

use std::fmt;

use super::{Mode, ScenarioId};
use crate::kernel::{EventLabel, GlobalState, Model, Scalar, Sym, Value};
use crate::statespace::{sweep, DeadlockReport, ExploreError, StateId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Invariant {
    /// The intruder's server never presents `S.Pk.SignCA`, and no session
    /// that received it ends with the intruder.
    IntruderImpossibility,
    /// Per-session flags are cleared on `ui.Webpage`; `user_warned` is only
    /// raised by `ui.Warning`.
    SessionReset,
    /// Certificate and policy stores never lose elements.
    StoreMonotonicity,
    /// Private sessions leave the stores the browser must not persist untouched.
    PrivateWriteRules,
}

impl Invariant {
    pub const ALL: [Invariant; 4] = [
        Invariant::IntruderImpossibility,
        Invariant::SessionReset,
        Invariant::StoreMonotonicity,
        Invariant::PrivateWriteRules,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Invariant::IntruderImpossibility => "intruder-impossibility",
            Invariant::SessionReset => "session-reset",
            Invariant::StoreMonotonicity => "store-monotonicity",
            Invariant::PrivateWriteRules => "private-write-rules",
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantViolation {
    pub invariant: Invariant,
    pub source: StateId,
    pub label: EventLabel,
    pub target: StateId,
    pub detail: String,
}

const STORES: [&str; 3] = ["dynamicHSTSList", "preloadedHSTSList", "ServerCert"];

/// Stores that no transition of the scenario may add to.
fn frozen_stores(id: ScenarioId) -> &'static [&'static str] {
    use super::Browser::*;
    match (id.browser(), id.mode()) {
        (Firefox, Mode::Private) => &["ServerCert", "dynamicHSTSList"],
        (Chrome, Mode::Private) | (Safari, Mode::Private) => &["dynamicHSTSList"],
        _ => &[],
    }
}

struct Checker<'a> {
    model: &'a Model,
    stores: Vec<(&'static str, std::ops::Range<usize>)>,
    frozen: Vec<(&'static str, std::ops::Range<usize>)>,
    cells: [Option<usize>; 3],
    webpage: EventLabel,
    warning: EventLabel,
    forged: EventLabel,
    /// The honest server's certificate as the browser records it.
    honest_cert: Value,
}

impl Checker<'_> {
    fn flag(&self, g: &GlobalState, i: usize) -> bool {
        matches!(self.cells[i].map(|c| g.cells[c]), Some(Scalar::Bool(true)))
    }

    fn edge(&self, s: &GlobalState, label: &EventLabel, d: &GlobalState, out: &mut Vec<(Invariant, String)>) {
        for (name, r) in &self.stores {
            if r.clone().any(|w| s.sets[w] & !d.sets[w] != 0) {
                out.push((Invariant::StoreMonotonicity, format!("{name} lost an element")));
            }
        }
        for (name, r) in &self.frozen {
            if r.clone().any(|w| s.sets[w] != d.sets[w]) {
                out.push((Invariant::PrivateWriteRules, format!("{name} written")));
            }
        }
        // cells: 0 user_warned, 1 finishTLS, 2 intruder_server
        if *label == self.webpage && (0..3).any(|i| self.flag(d, i)) {
            out.push((Invariant::SessionReset, "session flag survives ui.Webpage".into()));
        }
        if !self.flag(s, 2) && self.flag(d, 2) && self.model.global(d, "cert").as_ref() == Some(&self.honest_cert) {
            out.push((Invariant::IntruderImpossibility, "intruder completed with a CA-signed S certificate".into()));
        }
        let (was, now) = (self.flag(s, 0), self.flag(d, 0));
        if !was && now && *label != self.warning {
            out.push((Invariant::SessionReset, "user_warned raised without ui.Warning".into()));
        }
        if was && !now && *label != self.webpage {
            out.push((Invariant::SessionReset, "user_warned cleared outside ui.Webpage".into()));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantScan {
    pub states: usize,
    pub transitions: usize,
    pub violations: Vec<InvariantViolation>,
    /// Deadlock freedom comes for free from the same pass.
    pub deadlock: DeadlockReport,
}

/// Visits every reachable transition of the model once and checks it
/// against every invariant.
pub fn scan_invariants(id: ScenarioId, model: &Model, state_limit: usize) -> Result<InvariantScan, ExploreError> {
    let range = |n: &'static str| model.set_word_range(n).map(|r| (n, r));
    let cell = |n: &str| model.global_cell(n);
    let chk = Checker {
        model,
        stores: STORES.iter().filter_map(|n| range(n)).collect(),
        frozen: frozen_stores(id).iter().filter_map(|n| range(n)).collect(),
        cells: [cell("user_warned"), cell("finishTLS"), cell("intruder_server")],
        webpage: EventLabel::comm("ui", [Sym::Webpage]),
        warning: EventLabel::comm("ui", [Sym::Warning]),
        forged: EventLabel::comm("network", [Sym::HelloServer, Sym::S, Sym::Pk, Sym::SignCa]),
        honest_cert: Value::tuple([Sym::S, Sym::Pk, Sym::SignCa]),
    };
    let mut violations = Vec::new();
    let mut found = Vec::new();
    let summary = sweep(model, state_limit, |e| {
        chk.edge(&e.from.globals, e.label, &e.to.globals, &mut found);
        if *e.label == chk.forged {
            let intruder = e.from.components().first().map(|t| chk.model.active_processes(t));
            if intruder.is_some_and(|p| p.contains("ServerI") && !p.contains("ServerH")) {
                found.push((Invariant::IntruderImpossibility, "ServerI sent a CA-signed S certificate".into()));
            }
        }
        for (invariant, detail) in found.drain(..) {
            violations.push(InvariantViolation {
                invariant,
                source: e.source,
                label: e.label.clone(),
                target: e.target,
                detail,
            });
        }
    })?;
    Ok(InvariantScan {
        states: summary.states,
        transitions: summary.transitions,
        violations,
        deadlock: summary.deadlock,
    })
}
