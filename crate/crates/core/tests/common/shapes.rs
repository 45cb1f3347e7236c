//! Structural checks on the three published counterexample stories.

use ceremony_checker::harness::{replay, session_marker, Step};
use ceremony_checker::kernel::{parse_expr, Value};
use ceremony_checker::ltl::{check, property, Outcome, Position};
use ceremony_checker::models::{build_scenario, Browser, Mode, PropertyId, ScenarioId, ScenarioOptions};
use ceremony_checker::statespace::Explorer;

use super::safety::shortest_bad_prefix;

pub struct Found {
    pub steps: Vec<Step>,
    pub prefix: Vec<Position>,
    pub shortest: Option<usize>,
    /// `CertificateIsValid` at the last position.
    pub valid_at_end: bool,
}

pub fn counterexample(browser: Browser, mode: Mode, p: PropertyId) -> Result<Found, String> {
    let id = ScenarioId::new(browser, mode).unwrap();
    let s = build_scenario(id, &ScenarioOptions::default()).map_err(|e| e.to_string())?;
    let mut ex = Explorer::new(&s.model, 5_000_000).map_err(|e| e.to_string())?;
    let f = property(p);
    let v = check(&mut ex, &f).map_err(|e| e.to_string())?;
    let Outcome::Violated { prefix, lasso } = v.outcome else { return Err(format!("{id} {p} holds")) };
    if !lasso.is_empty() {
        return Err("safety counterexample is not a bad prefix".into());
    }
    let steps = replay(&ex, &prefix, &lasso).map_err(|e| e.to_string())?;
    let last = ex.config(prefix.last().unwrap().state);
    let valid = s.model.eval_expr(&last.globals, &parse_expr("CertificateIsValid").unwrap()).unwrap();
    let mut fresh = Explorer::new(&s.model, 5_000_000).map_err(|e| e.to_string())?;
    Ok(Found { steps, shortest: shortest_bad_prefix(&mut fresh, &f), prefix, valid_at_end: valid == Value::Bool(true) })
}

/// Steps grouped by session; index 0 holds steps before the first session.
pub fn by_session(steps: &[Step]) -> Vec<Vec<&Step>> {
    let marker = session_marker();
    let mut out = vec![Vec::new()];
    for s in steps {
        if !s.stutter && s.event == marker {
            out.push(Vec::new());
        }
        out.last_mut().unwrap().push(s);
    }
    out
}

fn has_event(steps: &[&Step], text: &str) -> bool {
    steps.iter().any(|s| s.event.to_string() == text)
}

fn has_delta(steps: &[&Step], text: &str) -> bool {
    steps.iter().any(|s| s.deltas.iter().any(|d| d == text))
}

fn ensure(ok: bool, what: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn minimal(c: &Found) -> Result<(), String> {
    ensure(Some(c.prefix.len()) == c.shortest, &format!("prefix {} vs shortest {:?}", c.prefix.len(), c.shortest))
}

/// Firefox classic, warning users: store in session 1, silent invalid completion in session 2.
pub fn firefox_store_then_silent_completion() -> Result<(), String> {
    let c = counterexample(Browser::Firefox, Mode::Classic, PropertyId::WarningUsers)?;
    let sessions = by_session(&c.steps);
    ensure(sessions.len() == 3, &format!("{} sessions", sessions.len() - 1))?;
    ensure(has_event(&sessions[1], "ui.StoreCertificate"), "no StoreCertificate in session 1")?;
    ensure(!has_event(&sessions[2], "ui.Warning") && !has_event(&sessions[2], "DisplayWarning"), "warning in session 2")?;
    ensure(has_delta(&sessions[2], "finishTLS := true"), "session 2 does not complete")?;
    ensure(!c.valid_at_end, "certificate valid at the end")?;
    minimal(&c)
}

/// Safari classic, HSTS user security: stored certificate, then honest HSTS
/// header, then an intruder completion.
pub fn safari_store_header_intruder() -> Result<(), String> {
    let c = counterexample(Browser::Safari, Mode::Classic, PropertyId::HstsUserSecurity)?;
    let sessions = by_session(&c.steps);
    let first = |pred: &dyn Fn(&Step) -> bool| sessions.iter().position(|ss| ss.iter().any(|s| pred(s)));
    let stored = first(&|s| s.event.to_string() == "ui.StoreCertificate").ok_or("no certificate stored")?;
    let header = first(&|s| {
        s.event.to_string() == "network.ServerFinished.HSTS.Data" && s.roles.contains(&"Honest Server")
    })
    .ok_or("no HSTS header from the honest server")?;
    let intruder = sessions
        .iter()
        .enumerate()
        .skip(header + 1)
        .find(|(_, ss)| has_delta(ss, "intruder_server := true") && has_delta(ss, "finishTLS := true"))
        .map(|(i, _)| i)
        .ok_or("no intruder completion after the header")?;
    ensure(stored < header && header < intruder, &format!("order {stored} {header} {intruder}"))?;
    minimal(&c)
}

/// Opera Mini, warning users: the user is never warned at all.
pub fn opera_never_warns() -> Result<(), String> {
    let c = counterexample(Browser::OperaMini, Mode::Classic, PropertyId::WarningUsers)?;
    let all: Vec<&Step> = c.steps.iter().collect();
    ensure(!has_event(&all, "DisplayWarning"), "DisplayWarning present")?;
    ensure(!c.valid_at_end, "certificate valid at the end")?;
    minimal(&c)
}
