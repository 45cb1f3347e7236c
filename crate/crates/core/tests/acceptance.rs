//! One PASS/FAIL line per acceptance criterion.
//!
//! Exits nonzero when a criterion fails for any reason other than running
//! into the state limit.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use ceremony_checker::harness::{self, matrix_json, store_heavy, CellResult, RunOptions, VerdictKind};
use ceremony_checker::ltl::property;
use ceremony_checker::models::{
    build_scenario, no_expiry_scenarios, scan_invariants, Browser, Mode, ScenarioId, ScenarioOptions,
    DEFAULT_STATE_LIMIT,
};
use ceremony_checker::statespace::{ExploreError, Explorer};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value as Json;

use common::lasso::{random_formula, random_graph, trial};
use common::safety::shortest_bad_prefix;
use common::{compare_with_naive, fixtures, shapes};

enum Verdict {
    Pass(String),
    Fail(String),
    /// Failed because an exploration ran into the state limit.
    OutOfReach(String),
}

struct Acceptance {
    unexpected: usize,
}

impl Acceptance {
    fn report(&mut self, n: u8, v: Verdict) {
        match v {
            Verdict::Pass(m) => println!("criterion {n}: PASS  {m}"),
            Verdict::Fail(m) => {
                self.unexpected += 1;
                println!("criterion {n}: FAIL  {m}")
            }
            Verdict::OutOfReach(m) => println!("criterion {n}: FAIL  {m} (state limit)"),
        }
    }
}

fn matrix_cells(m: &harness::MatrixReport, wall: Duration) -> Verdict {
    let s = m.summary();
    let mut wrong = Vec::new();
    for c in &m.cells {
        match c {
            CellResult::Done(r) => {
                let fixture = no_expiry_scenarios().contains(&(r.scenario, r.property));
                if r.status != harness::MatchStatus::Match || r.assume_no_expiry != fixture {
                    wrong.push(format!("{}/{}", r.scenario, r.property));
                }
            }
            CellResult::Failed { scenario, property, error, .. } => wrong.push(format!("{scenario}/{property}: {error}")),
        }
    }
    let no_expiry = m.cells.iter().filter(|c| matches!(c, CellResult::Done(r) if r.assume_no_expiry)).count();
    let msg = format!(
        "{}/{} cells match, {no_expiry} under no-expiry, {:.0} s",
        s.matches,
        s.cells,
        wall.as_secs_f64()
    );
    if wrong.is_empty() && s.cells == 57 && no_expiry == 4 && wall < Duration::from_secs(600) {
        Verdict::Pass(msg)
    } else {
        Verdict::Fail(format!("{msg}; wrong: {}", wrong.join(", ")))
    }
}

fn shapes_and_minimality(m: &harness::MatrixReport) -> Verdict {
    let mut bad = Vec::new();
    for (name, r) in [
        ("firefox P1", shapes::firefox_store_then_silent_completion()),
        ("safari P3", shapes::safari_store_header_intruder()),
        ("opera-mini P1", shapes::opera_never_warns()),
    ] {
        if let Err(e) = r {
            bad.push(format!("{name}: {e}"));
        }
    }
    let mut rechecked = 0;
    for id in ScenarioId::ALL {
        let violated: Vec<_> = m
            .cells
            .iter()
            .filter_map(|c| match c {
                CellResult::Done(r) if r.scenario == id && r.verdict == VerdictKind::Violated => Some(r),
                _ => None,
            })
            .collect();
        if violated.is_empty() {
            continue;
        }
        let opts = ScenarioOptions { assume_no_expiry: violated[0].assume_no_expiry, ..ScenarioOptions::default() };
        let s = build_scenario(id, &opts).unwrap();
        let mut ex = Explorer::new(&s.model, DEFAULT_STATE_LIMIT).unwrap();
        for r in violated {
            assert_eq!(r.assume_no_expiry, opts.assume_no_expiry, "mixed expiry within a scenario");
            let cx = r.counterexample.as_ref().expect("violated cell without counterexample");
            let shortest = shortest_bad_prefix(&mut ex, &property(r.property));
            rechecked += 1;
            if !cx.lasso.is_empty() || Some(cx.prefix.len()) != shortest {
                bad.push(format!("{id}/{}: {} positions, shortest {shortest:?}", r.property, cx.prefix.len()));
            }
        }
    }
    if bad.is_empty() {
        Verdict::Pass(format!("three stories hold, {rechecked} counterexamples are shortest bad prefixes"))
    } else {
        Verdict::Fail(bad.join("; "))
    }
}

fn kernel_oracle() -> Verdict {
    let mut bad = Vec::new();
    let mut checked = 0;
    for (name, src) in fixtures::ALL {
        match compare_with_naive(&fixtures::definition(src), 10_000) {
            Ok(_) => checked += 1,
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    for b in [Browser::OperaMini, Browser::Seb] {
        let id = ScenarioId::new(b, Mode::Classic).unwrap();
        let s = build_scenario(id, &ScenarioOptions::default()).unwrap();
        match compare_with_naive(s.definition(), 100_000) {
            Ok(a) => {
                checked += 1;
                println!("    {id}: {} states, {} transitions", a.states, a.transitions);
            }
            Err(e) => bad.push(format!("{id}: {e}")),
        }
    }
    if bad.is_empty() {
        Verdict::Pass(format!("{checked} models agree state for state and edge for edge"))
    } else {
        Verdict::Fail(bad.join("; "))
    }
}

fn ltl_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut disagree = Vec::new();
    for _ in 0..1000 {
        let g = random_graph(&mut rng, 50);
        let f = random_formula(&mut rng, 4);
        let t = trial(&g, &f);
        if !t.agrees() {
            disagree.push(t.formula.to_string());
        }
    }
    if disagree.is_empty() {
        Verdict::Pass("1000 formulas agree with lasso enumeration".into())
    } else {
        Verdict::Fail(format!("{} disagreements, first {}", disagree.len(), disagree[0]))
    }
}

/// Criteria 2 and 6 from one sweep per scenario.
fn sweeps() -> (Verdict, Verdict) {
    let mut deadlocked = Vec::new();
    let mut violations = Vec::new();
    let mut out_of_reach = Vec::new();
    let mut clean = 0;
    for id in ScenarioId::ALL {
        let opts = ScenarioOptions { assume_no_expiry: store_heavy(id), ..ScenarioOptions::default() };
        let s = build_scenario(id, &opts).unwrap();
        let t = Instant::now();
        match scan_invariants(id, &s.model, DEFAULT_STATE_LIMIT) {
            Ok(scan) => {
                println!("    {id}: {} states, {:.0} s", scan.states, t.elapsed().as_secs_f64());
                if !scan.deadlock.is_free() {
                    deadlocked.push(id.to_string());
                }
                if let Some(v) = scan.violations.first() {
                    violations.push(format!("{id}: {} violations, first {v:?}", scan.violations.len()));
                }
                clean += 1;
            }
            Err(ExploreError::StateLimitExceeded(n)) => {
                println!("    {id}: gave up after {n} states");
                out_of_reach.push(id.to_string());
            }
            Err(e) => {
                deadlocked.push(format!("{id}: {e}"));
                violations.push(format!("{id}: {e}"));
            }
        }
    }
    let verdict = |problems: Vec<String>, ok: String| {
        if !problems.is_empty() {
            Verdict::Fail(problems.join("; "))
        } else if !out_of_reach.is_empty() {
            Verdict::OutOfReach(format!("{ok}; not enumerable: {}", out_of_reach.join(", ")))
        } else {
            Verdict::Pass(ok)
        }
    };
    (
        verdict(deadlocked, format!("{clean} scenarios deadlock-free")),
        verdict(violations, format!("{clean} scenarios without invariant violations")),
    )
}

fn strip_wall(j: &mut Json) {
    match j {
        Json::Object(m) => {
            m.remove("wall_ms");
            m.values_mut().for_each(strip_wall);
        }
        Json::Array(a) => a.iter_mut().for_each(strip_wall),
        _ => {}
    }
}

fn determinism(library: &Json) -> Verdict {
    let out = Command::new(env!("CARGO_BIN_EXE_ceremony-checker"))
        .args(["matrix", "--format", "json", "--no-deadlock"])
        .output()
        .expect("run binary");
    let mut bin: Json = match serde_json::from_slice(&out.stdout) {
        Ok(j) => j,
        Err(e) => return Verdict::Fail(format!("binary output is not JSON: {e}")),
    };
    let mut lib = library.clone();
    strip_wall(&mut bin);
    strip_wall(&mut lib);
    if bin == lib {
        Verdict::Pass("library and binary runs agree apart from wall_ms".into())
    } else {
        Verdict::Fail("matrix JSON differs between runs".into())
    }
}

fn main() {
    let mut acc = Acceptance { unexpected: 0 };
    let jobs = harness::default_jobs();

    let t = Instant::now();
    let m = harness::matrix_for(&ScenarioId::ALL, &RunOptions::default(), false, jobs);
    let wall = t.elapsed();
    acc.report(1, matrix_cells(&m, wall));

    let (deadlock, invariants) = sweeps();
    acc.report(2, deadlock);
    acc.report(3, shapes_and_minimality(&m));
    acc.report(4, kernel_oracle());
    acc.report(5, ltl_oracle());
    acc.report(6, invariants);
    acc.report(7, determinism(&matrix_json(&m)));

    if acc.unexpected > 0 {
        std::process::exit(1);
    }
}
