//! Checks one property on one scenario and prints the report with its
//! counterexample story.
//!
//!     cargo run --release --example check_cell -- opera-mini 1

use ceremony_checker::harness::{report_text, run, RunOptions};
use ceremony_checker::models::{PropertyId, ScenarioId};

fn main() {
    let mut args = std::env::args().skip(1);
    let id: ScenarioId = args.next().as_deref().unwrap_or("opera-mini").parse().expect("scenario");
    let p = args.next().and_then(|n| n.parse().ok()).and_then(PropertyId::from_number).unwrap_or(PropertyId::WarningUsers);

    let opts = RunOptions { deadlock: true, ..RunOptions::default() };
    let (report, deadlock) = run(id, p, &opts).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(e.exit_code())
    });
    let trace = report.counterexample.as_ref().map(|c| c.narrative.as_str()).unwrap_or("");
    print!("{}", report_text(&report, deadlock.as_ref(), trace));
}
