//! Sweeps a scenario's whole state space once and checks the model-level
//! invariants on every transition.

use std::time::Instant;

use ceremony_checker::harness::store_heavy;
use ceremony_checker::models::{build_scenario, scan_invariants, ScenarioId, ScenarioOptions, DEFAULT_STATE_LIMIT};

fn main() {
    let names: Vec<String> = std::env::args().skip(1).collect();
    let ids: Vec<ScenarioId> = if names.is_empty() {
        ["seb", "chrome-pb", "ie", "opera-mini"].iter().map(|n| n.parse().unwrap()).collect()
    } else {
        names.iter().map(|n| n.parse().expect("scenario")).collect()
    };

    for id in ids {
        let opts = ScenarioOptions { assume_no_expiry: store_heavy(id), ..ScenarioOptions::default() };
        let s = build_scenario(id, &opts).expect("build");
        let t = Instant::now();
        match scan_invariants(id, &s.model, DEFAULT_STATE_LIMIT) {
            Ok(scan) => {
                println!(
                    "{id:<20} {:>9} states {:>10} transitions  {} violations  deadlock-free: {}  ({:.1} s)",
                    scan.states,
                    scan.transitions,
                    scan.violations.len(),
                    scan.deadlock.is_free(),
                    t.elapsed().as_secs_f64()
                );
                for v in scan.violations.iter().take(5) {
                    println!("    {v:?}");
                }
            }
            Err(e) => println!("{id:<20} {e}"),
        }
    }
}
