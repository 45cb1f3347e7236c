//! Checks user-written LTL formulas against a ceremony scenario.
//!
//!     cargo run --release --example custom_formula -- seb "G F @ui.Webpage"

use ceremony_checker::harness::{run_formula, RunOptions};
use ceremony_checker::ltl::parse_formula;
use ceremony_checker::models::ScenarioId;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let id: ScenarioId = args.first().map(String::as_str).unwrap_or("seb").parse().expect("scenario");
    let formulas: Vec<&str> = if args.len() > 1 {
        args[1..].iter().map(String::as_str).collect()
    } else {
        // a liveness formula, a safety formula, and one mixing events and state
        vec!["G F @ui.Webpage", "G (AuthFail -> !CompleteTLS)", "F (@ui.StoreCertificate && X G !@ui.Warning)"]
    };

    for src in formulas {
        let f = match parse_formula(src) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("{src}: {e}");
                continue;
            }
        };
        let (v, cx) = run_formula(id, &f, false, &RunOptions::default()).expect("check");
        println!("{id} |= {f}: {} ({} states, {} product states)", if v.holds() { "holds" } else { "violated" }, v.stats.states, v.stats.product_states);
        if let Some(cx) = cx {
            let lasso = if cx.lasso.is_empty() { String::new() } else { format!(", loop of {}", cx.lasso.len()) };
            println!("  counterexample: {} positions{lasso}, {} sessions", cx.prefix.len(), cx.sessions());
        }
    }
}
