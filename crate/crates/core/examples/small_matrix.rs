//! Verdict matrix over the scenarios that enumerate in seconds.

use ceremony_checker::harness::{default_jobs, matrix_for, matrix_markdown, RunOptions};
use ceremony_checker::models::{Browser, Mode, ScenarioId};

fn main() {
    let scenarios: Vec<ScenarioId> = [
        (Browser::Seb, Mode::Classic),
        (Browser::Chrome, Mode::Private),
        (Browser::Ie, Mode::Classic),
        (Browser::OperaMini, Mode::Classic),
    ]
    .into_iter()
    .filter_map(|(b, m)| ScenarioId::new(b, m))
    .collect();

    let m = matrix_for(&scenarios, &RunOptions::default(), true, default_jobs());
    print!("{}", matrix_markdown(&m));
    std::process::exit(m.exit_code());
}
