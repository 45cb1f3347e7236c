mod common;

use ceremony_checker::models::{build_scenario, Browser, Mode, ScenarioId, ScenarioOptions};

use common::{compare_with_naive, fixtures};

#[test]
fn fixtures_match_naive_enumerator() {
    for (name, src) in fixtures::ALL {
        let a = compare_with_naive(&fixtures::definition(src), 10_000).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(a.states > 1, "{name} is trivial");
    }
}

#[test]
fn opera_mini_matches_naive_enumerator() {
    let s = build_scenario(ScenarioId::new(Browser::OperaMini, Mode::Classic).unwrap(), &ScenarioOptions::default()).unwrap();
    let a = compare_with_naive(s.definition(), 100_000).unwrap();
    assert!(a.transitions > a.states);
}

#[test]
fn seb_matches_naive_enumerator() {
    let s = build_scenario(ScenarioId::new(Browser::Seb, Mode::Classic).unwrap(), &ScenarioOptions::default()).unwrap();
    let a = compare_with_naive(s.definition(), 100_000).unwrap();
    assert!(a.transitions > a.states);
}
