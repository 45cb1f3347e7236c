use ceremony_checker::kernel::{parse_model, Model};
use ceremony_checker::models::{
    build_scenario, finish_definition, scan_invariants, scenario_source, Browser, Invariant, Mode, ScenarioId,
    ScenarioOptions,
};

const LIMIT: usize = 5_000_000;

fn scenario(b: Browser, m: Mode) -> ScenarioId {
    ScenarioId::new(b, m).unwrap()
}

fn mutant(id: ScenarioId, from: &str, to: &str) -> Model {
    let src = scenario_source(id);
    assert!(src.contains(from), "mutation target missing: {from}");
    let mut def = parse_model(&src.replacen(from, to, 1)).unwrap();
    def.entry = "Model".into();
    finish_definition(&mut def, false).unwrap();
    Model::compile(def).unwrap()
}

fn violated(id: ScenarioId, model: &Model) -> Vec<Invariant> {
    let mut v: Vec<Invariant> =
        scan_invariants(id, model, LIMIT).unwrap().violations.iter().map(|v| v.invariant).collect();
    v.dedup();
    v
}

#[test]
fn small_scenarios_are_clean() {
    for (b, m) in [
        (Browser::Seb, Mode::Classic),
        (Browser::Firefox, Mode::Private),
        (Browser::Chrome, Mode::Classic),
        (Browser::Chrome, Mode::Private),
        (Browser::Chrome, Mode::Interleaved),
        (Browser::Ie, Mode::Classic),
        (Browser::OperaMini, Mode::Classic),
    ] {
        let id = scenario(b, m);
        let s = build_scenario(id, &ScenarioOptions::default()).unwrap();
        let scan = scan_invariants(id, &s.model, LIMIT).unwrap();
        assert!(scan.violations.is_empty(), "{id}: {:?}", scan.violations.first());
        assert!(scan.deadlock.is_free(), "{id} deadlocks");
        assert!(scan.transitions >= scan.states);
    }
}

#[test]
fn private_policy_write_is_caught() {
    let id = scenario(Browser::Chrome, Mode::Private);
    let m = mutant(id, "ui!Warning{user_warned=true}", "ui!Warning{user_warned=true; dynamicHSTSList.Add(S)}");
    assert_eq!(violated(id, &m), vec![Invariant::PrivateWriteRules]);
}

#[test]
fn missing_session_reset_is_caught() {
    let id = scenario(Browser::Chrome, Mode::Private);
    let m = mutant(id, "intruder_server=false; \n                       user_warned=false;", "intruder_server=false;");
    assert!(violated(id, &m).contains(&Invariant::SessionReset));
}

#[test]
fn forging_intruder_is_caught() {
    let id = scenario(Browser::Seb, Mode::Classic);
    let m = mutant(id, "network!HelloServer.url.Pk.SignI -> Skip}", "network!HelloServer.url.Pk.sk -> Skip}");
    assert!(violated(id, &m).contains(&Invariant::IntruderImpossibility));
}

#[test]
fn warning_flag_needs_a_warning() {
    let id = scenario(Browser::Seb, Mode::Classic);
    let m = mutant(id, "Check_Certificate ->", "Check_Certificate{user_warned=true} ->");
    assert!(violated(id, &m).contains(&Invariant::SessionReset));
}
