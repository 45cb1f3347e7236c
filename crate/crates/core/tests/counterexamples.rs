mod common;

use ceremony_checker::ltl::{check, property, Outcome};
use ceremony_checker::models::{build_scenario, Browser, Mode, ScenarioId, ScenarioOptions};
use ceremony_checker::statespace::Explorer;

use common::safety::shortest_bad_prefix;
use common::shapes;

#[test]
fn firefox_classic_warning_users() {
    shapes::firefox_store_then_silent_completion().unwrap();
}

#[test]
fn safari_classic_hsts_user_security() {
    shapes::safari_store_header_intruder().unwrap();
}

#[test]
fn opera_mini_warning_users() {
    shapes::opera_never_warns().unwrap();
}

#[test]
fn shortest_prefixes_on_small_scenarios() {
    for (b, m) in [(Browser::Seb, Mode::Classic), (Browser::Ie, Mode::Classic), (Browser::Chrome, Mode::Private)] {
        let id = ScenarioId::new(b, m).unwrap();
        let s = build_scenario(id, &ScenarioOptions::default()).unwrap();
        for p in id.properties() {
            let f = property(p);
            let v = check(&mut Explorer::new(&s.model, 5_000_000).unwrap(), &f).unwrap();
            let shortest = shortest_bad_prefix(&mut Explorer::new(&s.model, 5_000_000).unwrap(), &f);
            match v.outcome {
                Outcome::Holds => assert_eq!(shortest, None, "{id} {p}"),
                Outcome::Violated { prefix, .. } => assert_eq!(Some(prefix.len()), shortest, "{id} {p}"),
            }
        }
    }
}
