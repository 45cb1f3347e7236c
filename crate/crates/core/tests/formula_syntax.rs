use ceremony_checker::ltl::{event_label, parse_formula, Ltl};
use proptest::prelude::*;

fn formula() -> impl Strategy<Value = Ltl> {
    let leaf = prop_oneof![
        Just(Ltl::True),
        Just(Ltl::False),
        Just(Ltl::state("p")),
        Just(Ltl::state("CompleteTLS")),
        Just(Ltl::event(event_label("ui.Data").unwrap())),
        Just(Ltl::event(event_label("network.ServerFinished.HSTS.Data").unwrap())),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Ltl::not),
            inner.clone().prop_map(Ltl::x),
            inner.clone().prop_map(Ltl::g),
            inner.clone().prop_map(Ltl::f),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Ltl::u(a, b)),
        ]
    })
}

proptest! {
    #[test]
    fn printed_formulas_parse_back(f in formula()) {
        let text = f.to_string();
        prop_assert_eq!(parse_formula(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn garbage_is_rejected_not_panicked(s in "[GFXU!()&|<>@a-z. -]{0,24}") {
        let _ = parse_formula(&s);
    }
}

#[test]
fn precedence() {
    let f = parse_formula("a -> b || c && d U e").unwrap();
    let want = Ltl::implies(
        Ltl::state("a"),
        Ltl::or(Ltl::state("b"), Ltl::and(Ltl::state("c"), Ltl::u(Ltl::state("d"), Ltl::state("e")))),
    );
    assert_eq!(f, want);
    assert!(parse_formula("G (p").is_err());
    assert!(parse_formula("p q").is_err());
}
