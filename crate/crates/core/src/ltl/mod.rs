//! Linear temporal logic over macro atoms and event atoms.

mod buchi;
mod check;
mod formula;
mod parse;

pub use buchi::{to_buchi, Buchi};
pub use check::{check, check_with, CheckError, CheckOptions, Outcome, Position, Stats, Verdict};
pub use formula::{Atom, Ltl};
pub use parse::{event_label, parse_formula, FormulaError};

use crate::models::PropertyId;

/// The five ceremony properties.
pub fn property(id: PropertyId) -> Ltl {
    let s = Ltl::state;
    let no_auth_fail_when_wanted = || Ltl::x(Ltl::g(Ltl::implies(s("UserwantS"), Ltl::not(s("AuthFail")))));
    match id {
        PropertyId::WarningUsers => Ltl::g(Ltl::implies(
            Ltl::and(s("CompleteTLS"), Ltl::not(s("User_warned"))),
            s("CertificateIsValid"),
        )),
        PropertyId::StoringCerts => Ltl::g(Ltl::implies(
            Ltl::all([
                s("CertificateIsStored"),
                s("UserwantS"),
                Ltl::event(event_label("ui.Data").expect("constant label")),
                Ltl::not(s("AuthFail")),
            ]),
            no_auth_fail_when_wanted(),
        )),
        PropertyId::HstsUserSecurity => Ltl::g(Ltl::implies(
            Ltl::all([
                s("CertificateIsValid"),
                Ltl::event(event_label("network.ServerFinished.HSTS.Data").expect("constant label")),
                s("UserwantS"),
            ]),
            no_auth_fail_when_wanted(),
        )),
        PropertyId::HstsBootstrap => {
            Ltl::g(Ltl::implies(s("Preload"), Ltl::implies(s("UserwantS"), Ltl::not(s("AuthFail")))))
        }
        PropertyId::CertHistory => Ltl::g(Ltl::implies(
            Ltl::all([s("CompleteTLS"), Ltl::not(s("CertificateIsValid")), s("UserwantS")]),
            Ltl::x(Ltl::g(Ltl::implies(
                Ltl::all([s("CompleteTLS"), s("CertificateIsValid"), s("UserwantS")]),
                s("User_warned"),
            ))),
        )),
    }
}
