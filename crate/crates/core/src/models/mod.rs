//! The ceremony library: twelve browser scenarios, their expected verdicts,
//! and the cells that are checked without expired certificates.

mod common;
mod invariants;
pub mod listings;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use invariants::{scan_invariants, Invariant, InvariantScan, InvariantViolation};

use crate::kernel::{parse_model, Model, ModelDef, ModelError, ProcessExpr, Scalar, Sym, Value};

pub use common::COMMON;

/// Default bound on explored states.
pub const DEFAULT_STATE_LIMIT: usize = 30_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Browser {
    Seb,
    Firefox,
    Chrome,
    Safari,
    Ie,
    OperaMini,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Classic,
    Private,
    Interleaved,
}

/// One row of the verdict table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScenarioId {
    browser: Browser,
    mode: Mode,
}

impl ScenarioId {
    /// All rows, in table order.
    pub const ALL: [ScenarioId; 12] = [
        ScenarioId { browser: Browser::Seb, mode: Mode::Classic },
        ScenarioId { browser: Browser::Firefox, mode: Mode::Classic },
        ScenarioId { browser: Browser::Firefox, mode: Mode::Private },
        ScenarioId { browser: Browser::Firefox, mode: Mode::Interleaved },
        ScenarioId { browser: Browser::Chrome, mode: Mode::Classic },
        ScenarioId { browser: Browser::Chrome, mode: Mode::Private },
        ScenarioId { browser: Browser::Chrome, mode: Mode::Interleaved },
        ScenarioId { browser: Browser::Ie, mode: Mode::Classic },
        ScenarioId { browser: Browser::Safari, mode: Mode::Classic },
        ScenarioId { browser: Browser::Safari, mode: Mode::Private },
        ScenarioId { browser: Browser::Safari, mode: Mode::Interleaved },
        ScenarioId { browser: Browser::OperaMini, mode: Mode::Classic },
    ];

    /// Rejects modes that a single-mode browser does not have.
    pub fn new(browser: Browser, mode: Mode) -> Option<ScenarioId> {
        let single = matches!(browser, Browser::Seb | Browser::Ie | Browser::OperaMini);
        (!single || mode == Mode::Classic).then_some(ScenarioId { browser, mode })
    }

    pub fn browser(self) -> Browser {
        self.browser
    }

    pub fn mode(self) -> Mode {
        self.mode
    }

    /// Stable identifier such as `firefox:classic` or `opera-mini`.
    pub fn as_str(self) -> &'static str {
        use Browser::*;
        use Mode::*;
        match (self.browser, self.mode) {
            (Seb, _) => "seb",
            (Ie, _) => "ie",
            (OperaMini, _) => "opera-mini",
            (Firefox, Classic) => "firefox:classic",
            (Firefox, Private) => "firefox:private",
            (Firefox, Interleaved) => "firefox:interleaved",
            (Chrome, Classic) => "chrome:classic",
            (Chrome, Private) => "chrome:private",
            (Chrome, Interleaved) => "chrome:interleaved",
            (Safari, Classic) => "safari:classic",
            (Safari, Private) => "safari:private",
            (Safari, Interleaved) => "safari:interleaved",
        }
    }

    /// Short table label such as `firefox-cb`.
    pub fn short(self) -> &'static str {
        use Browser::*;
        use Mode::*;
        match (self.browser, self.mode) {
            (Seb, _) => "seb",
            (Ie, _) => "ie",
            (OperaMini, _) => "opera_mini",
            (Firefox, Classic) => "firefox-cb",
            (Firefox, Private) => "firefox-pb",
            (Firefox, Interleaved) => "firefox-in",
            (Chrome, Classic) => "chrome-cb",
            (Chrome, Private) => "chrome-pb",
            (Chrome, Interleaved) => "chrome-in",
            (Safari, Classic) => "safari-cb",
            (Safari, Private) => "safari-pb",
            (Safari, Interleaved) => "safari-in",
        }
    }

    /// Whether the hsts-bootstrap property applies (browsers without HSTS support excluded).
    pub fn supports_hsts(self) -> bool {
        !matches!(self.browser, Browser::Seb | Browser::Ie | Browser::OperaMini)
    }

    pub fn properties(self) -> Vec<PropertyId> {
        PropertyId::ALL
            .into_iter()
            .filter(|p| *p != PropertyId::HstsBootstrap || self.supports_hsts())
            .collect()
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown identifier `{0}`")]
pub struct UnknownId(pub String);

impl FromStr for ScenarioId {
    type Err = UnknownId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioId::ALL
            .into_iter()
            .find(|id| id.as_str() == s || id.short() == s)
            .ok_or_else(|| UnknownId(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropertyId {
    WarningUsers,
    StoringCerts,
    HstsUserSecurity,
    HstsBootstrap,
    CertHistory,
}

impl PropertyId {
    pub const ALL: [PropertyId; 5] = [
        PropertyId::WarningUsers,
        PropertyId::StoringCerts,
        PropertyId::HstsUserSecurity,
        PropertyId::HstsBootstrap,
        PropertyId::CertHistory,
    ];

    /// 1-based position in the assertion block.
    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<PropertyId> {
        PropertyId::ALL.get((n as usize).checked_sub(1)?).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PropertyId::WarningUsers => "warning-users",
            PropertyId::StoringCerts => "storing-certs",
            PropertyId::HstsUserSecurity => "hsts-user-security",
            PropertyId::HstsBootstrap => "hsts-bootstrap",
            PropertyId::CertHistory => "cert-history",
        }
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for PropertyId {
    type Err = UnknownId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let by_number = s.strip_prefix('P').or(Some(s)).and_then(|n| n.parse::<u8>().ok());
        PropertyId::ALL
            .into_iter()
            .find(|p| p.as_str() == s || Some(p.number()) == by_number)
            .ok_or_else(|| UnknownId(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expected {
    Holds,
    Violated,
    NotApplicable,
}

impl Expected {
    pub fn as_str(self) -> &'static str {
        match self {
            Expected::Holds => "holds",
            Expected::Violated => "violated",
            Expected::NotApplicable => "not-applicable",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioOptions {
    /// Restrict the per-session expiry choice to `noexpi`.
    pub assume_no_expiry: bool,
    pub state_limit: usize,
    /// Use `CertificateIsValidNR` in place of `CertificateIsValid` inside
    /// Safari's properties. Off by default.
    pub nr_validity: bool,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        ScenarioOptions { assume_no_expiry: false, state_limit: DEFAULT_STATE_LIMIT, nr_validity: false }
    }
}

/// A built, compiled scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: ScenarioId,
    pub options: ScenarioOptions,
    pub model: Arc<Model>,
}

impl Scenario {
    pub fn definition(&self) -> &ModelDef {
        self.model.definition()
    }

    pub fn properties(&self) -> Vec<PropertyId> {
        self.id.properties()
    }

    /// Label opening each session.
    pub fn session_marker(&self) -> crate::kernel::EventLabel {
        crate::kernel::EventLabel::comm("ui", [Sym::Webpage])
    }
}

/// Source text of the browser listing after the minimal well-formedness repairs.
pub fn repaired_listing(browser: Browser, mode: Mode) -> String {
    use listings::*;
    let raw = match (browser, mode) {
        (Browser::Seb, _) => SEB,
        (Browser::Ie, _) => IE,
        (Browser::OperaMini, _) => OPERA_MINI,
        (Browser::Firefox, Mode::Private) => FIREFOX_PRIVATE,
        (Browser::Firefox, _) => FIREFOX_CLASSIC,
        (Browser::Chrome, Mode::Private) => CHROME_PRIVATE,
        (Browser::Chrome, _) => CHROME_CLASSIC,
        (Browser::Safari, Mode::Private) => SAFARI_PRIVATE,
        (Browser::Safari, _) => SAFARI_CLASSIC,
    };
    let mut text = raw.to_string();
    let mut fix = |from: &str, to: &str| {
        assert!(text.contains(from), "listing repair target `{from}` missing");
        text = text.replace(from, to);
    };
    match browser {
        Browser::Safari if mode != Mode::Private => fix("{HSTSList.Add", "{dynamicHSTSList.Add"),
        Browser::Chrome | Browser::Ie | Browser::OperaMini => fix("expc=exp", ""),
        _ => {}
    }
    if matches!(browser, Browser::Seb | Browser::Chrome | Browser::Ie | Browser::OperaMini) {
        fix("cert[2]=sk}", "cert[2]=sk;extendedcert[4]=exp}");
    }
    text
}

/// The body of one session: the listing's right-hand side without the trailing recursion.
fn session_body(listing: &str) -> &str {
    let start = listing.find("Browser() =").expect("listing defines Browser") + "Browser() =".len();
    let end = listing.rfind("Browser();").expect("listing recurses");
    let body = listing[start..end].trim_end();
    body.strip_suffix(';').expect("recursion is sequenced").trim()
}

/// Full model source for a scenario.
pub fn scenario_source(id: ScenarioId) -> String {
    let browser = match id.mode {
        Mode::Interleaved => {
            let cb = repaired_listing(id.browser, Mode::Classic);
            let pb = repaired_listing(id.browser, Mode::Private);
            format!(
                "Browser() = ({}; Browser())\n         [] ({}; Browser());\n",
                session_body(&cb),
                session_body(&pb)
            )
        }
        mode => repaired_listing(id.browser, mode),
    };
    format!("{COMMON}\n{browser}")
}

fn cert_universe() -> Vec<Value> {
    use Sym::*;
    let mut out = Vec::new();
    for subject in [S, I] {
        for signer in [SignS, SignCa, SignI] {
            for url in [S, I] {
                for exp in [Expi, Noexpi] {
                    for rev in [Revo, Norevo, HelloClient] {
                        out.push(Value::tuple([subject, Pk, signer, url, exp, rev]));
                    }
                }
            }
        }
    }
    out
}

/// Assigns set universes and, when requested, removes expired certificates from the browser's choices.
pub fn finish_definition(def: &mut ModelDef, assume_no_expiry: bool) -> Result<(), ModelError> {
    let urls = vec![Value::Sym(Sym::S), Value::Sym(Sym::I)];
    for (name, universe) in [
        ("dynamicHSTSList", urls.clone()),
        ("preloadedHSTSList", urls),
        ("ServerCert", cert_universe()),
    ] {
        def.set_mut(name)
            .ok_or_else(|| ModelError::UndeclaredName {
                context: "scenario".into(),
                name: name.to_string(),
            })?
            .universe = universe;
    }
    if assume_no_expiry {
        let browser = def.process_mut("Browser").ok_or_else(|| ModelError::UndeclaredName {
            context: "scenario".into(),
            name: "Browser".into(),
        })?;
        restrict_expiry(&mut browser.body);
    }
    Ok(())
}

fn restrict_expiry(p: &mut ProcessExpr) {
    match p {
        ProcessExpr::IndexedChoice { binder, domain, body } => {
            if binder == "exp" {
                domain.retain(|v| *v == Scalar::Sym(Sym::Noexpi));
            }
            restrict_expiry(body);
        }
        ProcessExpr::Choice(a, b) | ProcessExpr::Seq(a, b) => {
            restrict_expiry(a);
            restrict_expiry(b);
        }
        _ => {}
    }
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("listing does not parse: {0}")]
    Parse(#[from] crate::kernel::ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub fn build_scenario(id: ScenarioId, opts: &ScenarioOptions) -> Result<Scenario, ScenarioError> {
    let mut def = parse_model(&scenario_source(id))?;
    def.entry = "Model".into();
    finish_definition(&mut def, opts.assume_no_expiry)?;
    let model = Model::compile(def)?;
    Ok(Scenario { id, options: opts.clone(), model: Arc::new(model) })
}

/// The published verdict table.
pub fn expected_verdicts() -> Vec<(ScenarioId, [Expected; 5])> {
    use Expected::{Holds as Y, NotApplicable as NA, Violated as N};
    let rows = [
        [Y, Y, Y, NA, Y],
        [N, N, Y, Y, N],
        [Y, Y, N, Y, N],
        [N, N, N, Y, N],
        [Y, Y, Y, Y, N],
        [Y, Y, N, Y, N],
        [Y, Y, N, Y, N],
        [Y, Y, N, NA, N],
        [N, N, N, Y, N],
        [N, N, N, N, N],
        [N, N, N, N, N],
        [N, Y, N, NA, N],
    ];
    ScenarioId::ALL.into_iter().zip(rows).collect()
}

pub fn expected(id: ScenarioId, p: PropertyId) -> Expected {
    expected_verdicts()
        .into_iter()
        .find(|(s, _)| *s == id)
        .map(|(_, row)| row[p as usize])
        .expect("every scenario has a row")
}

/// Cells checked with `assume_no_expiry` by default.
pub fn no_expiry_scenarios() -> Vec<(ScenarioId, PropertyId)> {
    let firefox = ScenarioId { browser: Browser::Firefox, mode: Mode::Classic };
    let safari = ScenarioId { browser: Browser::Safari, mode: Mode::Classic };
    let firefox_in = ScenarioId { browser: Browser::Firefox, mode: Mode::Interleaved };
    vec![
        (firefox, PropertyId::HstsUserSecurity),
        (safari, PropertyId::HstsBootstrap),
        (firefox, PropertyId::HstsBootstrap),
        (firefox_in, PropertyId::HstsBootstrap),
    ]
}
