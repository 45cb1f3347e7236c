//! Running scenarios against properties, the verdict matrix, and reports.

mod narrative;
mod report;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

pub use narrative::{render_narrative, replay, session_count, session_marker, sessions, NonReplayableTrace, Step};
pub use report::{matrix_json, matrix_markdown, matrix_text, report_json, report_markdown, report_text};

use crate::kernel::EventLabel;
use crate::ltl::{self, CheckError, CheckOptions, Ltl, Outcome, Position};
use crate::models::{
    build_scenario, expected, no_expiry_scenarios, Browser, Expected, Mode, PropertyId, Scenario, ScenarioError,
    ScenarioId, ScenarioOptions, DEFAULT_STATE_LIMIT,
};
use crate::statespace::{check_deadlock, sweep, DeadlockReport, ExploreError, Explorer, StateGraph};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum NoExpiry {
    /// Only for the cells the fixture lists.
    #[default]
    Auto,
    Always,
    Never,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub no_expiry: NoExpiry,
    pub state_limit: usize,
    pub deadlock: bool,
    pub cross_check: bool,
    pub nr_validity: bool,
    /// Cells slower than this are flagged; nothing fails because of it.
    pub time_budget: Duration,
}

impl Default for RunOptions {
    fn default() -> RunOptions {
        RunOptions {
            no_expiry: NoExpiry::Auto,
            state_limit: DEFAULT_STATE_LIMIT,
            deadlock: false,
            cross_check: false,
            nr_validity: false,
            time_budget: Duration::from_secs(600),
        }
    }
}

impl RunOptions {
    pub fn assume_no_expiry(&self, id: ScenarioId, p: PropertyId) -> bool {
        match self.no_expiry {
            NoExpiry::Auto => no_expiry_scenarios().contains(&(id, p)),
            NoExpiry::Always => true,
            NoExpiry::Never => false,
        }
    }

    /// Deadlock checks need the whole graph. Scenarios that keep certificates
    /// or policies across sessions are only finite enough without expiry.
    pub fn deadlock_no_expiry(&self, id: ScenarioId) -> bool {
        match self.no_expiry {
            NoExpiry::Auto => store_heavy(id),
            NoExpiry::Always => true,
            NoExpiry::Never => false,
        }
    }

    /// Whether the cell runs as the fixture prescribes.
    pub fn on_fixture(&self, id: ScenarioId, p: PropertyId) -> bool {
        self.assume_no_expiry(id, p) == no_expiry_scenarios().contains(&(id, p)) && !self.nr_validity
    }

    fn scenario_options(&self, no_expiry: bool) -> ScenarioOptions {
        ScenarioOptions { assume_no_expiry: no_expiry, state_limit: self.state_limit, nr_validity: self.nr_validity }
    }
}

/// Scenarios whose graphs with expiry are too large to enumerate.
pub fn store_heavy(id: ScenarioId) -> bool {
    matches!(
        (id.browser(), id.mode()),
        (Browser::Firefox, Mode::Classic | Mode::Interleaved) | (Browser::Safari, _)
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    Holds,
    Violated,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::Holds => "holds",
            VerdictKind::Violated => "violated",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MatchStatus {
    Match,
    Mismatch,
    NotApplicable,
    /// The cell ran with options the fixture does not describe.
    OffFixture,
}

impl MatchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchStatus::Match => "match",
            MatchStatus::Mismatch => "mismatch",
            MatchStatus::NotApplicable => "not-applicable",
            MatchStatus::OffFixture => "off-fixture",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub prefix: Vec<Position>,
    /// Empty for a bad prefix.
    pub lasso: Vec<Position>,
    pub steps: Vec<Step>,
    pub narrative: String,
}

impl Counterexample {
    pub fn sessions(&self) -> usize {
        session_count(&self.steps)
    }

    /// Event texts of all steps, stutter steps included as `-`.
    pub fn events(&self) -> Vec<String> {
        self.steps.iter().map(|s| if s.stutter { "-".to_string() } else { s.event.to_string() }).collect()
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.lasso.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub scenario: ScenarioId,
    pub property: PropertyId,
    pub assume_no_expiry: bool,
    pub verdict: VerdictKind,
    pub expected: Expected,
    pub status: MatchStatus,
    pub counterexample: Option<Counterexample>,
    pub states: usize,
    pub product_states: usize,
    pub wall_ms: u128,
    pub over_budget: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeadlockRow {
    pub scenario: ScenarioId,
    pub assume_no_expiry: bool,
    pub deadlock_free: bool,
    pub witness: Vec<EventLabel>,
    pub states: usize,
    pub wall_ms: u128,
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("state limit exceeded: {0} states found")]
    StateLimit(usize),
    #[error(transparent)]
    Model(crate::kernel::ModelError),
    #[error(transparent)]
    Check(CheckError),
    #[error(transparent)]
    Replay(#[from] NonReplayableTrace),
    #[error("property {1} does not apply to {0}")]
    NotApplicable(ScenarioId, PropertyId),
}

impl From<ExploreError> for HarnessError {
    fn from(e: ExploreError) -> HarnessError {
        match e {
            ExploreError::StateLimitExceeded(n) => HarnessError::StateLimit(n),
            ExploreError::Model(m) => HarnessError::Model(m),
        }
    }
}

impl From<CheckError> for HarnessError {
    fn from(e: CheckError) -> HarnessError {
        match e {
            CheckError::Explore(x) => x.into(),
            other => HarnessError::Check(other),
        }
    }
}

impl HarnessError {
    /// Process exit code: 3 for the state limit, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::StateLimit(_) => 3,
            _ => 2,
        }
    }
}

/// The formula checked for a cell, honoring the Safari validity variant.
pub fn formula_for(id: ScenarioId, p: PropertyId, opts: &RunOptions) -> Ltl {
    let f = ltl::property(p);
    if opts.nr_validity && id.browser() == Browser::Safari {
        f.rename_state("CertificateIsValid", "CertificateIsValidNR")
    } else {
        f
    }
}

fn compare(id: ScenarioId, p: PropertyId, verdict: VerdictKind, on_fixture: bool) -> (Expected, MatchStatus) {
    let exp = expected(id, p);
    let status = match exp {
        Expected::NotApplicable => MatchStatus::NotApplicable,
        _ if !on_fixture => MatchStatus::OffFixture,
        Expected::Holds if verdict == VerdictKind::Holds => MatchStatus::Match,
        Expected::Violated if verdict == VerdictKind::Violated => MatchStatus::Match,
        _ => MatchStatus::Mismatch,
    };
    (exp, status)
}

/// Checks one formula on an explorer and replays any counterexample.
pub fn check_formula(
    ex: &mut Explorer<'_>,
    f: &Ltl,
    title: &str,
    opts: &RunOptions,
) -> Result<(ltl::Verdict, Option<Counterexample>), HarnessError> {
    let v = ltl::check_with(ex, f, CheckOptions { cross_check: opts.cross_check, ..Default::default() })?;
    let cx = match &v.outcome {
        Outcome::Holds => None,
        Outcome::Violated { prefix, lasso } => {
            let steps = replay(ex, prefix, lasso)?;
            let narrative = render_narrative(title, &steps);
            Some(Counterexample { prefix: prefix.clone(), lasso: lasso.clone(), steps, narrative })
        }
    };
    Ok((v, cx))
}

fn run_cell(
    scenario: &Scenario,
    ex: &mut Explorer<'_>,
    p: PropertyId,
    opts: &RunOptions,
) -> Result<RunReport, HarnessError> {
    let id = scenario.id;
    let start = Instant::now();
    let f = formula_for(id, p, opts);
    let (v, cx) = check_formula(ex, &f, &format!("{id} / {p}"), opts)?;
    let verdict = if v.holds() { VerdictKind::Holds } else { VerdictKind::Violated };
    let (exp, status) = compare(id, p, verdict, opts.on_fixture(id, p));
    let elapsed = start.elapsed();
    Ok(RunReport {
        scenario: id,
        property: p,
        assume_no_expiry: scenario.options.assume_no_expiry,
        verdict,
        expected: exp,
        status,
        counterexample: cx,
        states: ex.state_count(),
        product_states: v.stats.product_states,
        wall_ms: elapsed.as_millis(),
        over_budget: elapsed > opts.time_budget,
    })
}

fn run_deadlock(scenario: &Scenario, ex: &mut Explorer<'_>) -> Result<DeadlockRow, HarnessError> {
    let start = Instant::now();
    let r = check_deadlock(ex)?;
    let (deadlock_free, witness) = match r {
        DeadlockReport::DeadlockFree => (true, Vec::new()),
        DeadlockReport::Deadlocked { witness, .. } => (false, witness),
    };
    Ok(DeadlockRow {
        scenario: scenario.id,
        assume_no_expiry: scenario.options.assume_no_expiry,
        deadlock_free,
        witness,
        states: ex.state_count(),
        wall_ms: start.elapsed().as_millis(),
    })
}

/// Deadlock check by a single memory-lean pass, for graphs nothing else needs.
fn sweep_deadlock(scenario: &Scenario, state_limit: usize) -> Result<DeadlockRow, HarnessError> {
    let start = Instant::now();
    let s = sweep(&scenario.model, state_limit, |_| {})?;
    let (deadlock_free, witness) = match s.deadlock {
        DeadlockReport::DeadlockFree => (true, Vec::new()),
        DeadlockReport::Deadlocked { witness, .. } => (false, witness),
    };
    Ok(DeadlockRow {
        scenario: scenario.id,
        assume_no_expiry: scenario.options.assume_no_expiry,
        deadlock_free,
        witness,
        states: s.states,
        wall_ms: start.elapsed().as_millis(),
    })
}

/// Checks one property on one scenario, plus deadlock freedom when asked.
pub fn run(id: ScenarioId, p: PropertyId, opts: &RunOptions) -> Result<(RunReport, Option<DeadlockRow>), HarnessError> {
    if !id.properties().contains(&p) {
        return Err(HarnessError::NotApplicable(id, p));
    }
    let scenario = build_scenario(id, &opts.scenario_options(opts.assume_no_expiry(id, p)))?;
    let mut ex = Explorer::new(&scenario.model, opts.state_limit)?;
    let report = run_cell(&scenario, &mut ex, p, opts)?;
    let deadlock = if opts.deadlock {
        if opts.deadlock_no_expiry(id) == scenario.options.assume_no_expiry {
            Some(run_deadlock(&scenario, &mut ex)?)
        } else {
            let other = build_scenario(id, &opts.scenario_options(opts.deadlock_no_expiry(id)))?;
            Some(sweep_deadlock(&other, opts.state_limit)?)
        }
    } else {
        None
    };
    Ok((report, deadlock))
}

/// Checks an arbitrary formula on a scenario.
pub fn run_formula(
    id: ScenarioId,
    f: &Ltl,
    no_expiry: bool,
    opts: &RunOptions,
) -> Result<(ltl::Verdict, Option<Counterexample>), HarnessError> {
    let scenario = build_scenario(id, &opts.scenario_options(no_expiry))?;
    let mut ex = Explorer::new(&scenario.model, opts.state_limit)?;
    check_formula(&mut ex, f, &format!("{id} / {f}"), opts)
}

#[derive(Clone, Debug)]
pub enum CellResult {
    Done(Box<RunReport>),
    Failed { scenario: ScenarioId, property: PropertyId, assume_no_expiry: bool, error: String, exit_code: i32 },
}

#[derive(Clone, Debug)]
pub enum DeadlockResult {
    Done(DeadlockRow),
    Failed { scenario: ScenarioId, assume_no_expiry: bool, error: String, exit_code: i32 },
}

#[derive(Clone, Debug, Default)]
pub struct MatrixReport {
    pub cells: Vec<CellResult>,
    pub deadlocks: Vec<DeadlockResult>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub cells: usize,
    pub matches: usize,
    pub mismatches: usize,
    pub off_fixture: usize,
    pub errors: usize,
    pub deadlock_free: usize,
    pub deadlocked: usize,
    pub deadlock_errors: usize,
}

impl MatrixReport {
    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for c in &self.cells {
            s.cells += 1;
            match c {
                CellResult::Done(r) => match r.status {
                    MatchStatus::Match => s.matches += 1,
                    MatchStatus::Mismatch => s.mismatches += 1,
                    MatchStatus::OffFixture => s.off_fixture += 1,
                    MatchStatus::NotApplicable => {}
                },
                CellResult::Failed { .. } => s.errors += 1,
            }
        }
        for d in &self.deadlocks {
            match d {
                DeadlockResult::Done(r) if r.deadlock_free => s.deadlock_free += 1,
                DeadlockResult::Done(_) => s.deadlocked += 1,
                DeadlockResult::Failed { .. } => s.deadlock_errors += 1,
            }
        }
        s
    }

    /// 0 when every cell matches and every scenario is deadlock-free.
    pub fn exit_code(&self) -> i32 {
        let s = self.summary();
        let worst_error = self
            .cells
            .iter()
            .filter_map(|c| match c {
                CellResult::Failed { exit_code, .. } => Some(*exit_code),
                _ => None,
            })
            .chain(self.deadlocks.iter().filter_map(|d| match d {
                DeadlockResult::Failed { exit_code, .. } => Some(*exit_code),
                _ => None,
            }))
            .max();
        match worst_error {
            Some(2) => 2,
            Some(c) => c,
            None if s.mismatches > 0 || s.deadlocked > 0 => 1,
            None => 0,
        }
    }
}

/// One unit of matrix work: the cells of a scenario that share an expiry setting.
struct Group {
    scenario: ScenarioId,
    no_expiry: bool,
    properties: Vec<PropertyId>,
    deadlock: bool,
}

fn groups(scenarios: &[ScenarioId], opts: &RunOptions, deadlock: bool) -> Vec<Group> {
    let mut out = Vec::new();
    for &id in scenarios {
        for no_expiry in [false, true] {
            let properties: Vec<PropertyId> =
                id.properties().into_iter().filter(|&p| opts.assume_no_expiry(id, p) == no_expiry).collect();
            let dl = deadlock && opts.deadlock_no_expiry(id) == no_expiry;
            if !properties.is_empty() || dl {
                out.push(Group { scenario: id, no_expiry, properties, deadlock: dl });
            }
        }
    }
    out
}

fn run_group(g: &Group, opts: &RunOptions) -> (Vec<CellResult>, Option<DeadlockResult>) {
    let fail_cells = |e: &HarnessError| {
        g.properties
            .iter()
            .map(|&p| CellResult::Failed {
                scenario: g.scenario,
                property: p,
                assume_no_expiry: g.no_expiry,
                error: e.to_string(),
                exit_code: e.exit_code(),
            })
            .collect::<Vec<_>>()
    };
    let fail_deadlock = |e: &HarnessError| {
        g.deadlock.then(|| DeadlockResult::Failed {
            scenario: g.scenario,
            assume_no_expiry: g.no_expiry,
            error: e.to_string(),
            exit_code: e.exit_code(),
        })
    };
    let scenario = match build_scenario(g.scenario, &opts.scenario_options(g.no_expiry)) {
        Ok(s) => s,
        Err(e) => {
            let e = HarnessError::from(e);
            return (fail_cells(&e), fail_deadlock(&e));
        }
    };
    if g.properties.is_empty() {
        let dl = match sweep_deadlock(&scenario, opts.state_limit) {
            Ok(r) => Some(DeadlockResult::Done(r)),
            Err(e) => fail_deadlock(&e),
        };
        return (Vec::new(), dl);
    }
    let mut ex = match Explorer::new(&scenario.model, opts.state_limit) {
        Ok(ex) => ex,
        Err(e) => {
            let e = HarnessError::from(e);
            return (fail_cells(&e), fail_deadlock(&e));
        }
    };
    let mut cells = Vec::new();
    for &p in &g.properties {
        cells.push(match run_cell(&scenario, &mut ex, p, opts) {
            Ok(r) => {
                if r.over_budget {
                    eprintln!("warning: {} / {} took {} ms, over the soft budget", r.scenario, r.property, r.wall_ms);
                }
                CellResult::Done(Box::new(r))
            }
            Err(e) => CellResult::Failed {
                scenario: g.scenario,
                property: p,
                assume_no_expiry: g.no_expiry,
                error: e.to_string(),
                exit_code: e.exit_code(),
            },
        });
    }
    let deadlock = if g.deadlock {
        Some(match run_deadlock(&scenario, &mut ex) {
            Ok(r) => DeadlockResult::Done(r),
            Err(e) => fail_deadlock(&e).expect("deadlock requested"),
        })
    } else {
        None
    };
    (cells, deadlock)
}

type GroupResult = (usize, Vec<CellResult>, Option<DeadlockResult>);

/// Default worker count: `CEREMONY_CHECKER_JOBS`, else the number of cores.
pub fn default_jobs() -> usize {
    std::env::var("CEREMONY_CHECKER_JOBS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Runs the given scenarios' applicable cells (and deadlock checks) on `jobs`
/// workers. Results come back in scenario order, then property order.
pub fn matrix_for(scenarios: &[ScenarioId], opts: &RunOptions, deadlock: bool, jobs: usize) -> MatrixReport {
    let work = groups(scenarios, opts, deadlock);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<GroupResult>> = Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..jobs.max(1).min(work.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(g) = work.get(i) else { break };
                let (cells, dl) = run_group(g, opts);
                results.lock().unwrap().push((i, cells, dl));
            });
        }
    });
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|r| r.0);
    let mut report = MatrixReport::default();
    for (_, cells, dl) in results {
        report.cells.extend(cells);
        report.deadlocks.extend(dl);
    }
    let order = |id: ScenarioId| ScenarioId::ALL.iter().position(|&x| x == id).unwrap_or(usize::MAX);
    report.cells.sort_by_key(|c| match c {
        CellResult::Done(r) => (order(r.scenario), r.property.number()),
        CellResult::Failed { scenario, property, .. } => (order(*scenario), property.number()),
    });
    report
}

/// All twelve scenarios with deadlock checks.
pub fn matrix(opts: &RunOptions, jobs: usize) -> MatrixReport {
    matrix_for(&ScenarioId::ALL, opts, true, jobs)
}
