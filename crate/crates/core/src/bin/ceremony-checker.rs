use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use ceremony_checker::harness::{self, CellResult, MatchStatus, NoExpiry, RunOptions};
use ceremony_checker::ltl::{parse_formula, property};
use ceremony_checker::models::{expected, PropertyId, ScenarioId, DEFAULT_STATE_LIMIT};

#[derive(Parser)]
#[command(name = "ceremony-checker", version, about = "Model checks browser certificate-validation ceremonies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Markdown,
}

#[derive(Clone, Copy, ValueEnum)]
enum Trace {
    Narrative,
    Raw,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum Expiry {
    Auto,
    Always,
    Never,
}

impl From<Expiry> for NoExpiry {
    fn from(e: Expiry) -> NoExpiry {
        match e {
            Expiry::Auto => NoExpiry::Auto,
            Expiry::Always => NoExpiry::Always,
            Expiry::Never => NoExpiry::Never,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check one property (or a custom formula) on one scenario.
    Check {
        #[arg(long)]
        scenario: ScenarioId,
        #[arg(long, required_unless_present = "formula")]
        property: Option<PropertyId>,
        /// LTL text instead of a named property, e.g. `G (CompleteTLS -> CertificateIsValid)`.
        #[arg(long, conflicts_with = "property")]
        formula: Option<String>,
        #[arg(long, value_enum, default_value = "auto")]
        assume_no_expiry: Expiry,
        /// Also check deadlock freedom.
        #[arg(long)]
        deadlock: bool,
        #[arg(long, value_enum, default_value = "narrative")]
        trace: Trace,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_STATE_LIMIT)]
        state_limit: usize,
        /// Decide the formula with both procedures and compare.
        #[arg(long)]
        cross_check: bool,
        /// Read Safari's properties with CertificateIsValidNR.
        #[arg(long)]
        nr_validity: bool,
    },
    /// Regenerate the verdict table and compare it with the fixture.
    Matrix {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long, env = "CEREMONY_CHECKER_JOBS")]
        jobs: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_STATE_LIMIT)]
        state_limit: usize,
        #[arg(long, value_enum, default_value = "auto")]
        assume_no_expiry: Expiry,
        /// Restrict to these scenarios (repeatable).
        #[arg(long)]
        scenario: Vec<ScenarioId>,
        #[arg(long)]
        no_deadlock: bool,
        /// Soft per-cell budget in seconds; exceeding it only warns.
        #[arg(long, default_value_t = 600)]
        time_budget: u64,
        /// Write the observed verdicts as a fixture file instead of trusting the built-in one.
        #[arg(long)]
        update_fixture: Option<PathBuf>,
    },
    /// List scenarios and properties.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check {
            scenario,
            property: prop,
            formula,
            assume_no_expiry,
            deadlock,
            trace,
            format,
            state_limit,
            cross_check,
            nr_validity,
        } => {
            let opts = RunOptions {
                no_expiry: assume_no_expiry.into(),
                state_limit,
                deadlock,
                cross_check,
                nr_validity,
                ..RunOptions::default()
            };
            match (prop, formula) {
                (Some(p), _) => check(scenario, p, &opts, trace, format),
                (None, Some(text)) => check_formula(scenario, &text, &opts, trace),
                (None, None) => 2,
            }
        }
        Command::Matrix {
            format,
            jobs,
            state_limit,
            assume_no_expiry,
            scenario,
            no_deadlock,
            time_budget,
            update_fixture,
        } => {
            let opts = RunOptions {
                no_expiry: assume_no_expiry.into(),
                state_limit,
                time_budget: Duration::from_secs(time_budget),
                ..RunOptions::default()
            };
            let scenarios = if scenario.is_empty() { ScenarioId::ALL.to_vec() } else { scenario };
            let jobs = jobs.unwrap_or_else(harness::default_jobs);
            let m = harness::matrix_for(&scenarios, &opts, !no_deadlock, jobs);
            match format {
                Format::Text => print!("{}", harness::matrix_text(&m)),
                Format::Json => println!("{}", serde_json::to_string_pretty(&harness::matrix_json(&m)).unwrap()),
                Format::Markdown => print!("{}", harness::matrix_markdown(&m)),
            }
            if let Some(path) = update_fixture {
                let rows: Vec<serde_json::Value> = m
                    .cells
                    .iter()
                    .filter_map(|c| match c {
                        CellResult::Done(r) => Some(serde_json::json!({
                            "scenario": r.scenario.as_str(),
                            "property": r.property.as_str(),
                            "verdict": r.verdict.as_str(),
                        })),
                        CellResult::Failed { .. } => None,
                    })
                    .collect();
                let text = serde_json::to_string_pretty(&rows).unwrap();
                if let Err(e) = std::fs::write(&path, text + "\n") {
                    eprintln!("cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
                eprintln!("wrote {} observed verdicts to {}", rows.len(), path.display());
            }
            m.exit_code()
        }
        Command::List => {
            println!("scenarios:");
            for id in ScenarioId::ALL {
                let ps: Vec<String> = id.properties().iter().map(|p| format!("P{}", p.number())).collect();
                println!("  {:<20} {:<11} {}", id.as_str(), id.short(), ps.join(" "));
            }
            println!("properties:");
            for p in PropertyId::ALL {
                println!("  P{} {:<19} {}", p.number(), p.as_str(), property(p));
            }
            0
        }
    };
    ExitCode::from(code as u8)
}

fn check(scenario: ScenarioId, p: PropertyId, opts: &RunOptions, trace: Trace, format: Format) -> i32 {
    if expected(scenario, p) == ceremony_checker::models::Expected::NotApplicable {
        eprintln!("{p} does not apply to {scenario}");
        return 2;
    }
    match harness::run(scenario, p, opts) {
        Ok((r, dl)) => {
            let trace = match trace {
                Trace::Narrative => "narrative",
                Trace::Raw => "raw",
                Trace::None => "none",
            };
            match format {
                Format::Text => print!("{}", harness::report_text(&r, dl.as_ref(), trace)),
                Format::Json => {
                    let mut j = harness::report_json(&r);
                    if let Some(d) = &dl {
                        j["deadlock_free"] = d.deadlock_free.into();
                    }
                    println!("{}", serde_json::to_string_pretty(&j).unwrap());
                }
                Format::Markdown => print!("{}", harness::report_markdown(&r, dl.as_ref())),
            }
            if r.status == MatchStatus::Mismatch || dl.is_some_and(|d| !d.deadlock_free) {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn check_formula(scenario: ScenarioId, text: &str, opts: &RunOptions, trace: Trace) -> i32 {
    let f = match parse_formula(text) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let no_expiry = matches!(opts.no_expiry, NoExpiry::Always);
    match harness::run_formula(scenario, &f, no_expiry, opts) {
        Ok((v, cx)) => {
            println!(
                "{scenario} {f}: {} states={} product={} {} ms",
                if v.holds() { "holds" } else { "violated" },
                v.stats.states,
                v.stats.product_states,
                v.stats.wall_ms
            );
            if let (Some(c), false) = (cx, matches!(trace, Trace::None)) {
                print!("{}", c.narrative);
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
