//! `qmrg`: perfect strategies, canonical spaces and parity no-go
//! certificates for magic rectangle games.
//!
//! Exit codes: 0 positive verdict, 1 negative verdict, 2 usage or input
//! error, 3 numerical failure.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use qmrg::game::{classical_oracle, evaluate, GameSpec, Sign};
use qmrg::inequality::{inequality_report, Convention, InequalityInput};
use qmrg::integrate::{integrate, IntegrationPlan};
use qmrg::io::{parse_scenario, parse_setup, parse_strategy, ScenarioFile, ScenarioInput, SetupDoc, StrategyDoc};
use qmrg::linalg::{schmidt, Tolerance};
use qmrg::nogo::{catalog, certify_2xn, certify_expression, certify_scenario, sweep, CanonicalForm, RealizationMode};
use qmrg::par::Execution;
use qmrg::pqss::{canonical_space, membership, schmidt_clusters, PqssReport};
use qmrg::setup::{build_index_sets, check_recursion_matches_semantics, mermin_peres_fixture, OperatorSetup, Side};
use qmrg::Error;

use report::{write_atomic, Format, Report, Verdict};

#[derive(Debug, Parser)]
#[command(name = "qmrg", version, about = "Perfect strategies and no-go certificates for magic rectangle games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Numerical tolerance.
    #[arg(long, env = "QMRG_TOL", global = true)]
    tol: Option<f64>,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Describe every field of the report.
    #[arg(long, global = true)]
    explain: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Expect {
    Contradiction,
    NoContradiction,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FixtureKind {
    Strategy,
    Setup,
    Scenario,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Alice,
    Bob,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConventionArg {
    RowColumn,
    ColumnRow,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Checks that a strategy wins with certainty.
    Verify {
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Winning probability of a strategy.
    Value {
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Canonical space of a setup, and membership of a strategy's state.
    Pqss {
        #[arg(long)]
        setup: PathBuf,
        #[arg(long)]
        strategy: Option<PathBuf>,
    },
    /// Schmidt coefficients and clusters of a strategy's state.
    Schmidt {
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Parity certificate for a scenario or cell expression.
    Certify {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = Expect::Contradiction)]
        expect: Expect,
    },
    /// The 2 x n law: parity certificate or classical table.
    #[command(name = "nogo-2xn")]
    Nogo2xn {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Expect::Contradiction)]
        expect: Expect,
    },
    /// Inequality value of a strategy's observables.
    Inequality {
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long, value_enum, default_value_t = ConventionArg::RowColumn)]
        convention: ConventionArg,
    },
    /// Weighted direct sum of perfect strategies.
    Integrate {
        #[arg(long = "strategy", required = true)]
        strategies: Vec<PathBuf>,
        /// One per strategy; equal weights when omitted.
        #[arg(long = "weight")]
        weights: Vec<f64>,
    },
    /// Exhaustive classical value of the m x n game.
    Classical {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Built-in inputs: the magic square strategy and setup, and the
    /// catalog scenarios by key. JSON output is the bare document.
    Fixtures {
        #[arg(long, value_enum, default_value_t = FixtureKind::Strategy)]
        kind: FixtureKind,
        /// Catalog key, for scenarios.
        #[arg(long)]
        name: Option<String>,
    },
    /// Index sets of the given arity.
    IndexSets {
        #[arg(long)]
        arity: usize,
        #[arg(long, value_enum, default_value_t = SideArg::Alice)]
        side: SideArg,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_strategy(path: &Path, tol: Tolerance) -> anyhow::Result<qmrg::game::Strategy> {
    parse_strategy(&read(path)?, tol).with_context(|| format!("parsing {}", path.display()))
}

fn game_of(s: &qmrg::game::Strategy) -> anyhow::Result<GameSpec> {
    Ok(GameSpec::new(s.m(), s.n())?)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SweepSummary {
    dims: Vec<usize>,
    seeds: Vec<u64>,
    max_dim: usize,
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    let tol = match cli.tol {
        Some(t) => Tolerance::new(t)?,
        None => Tolerance::default(),
    };
    let report = match &cli.command {
        Command::Verify { strategy } | Command::Value { strategy } => {
            let s = load_strategy(strategy, tol)?;
            let r = evaluate(&game_of(&s)?, &s)?;
            let perfect = (r.value - 1.0).abs() <= tol.eps();
            let mut result = serde_json::to_value(&r)?;
            result["perfect"] = json!(perfect);
            match cli.command {
                Command::Verify { .. } => Report::new("verify", Verdict::from_bool(perfect), result)?,
                _ => Report::new("value", Verdict::Positive, result)?,
            }
        }
        Command::Pqss { setup, strategy } => {
            let setup = parse_setup(&read(setup)?, tol).context("parsing setup")?;
            let space = canonical_space(&setup, tol)?;
            match strategy {
                Some(path) => {
                    let s = load_strategy(path, tol)?;
                    let m = membership(&space, s.state(), tol)?;
                    let analysis = if m.member { Some(schmidt_clusters(s.state(), &setup, tol)?) } else { None };
                    let mut result = serde_json::to_value(PqssReport::new(&space, analysis.as_ref()))?;
                    result["membership"] = serde_json::to_value(m)?;
                    Report::new("pqss", Verdict::from_bool(m.member), result)?
                }
                None => Report::new("pqss", Verdict::from_bool(space.dim() > 0), PqssReport::new(&space, None))?,
            }
        }
        Command::Schmidt { strategy } => {
            let s = load_strategy(strategy, tol)?;
            let g = game_of(&s)?;
            let data = schmidt(s.state(), tol);
            let setup = OperatorSetup::from_strategy(&g, &s, tol)?;
            let analysis = schmidt_clusters(s.state(), &setup, tol)?;
            let result = json!({
                "coefficients": data.values,
                "rank": data.values.len(),
                "clusters": analysis.clusters,
                "betaNorm": analysis.beta_norm,
            });
            Report::new("schmidt", Verdict::Positive, result)?
        }
        Command::Certify { scenario, expect } => {
            let input = parse_scenario(&read(scenario)?).context("parsing scenario")?;
            let (cert, s) = match input {
                ScenarioInput::Scenario(s) => (certify_scenario(&s)?, s),
                ScenarioInput::Expression(e) => {
                    let cert = certify_expression(&e)?;
                    let form = cert.form.unwrap_or(CanonicalForm::Row);
                    (cert, e.canonical_form(form)?)
                }
            };
            let dims = vec![2, 4, 8];
            let seeds: Vec<u64> = (0..5).map(|k| cli.seed.wrapping_add(k)).collect();
            let points = sweep(&s, &dims, &seeds, RealizationMode::Generic, Tolerance::new(1e-9)?, Execution::default())?;
            let numeric = SweepSummary {
                max_dim: points.iter().map(|p| p.hs_dim).max().unwrap_or(0),
                dims,
                seeds,
            };
            let wanted = matches!(expect, Expect::Contradiction);
            let verdict = Verdict::from_bool(cert.is_contradiction() == wanted);
            let mut result = serde_json::to_value(&cert)?;
            result["numeric"] = serde_json::to_value(numeric)?;
            Report::new("certify", verdict, result)?
        }
        Command::Nogo2xn { n, expect } => {
            let r = certify_2xn(*n)?;
            let wanted = matches!(expect, Expect::Contradiction);
            Report::new("nogo-2xn", Verdict::from_bool(r.certificate.is_contradiction() == wanted), r)?
        }
        Command::Inequality { strategy, convention } => {
            let s = load_strategy(strategy, tol)?;
            let conv = match convention {
                ConventionArg::RowColumn => Convention::RowColumn,
                ConventionArg::ColumnRow => Convention::ColumnRow,
            };
            let r = inequality_report(&InequalityInput::from_strategy(&s), conv, tol)?;
            Report::new("inequality", Verdict::Positive, r)?
        }
        Command::Integrate { strategies, weights } => {
            let inputs = strategies.iter().map(|p| load_strategy(p, tol)).collect::<anyhow::Result<Vec<_>>>()?;
            let weights = if weights.is_empty() {
                vec![1.0 / (inputs.len() as f64).sqrt(); inputs.len()]
            } else if weights.len() == inputs.len() {
                weights.clone()
            } else {
                bail!(Error::InvalidPlan(format!("{} weights for {} strategies", weights.len(), inputs.len())));
            };
            let g = game_of(&inputs[0])?;
            let out = integrate(&g, &IntegrationPlan::stacked(inputs.into_iter().zip(weights).collect()), tol)?;
            let value = evaluate(&g, &out)?.value;
            let result = json!({ "value": value, "strategy": StrategyDoc::from_strategy(&out) });
            Report::new("integrate", Verdict::from_bool((value - 1.0).abs() <= tol.eps()), result)?
        }
        Command::Classical { m, n } => {
            let opt = classical_oracle(&GameSpec::new(*m, *n)?)?;
            Report::new("classical", Verdict::Positive, opt)?
        }
        Command::Fixtures { kind, name } => {
            let (setup, s) = mermin_peres_fixture();
            let document = match kind {
                FixtureKind::Strategy => serde_json::to_value(StrategyDoc::from_strategy(&s))?,
                FixtureKind::Setup => serde_json::to_value(SetupDoc::from_setup(&setup))?,
                FixtureKind::Scenario => {
                    let entries = catalog()?;
                    let key = name.as_deref().ok_or_else(|| {
                        let keys: Vec<&str> = entries.iter().map(|e| e.key).collect();
                        anyhow!(Error::Schema(format!("--name is required; one of {}", keys.join(", "))))
                    })?;
                    let entry = entries
                        .iter()
                        .find(|e| e.key == key)
                        .ok_or_else(|| anyhow!(Error::Schema(format!("no catalog entry {key}"))))?;
                    serde_json::to_value(ScenarioFile::from_expression(&entry.expression))?
                }
            };
            let mut r = Report::new("fixtures", Verdict::Positive, json!({ "document": document }))?;
            r.bare = true;
            r
        }
        Command::IndexSets { arity, side } => {
            let side = match side {
                SideArg::Alice => Side::Alice,
                SideArg::Bob => Side::Bob,
            };
            let fam = build_index_sets(*arity, side)?;
            let sets: Vec<_> = (0..*arity)
                .map(|j| json!({ "plus": fam.ordinals(Sign::Plus, j), "minus": fam.ordinals(Sign::Minus, j) }))
                .collect();
            let tuples: Vec<Vec<i64>> = fam.tuples().iter().map(|t| t.values()).collect();
            let bijection = check_recursion_matches_semantics(*arity, side)?;
            let result = json!({ "sets": sets, "tuples": tuples, "bijection": bijection });
            Report::new("index-sets", Verdict::from_bool(bijection.holds()), result)?
        }
    };
    Ok(report.with_explain(cli.explain))
}

/// 3 for numerical failures, 1 for imperfect integration inputs, else 2.
fn error_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(
            Error::NotAProjector { .. }
            | Error::NotNormalized(_)
            | Error::NonFinite
            | Error::NotUnitary(_)
            | Error::RealizationFailure(_)
            | Error::NotAPqss { .. },
        ) => 3,
        Some(Error::NotPerfectInput { .. }) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = run(&cli).and_then(|r| Ok((r.render(cli.format)?, r.verdict)));
    match outcome {
        Ok((text, verdict)) => {
            let written = match &cli.output {
                Some(path) => write_atomic(path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::from(verdict.exit_code()),
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(2)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}
