//! `tame-opt`: linear optimization over compact convex semi-algebraic
//! bodies with identifiability diagnostics.
//!
//! Exit codes: 0 success, 1 input error, 2 convergence error, 3 verdict
//! not identifiable (only under `--expect identifiable`).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tame_opt_core::body::{fixture, ConvexBody, FixtureId};
use tame_opt_core::error::Error as CoreError;
use tame_opt_core::harness::{diagnose, path_probe, survey, DiagnoseOptions, Overall, PathOptions};
use tame_opt_core::solver::{maximize_linear, SolverOptions};
use tame_opt_lab::{format, parallel};

#[derive(Parser)]
#[command(
    name = "tame-opt",
    version,
    about = "Linear optimization over compact convex semi-algebraic sets with identifiability diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Maximize a linear objective over a body.
    Solve(SolveArgs),
    /// Run the full identifiability pipeline for one objective.
    Diagnose(DiagnoseArgs),
    /// Diagnose many seeded sphere directions and aggregate.
    Survey(SurveyArgs),
    /// Walk a great circle of objectives and flag solution jumps.
    Probe(ProbeArgs),
    /// List or dump the built-in fixture bodies.
    Fixtures(FixturesArgs),
}

#[derive(Args)]
struct BodySel {
    /// Built-in fixture name (ball, box, simplex, ridge, nc_fail,
    /// bad_square).
    #[arg(long, conflicts_with = "body")]
    fixture: Option<String>,
    /// Body document (JSON file).
    #[arg(long)]
    body: Option<PathBuf>,
}

#[derive(Args)]
struct SolverFlags {
    /// Duality-gap target.
    #[arg(long)]
    gap: Option<f64>,
    /// Newton iteration cap per barrier stage.
    #[arg(long)]
    max_iters: Option<usize>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    body: BodySel,
    /// Objective vector, comma-separated (e.g. `--c 0,0,-1`).
    #[arg(long)]
    c: String,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    body: BodySel,
    #[arg(long)]
    c: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample count for the global decay estimate.
    #[arg(long, default_value_t = 300)]
    samples: usize,
    /// Also compute the two-route sensitivity Jacobians.
    #[arg(long)]
    sens: bool,
    /// Fail (exit 3) unless the verdict matches; only `identifiable` is
    /// meaningful.
    #[arg(long)]
    expect: Option<String>,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SurveyArgs {
    #[command(flatten)]
    body: BodySel,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// `json` or `csv`.
    #[arg(long, default_value = "json")]
    format: String,
    /// Fan samples out over threads (output is identical to serial).
    #[arg(long)]
    parallel: bool,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProbeArgs {
    #[command(flatten)]
    body: BodySel,
    /// Start objective, comma-separated.
    #[arg(long)]
    from: String,
    /// End objective, comma-separated.
    #[arg(long)]
    to: String,
    #[arg(long, default_value_t = 101)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Decay sample count per step.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FixturesArgs {
    #[command(subcommand)]
    action: FixturesCmd,
}

#[derive(Subcommand)]
enum FixturesCmd {
    /// Print the fixture names.
    List,
    /// Print a fixture's body document.
    Dump {
        #[arg(long)]
        fixture: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::Convergence(_)
            | CoreError::NoInterior { .. }
            | CoreError::Singular { .. }
            | CoreError::WalkDiverged { .. }
            | CoreError::Sampling { .. }
            | CoreError::SecondOrderDegenerate { .. } => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure {
            code: 1,
            message: format!("{e:#}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Solve(a) => {
            let body = load_body(&a.body)?;
            let c = parse_vector(&a.c, body.n())?;
            let r = maximize_linear(&body, &c, &solver_options(&a.solver))?;
            emit(&format::solve_document(&r).to_string(), a.out.as_deref())
        }
        Cmd::Diagnose(a) => {
            if let Some(e) = &a.expect {
                if e != "identifiable" {
                    return Err(Failure::input("--expect only accepts `identifiable`"));
                }
            }
            let body = load_body(&a.body)?;
            let c = parse_vector(&a.c, body.n())?;
            let mut opts = DiagnoseOptions::default();
            opts.solver = solver_options(&a.solver);
            opts.seed = a.seed;
            opts.decay_count = a.samples;
            opts.with_sensitivity = a.sens;
            let rep = diagnose(&body, &c, &opts);
            emit(
                &format::diagnosis_document(&rep).to_string(),
                a.out.as_deref(),
            )?;
            if a.expect.is_some() && rep.overall != Overall::Identifiable {
                return Err(Failure {
                    code: 3,
                    message: format!(
                        "verdict {} (failing: {})",
                        rep.overall.name(),
                        rep.failing.map_or("-", |f| f.name())
                    ),
                });
            }
            Ok(())
        }
        Cmd::Survey(a) => {
            let body = load_body(&a.body)?;
            let mut opts = DiagnoseOptions::default();
            opts.solver = solver_options(&a.solver);
            let stats = if a.parallel {
                parallel::survey_parallel(&body, a.samples, a.seed, &opts)
            } else {
                survey(&body, a.samples, a.seed, &opts)
            };
            let text = match a.format.as_str() {
                "json" => format::survey_document(&stats).to_string(),
                "csv" => format::survey_csv(&stats, body.n()),
                other => return Err(Failure::input(format!("unknown format `{other}`"))),
            };
            emit(&text, a.out.as_deref())
        }
        Cmd::Probe(a) => {
            let body = load_body(&a.body)?;
            let from = parse_vector(&a.from, body.n())?;
            let to = parse_vector(&a.to, body.n())?;
            let mut opts = PathOptions::default();
            opts.solver = solver_options(&a.solver);
            opts.seed = a.seed;
            opts.decay_count = a.samples;
            let probe = path_probe(&body, &from, &to, a.steps, &opts)?;
            emit(&format::path_document(&probe).to_string(), a.out.as_deref())
        }
        Cmd::Fixtures(a) => match a.action {
            FixturesCmd::List => {
                let names: Vec<&str> = FixtureId::ALL.iter().map(|f| f.name()).collect();
                emit(&names.join("\n"), None)
            }
            FixturesCmd::Dump { fixture: name, out } => {
                let id = FixtureId::parse(&name)?;
                let doc = format::body_document(&fixture(id));
                emit(
                    &serde_json::to_string_pretty(&doc).expect("valid json"),
                    out.as_deref(),
                )
            }
        },
    }
}

fn load_body(sel: &BodySel) -> Result<ConvexBody, Failure> {
    match (&sel.fixture, &sel.body) {
        (Some(name), None) => Ok(fixture(FixtureId::parse(name)?)),
        (None, Some(path)) => Ok(format::parse_body_file(path)?),
        _ => Err(Failure::input("choose exactly one of --fixture or --body")),
    }
}

fn parse_vector(text: &str, n: usize) -> Result<Vec<f64>, Failure> {
    let v: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let v = v.map_err(|e| Failure::input(format!("cannot parse vector `{text}`: {e}")))?;
    if v.len() != n {
        return Err(Failure::input(format!(
            "vector `{text}` has {} entries, body dimension is {n}",
            v.len()
        )));
    }
    Ok(v)
}

fn solver_options(flags: &SolverFlags) -> SolverOptions {
    let mut opts = SolverOptions::default();
    if let Some(gap) = flags.gap {
        opts.gap_target = gap;
    }
    if let Some(iters) = flags.max_iters {
        opts.max_newton_iters = iters;
    }
    opts
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text.as_bytes())
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
