use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use orbicone::commands::{self, Options};
use orbicone::report::envelope;
use orbicone::spec::{parse_point, ActionSpecFile, GroupSpecFile, Input};
use orbicone::CliError;
use orbicone_core::reflection::DEFAULT_CONJUGACY_BUDGET;
use orbicone_core::strata::{TorusDistanceOptions, DEFAULT_MAX_PLANES};

/// Analysis of torus quotients of Euclidean space and finite orthogonal groups.
///
/// Exit codes: 0 ok, 1 output not writable, 2 invalid spec, 3 resource bound
/// exceeded, 4 numerical degeneracy.
#[derive(Parser)]
#[command(name = "orbicone", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Frobenius tolerance for identifying group elements.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Largest number of planes for stratum enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_PLANES)]
    max_planes: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Split verdict, strata, singular set, curvature witness and reduction.
    Analyze {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Curvature scan along the spec's ray, as CSV.
    Curvature {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Strata table and singular-set dimension.
    Strata {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Local reduction of a split action.
    Reduce {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Reflections and chambers of a finite group.
    Reflect {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Conjugacy of two finite groups.
    Conjugacy {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        against: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CONJUGACY_BUDGET)]
        budget: usize,
    },
    /// Quotient distance between two points, given as comma-separated coordinates.
    Distance {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value_t = 40)]
        refinements: usize,
        /// Largest accepted certified gap.
        #[arg(long, default_value_t = 1e-7)]
        gap_tol: f64,
    },
}

fn load_action(path: &Path) -> Result<(Input, ActionSpecFile), CliError> {
    let input = Input::read(path)?;
    let spec: ActionSpecFile = input.parse()?;
    spec.validate()?;
    Ok((input, spec))
}

fn load_group(path: &Path) -> Result<(Input, GroupSpecFile), CliError> {
    let input = Input::read(path)?;
    let spec = input.parse()?;
    Ok((input, spec))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json(out: Option<&Path>, name: &str, hash: &str, body: serde_json::Value, start: Instant) -> Result<(), CliError> {
    let doc = envelope(name, hash, body, start.elapsed());
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    emit(out, &text)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let opts = Options {
        tol: cli.tol,
        max_planes: cli.max_planes,
    };
    let out = cli.out.as_deref();
    match cli.command {
        Command::Analyze { spec } => {
            let (input, spec) = load_action(&spec)?;
            emit_json(out, "analyze", &input.sha256, commands::analyze(&spec, &opts)?, start)
        }
        Command::Strata { spec } => {
            let (input, spec) = load_action(&spec)?;
            emit_json(out, "strata", &input.sha256, commands::strata(&spec, &opts)?, start)
        }
        Command::Reduce { spec } => {
            let (input, spec) = load_action(&spec)?;
            emit_json(out, "reduce", &input.sha256, commands::reduce(&spec)?, start)
        }
        Command::Curvature { spec } => {
            let (_, spec) = load_action(&spec)?;
            let (csv, failure) = commands::curvature(&spec)?;
            emit(out, &csv)?;
            failure.map_or(Ok(()), Err)
        }
        Command::Reflect { spec } => {
            let (input, spec) = load_group(&spec)?;
            emit_json(out, "reflect", &input.sha256, commands::reflect(&spec, &opts)?, start)
        }
        Command::Conjugacy { spec, against, budget } => {
            let (a_in, a) = load_group(&spec)?;
            let (b_in, b) = load_group(&against)?;
            let hash = format!("{}+{}", a_in.sha256, b_in.sha256);
            emit_json(out, "conjugacy", &hash, commands::conjugacy(&a, &b, budget, &opts)?, start)
        }
        Command::Distance { spec, x, y, grid, refinements, gap_tol } => {
            let (input, spec) = load_action(&spec)?;
            let m = spec.ambient_dim();
            let (x, y) = (parse_point(&x, m)?, parse_point(&y, m)?);
            let dopts = TorusDistanceOptions {
                grid,
                refinements,
                tol: gap_tol,
                ..TorusDistanceOptions::default()
            };
            let body = commands::distance(&spec, &x, &y, &dopts, &opts)?;
            emit_json(out, "distance", &input.sha256, body, start)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
