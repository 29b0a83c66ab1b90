//! `bellh`: build, evaluate and certify hierarchy inequalities, and
//! reproduce visibility threshold tables.
//!
//! Exit codes: 0 success, 1 findings (certification failures, no violation
//! at p = 1), 2 usage and parameter errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bell_hierarchy::quantum::StateFamily;

use config::ConfigFile;
use output::Format;

#[derive(Parser)]
#[command(name = "bellh", version)]
#[command(about = "Multipartite Bell-type inequality hierarchy toolkit")]
struct Cli {
    /// Flat `key = value` file supplying values for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads. Also read from BELLH_WORKERS.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed for sampling and optimizer restarts. Also read from BELLH_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write to this file (atomically) instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
pub struct ExprArgs {
    /// Number of parties.
    #[arg(long)]
    n: Option<usize>,
    /// Locality parameter, 2 <= m <= n.
    #[arg(long)]
    m: Option<usize>,
    /// Distinguished party (1-based), default 1.
    #[arg(long = "k-prime")]
    k_prime: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct OptimizerArgs {
    /// Grid points per angle.
    #[arg(long)]
    grid_resolution: Option<usize>,
    /// Evaluation cap per local refinement.
    #[arg(long)]
    refinement_rounds: Option<usize>,
    /// Compass step at which refinement stops.
    #[arg(long)]
    local_tolerance: Option<f64>,
    /// Grid points refined, and random starts added.
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the inequality for (n, m, k').
    Build {
        #[command(flatten)]
        expr: ExprArgs,
    },
    /// Evaluate the LHS on a noisy GHZ or W state. Without explicit
    /// angles, the symmetric optimum is searched for.
    Evaluate {
        #[command(flatten)]
        expr: ExprArgs,
        #[arg(long)]
        family: Option<StateFamily>,
        /// Visibility, default 1.
        #[arg(long)]
        p: Option<f64>,
        /// Comma-separated angles of setting a; one value applies to all parties.
        #[arg(long = "theta-a", value_delimiter = ',', allow_hyphen_values = true)]
        theta_a: Vec<f64>,
        /// Comma-separated angles of setting b.
        #[arg(long = "theta-b", value_delimiter = ',', allow_hyphen_values = true)]
        theta_b: Vec<f64>,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Check the bound on deterministic strategies (exhaustively) and on
    /// sampled nonsignaling m-local product models.
    Certify {
        #[command(flatten)]
        expr: ExprArgs,
        /// Sampled product models, default 10000.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Visibility threshold for one (n, m) cell.
    Threshold {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        family: Option<StateFamily>,
        /// Bisection bracket width, default 5e-4.
        #[arg(long)]
        tolerance: Option<f64>,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Threshold table rows for a list of party counts.
    Table {
        #[arg(long)]
        family: Option<StateFamily>,
        /// Comma-separated party counts.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long)]
        tolerance: Option<f64>,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
}

/// An error with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    pub fn finding(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<bell_hierarchy::Error> for Failure {
    fn from(e: bell_hierarchy::Error) -> Self {
        match e {
            bell_hierarchy::Error::NoViolation { .. } => Failure::finding(e.to_string()),
            other => Failure::usage(other.to_string()),
        }
    }
}

/// Settings shared by every command after merging flags, environment and
/// config file.
pub struct Run {
    pub seed: u64,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub file: ConfigFile,
}

fn env_value<T: std::str::FromStr>(name: &str) -> Result<Option<T>, Failure> {
    match std::env::var(name) {
        Err(_) => Ok(None),
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::usage(format!("{name}={v:?} is not a valid value"))),
    }
}

fn setup(cli: &Cli) -> Result<Run, Failure> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };

    let seed = match (cli.seed, env_value::<u64>("BELLH_SEED")?) {
        (Some(s), _) => s,
        (None, Some(s)) => {
            eprintln!("bellh: seed {s} from BELLH_SEED");
            s
        }
        (None, None) => match file.pick::<u64>(None, "seed")? {
            Some(s) => s,
            None => {
                eprintln!("bellh: no seed given, using 0");
                0
            }
        },
    };

    let workers = match (cli.workers, env_value::<usize>("BELLH_WORKERS")?) {
        (Some(w), _) => Some(w),
        (None, Some(w)) => {
            eprintln!("bellh: {w} workers from BELLH_WORKERS");
            Some(w)
        }
        (None, None) => file.pick::<usize>(None, "workers")?,
    };
    if let Some(w) = workers {
        if w == 0 {
            return Err(Failure::usage("--workers must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Failure::usage(format!("worker pool: {e}")))?;
    }

    Ok(Run {
        seed,
        format: file.pick(cli.format, "format")?,
        output: file.pick(cli.output.clone(), "output")?,
        file,
    })
}

fn dispatch(cli: Cli) -> Result<u8, Failure> {
    let run = setup(&cli)?;
    match cli.command {
        Command::Build { expr } => commands::build(&run, &expr),
        Command::Evaluate {
            expr,
            family,
            p,
            theta_a,
            theta_b,
            optimizer,
        } => commands::evaluate(&run, &expr, family, p, theta_a, theta_b, &optimizer),
        Command::Certify { expr, samples } => commands::certify(&run, &expr, samples),
        Command::Threshold {
            n,
            m,
            family,
            tolerance,
            optimizer,
        } => commands::threshold(&run, n, m, family, tolerance, &optimizer),
        Command::Table {
            family,
            n,
            tolerance,
            optimizer,
        } => commands::table(&run, family, n, tolerance, &optimizer),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("bellh: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
