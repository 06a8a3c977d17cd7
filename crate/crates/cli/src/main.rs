mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Usage = 1,
    Validation = 2,
    Numerical = 3,
}

#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Failure {
            status: Status::Validation,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Failure {
            status: Status::Numerical,
            message: message.into(),
        }
    }
}

impl From<isohyp_core::Error> for Failure {
    fn from(e: isohyp_core::Error) -> Self {
        use isohyp_core::Error::*;
        let status = match e {
            OpenTrajectory(_) | Numerical(_) => Status::Numerical,
            _ => Status::Validation,
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;

#[derive(Parser, Debug)]
#[command(
    name = "isohyp",
    version,
    about = "Weighted isoperimetric experiments in hyperbolic space"
)]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = "ISOHYP_JOBS")]
    jobs: Option<usize>,

    /// JSON object whose keys override the subcommand's flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Isoperimetric profile of centered balls: CSV of (v, tau, Pf).
    Profile(commands::ProfileArgs),
    /// Integrate a generating curve and classify it.
    Shoot(commands::ShootArgs),
    /// Run the randomized lemma suites.
    Verify(commands::VerifyArgs),
    /// Minimize weighted perimeter at fixed volume over polar profiles.
    Minimize(commands::MinimizeArgs),
    /// Compare ball quantities in rank-one symmetric spaces with the weighted model.
    Hopf(commands::HopfArgs),
}

fn run(cli: Cli) -> CliResult<()> {
    let overrides = match &cli.config {
        Some(path) => Some(config::load(path)?),
        None => None,
    };
    let jobs = config::jobs(cli.jobs, overrides.as_ref())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::numerical(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Profile(a) => commands::profile(config::merge(a, overrides)?),
        Command::Shoot(a) => commands::shoot(config::merge(a, overrides)?),
        Command::Verify(a) => commands::verify(config::merge(a, overrides)?),
        Command::Minimize(a) => commands::minimize(config::merge(a, overrides)?),
        Command::Hopf(a) => commands::hopf(config::merge(a, overrides)?),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(Status::Usage as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status as u8)
        }
    }
}
