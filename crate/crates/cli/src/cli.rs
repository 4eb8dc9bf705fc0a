//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use caplab_core::capacity;
use clap::{Args, Parser, Subcommand};

use crate::run::{self, Format, RunManifest};
use crate::suites::{Settings, Suite, TABLE_DIMENSIONS};
use crate::walkthrough;
use crate::{CliError, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(name = "caplab", version, about = "Numerical checks for finite-capacity state spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one or more verification suites.
    Verify(VerifyArgs),
    /// Bit-budget utilities.
    Capacity {
        #[command(subcommand)]
        command: CapacityCommand,
    },
    /// Print the qutrit walkthrough.
    Walkthrough {
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CapacityCommand {
    /// Storage-budget table as CSV.
    Table {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Capacities to tabulate.
        #[arg(long, value_delimiter = ',', default_values_t = TABLE_DIMENSIONS)]
        n: Vec<u64>,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum, required = true)]
    pub suites: Vec<Suite>,
    /// Restrict dimension sweeps to this N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of contexts for bit budgets.
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Extra exponent for the Born residual.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Record wall-clock runtime per check.
    #[arg(long)]
    pub timings: bool,
    #[arg(long, hide = true)]
    pub inject_failure: bool,
}

impl VerifyArgs {
    pub fn manifest(&self) -> RunManifest {
        RunManifest {
            seed: self.seed,
            suites: self.suites.clone(),
            out: self.out.clone(),
            format: self.format,
            settings: Settings { n: self.n, m: self.m, samples: self.samples, alpha: self.alpha },
            timings: self.timings,
            inject_failure: self.inject_failure,
        }
    }
}

fn verify(args: &VerifyArgs) -> Result<u8, CliError> {
    let manifest = args.manifest();
    let outcome = run::run_suite(&manifest)?;
    run::write_outcome(&manifest, &outcome)?;
    let failed: Vec<_> = outcome.failures().collect();
    eprintln!("{} checks, {} failed", outcome.reports.len(), failed.len());
    for r in &failed {
        eprintln!("{r}");
    }
    Ok(if failed.is_empty() { EXIT_PASS } else { EXIT_FAIL })
}

fn capacity_table(out: Option<&PathBuf>, ns: &[u64]) -> Result<u8, CliError> {
    let rows = capacity::deficit_table(ns)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io {
        path: PathBuf::from("<buffer>"),
        source: e.into_error(),
    })?;
    match out {
        Some(path) => run::write_file(path, &bytes)?,
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?,
    }
    Ok(EXIT_PASS)
}

fn walkthrough(out: Option<&PathBuf>) -> Result<u8, CliError> {
    let w = walkthrough::qutrit_walkthrough()?;
    for line in &w.lines {
        println!("{line}");
    }
    let bytes = run::render_reports(&w.reports, Format::Json)?;
    match out {
        Some(path) => run::write_file(path, &bytes)?,
        None => {
            println!();
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
        }
    }
    Ok(if w.reports.iter().all(|r| r.pass) { EXIT_PASS } else { EXIT_FAIL })
}

pub fn dispatch(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Verify(args) => verify(args),
        Command::Capacity { command: CapacityCommand::Table { out, n } } => capacity_table(out.as_ref(), n),
        Command::Walkthrough { out } => walkthrough(out.as_ref()),
    }
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS });
        }
    };
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
