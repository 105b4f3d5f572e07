//! `containment-ref`: validate, simulate and report on containment scenarios.
//!
//! Exit codes: 0 success, 2 validation or verification failure, 3 runtime
//! divergence, 64 usage or parse error, 74 output could not be written.

pub mod commands;
pub mod output;
pub mod verdict;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    cmd_margins, cmd_run, cmd_sweep, cmd_validate, CliError, ExitStatus, MarginsEntry, MarginsReport, RunOptions,
    SweepParam, SweepRow,
};
pub use verdict::{GainCondition, Verdict};

#[derive(Debug, Parser)]
#[command(name = "containment-ref", version, about = "Distributed containment reference generator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario JSON file.
    pub config: PathBuf,
    /// Output directory (`run`: defaults to `out`; `sweep`: also writes sweep.csv there).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Containment-error tolerance for the reported convergence time.
    #[arg(long, default_value_t = commands::DEFAULT_TOL)]
    pub tol: f64,
    /// Tolerance for the final point-in-hull check.
    #[arg(long, default_value_t = commands::DEFAULT_CONTAIN_TOL)]
    pub contain_tol: f64,
    /// Overrides the scenario's seed for random initial states.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulate even when validation fails.
    #[arg(long)]
    pub override_validation: bool,
}

impl CommonArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            tol: self.tol,
            contain_tol: self.contain_tol,
            seed: self.seed,
            override_validation: self.override_validation,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check assumptions and the gain condition without simulating.
    Validate(CommonArgs),
    /// Simulate and write trajectories.csv, diagnostics.csv, verdict.json.
    Run(CommonArgs),
    /// Print hull margins and hull vertices as JSON.
    Margins {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated μ values to report instead of the file's μ.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        mu_sweep: Option<Vec<f64>>,
    },
    /// Re-run the scenario for each value of one parameter; prints a CSV table.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_parser = clap::value_parser!(SweepParam))]
        param: SweepParam,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
    },
}

impl clap::builder::ValueParserFactory for SweepParam {
    type Parser = fn(&str) -> Result<SweepParam, String>;

    fn value_parser() -> Self::Parser {
        |s| s.parse()
    }
}

/// Parses `args` (including the program name) and executes the command,
/// returning the process exit code.
pub fn run_cli<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => ExitStatus::Usage.code(),
            };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(status) => status.code(),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_status().code()
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<ExitStatus, CliError> {
    match command {
        Command::Validate(a) => {
            let (verdict, status) = cmd_validate(&a.config, &a.options())?;
            writeln!(stdout, "{}", verdict.to_json())?;
            Ok(status)
        }
        Command::Run(a) => {
            let (verdict, status) = cmd_run(&a.config, a.out.as_deref().unwrap_or("out".as_ref()), &a.options())?;
            writeln!(stdout, "{}", verdict.to_json())?;
            Ok(status)
        }
        Command::Margins { common, mu_sweep } => {
            let (report, status) = cmd_margins(&common.config, mu_sweep.as_deref())?;
            writeln!(stdout, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
            Ok(status)
        }
        Command::Sweep { common, param, values } => {
            let (rows, status) = cmd_sweep(&common.config, param, &values, &common.options())?;
            let table = commands::sweep_csv(param, &rows);
            write!(stdout, "{table}")?;
            if let Some(dir) = &common.out {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("sweep.csv"), &table)?;
            }
            Ok(status)
        }
    }
}
