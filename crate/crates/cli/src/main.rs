use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod input;
mod report;

use commands::CommandOutput;
use error::CliResult;
use report::Format;

/// Slope estimation for data with errors in both coordinates.
#[derive(Debug, Parser)]
#[command(name = "obliq", version)]
struct Cli {
    /// Print timing and progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit every estimator to a CSV file with columns `x` and `y`.
    Fit {
        data: PathBuf,
        /// Assumed error-variance ratio sigma_tau^2 / sigma_delta^2 for the
        /// likelihood slope. Defaults to the moment estimate.
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Run a Monte Carlo study described by a `key = value` config file.
    Simulate {
        config: PathBuf,
        /// Master seed; overrides the config file and OBLIQ_SEED.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Regenerate comparison tables, e.g. `1,4,6`, `1-4` or `all`.
    Tables {
        ids: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    let start = Instant::now();
    let (output, format, out): (CommandOutput, Format, Option<PathBuf>) = match cli.command {
        Command::Fit {
            data,
            kappa,
            out,
            format,
        } => (commands::fit(&data, kappa)?, format, out),
        Command::Simulate {
            config,
            seed,
            out,
            format,
        } => (commands::simulate(&config, seed)?, format, out),
        Command::Tables { ids, out, format } => {
            let ids = commands::parse_table_ids(&ids)?;
            (commands::tables_command(&ids)?, format, out)
        }
    };
    report::emit(&output.tables, format, out.as_deref())?;
    if cli.verbose {
        eprintln!(
            "wrote {} table(s) in {:.2}s",
            output.tables.len(),
            start.elapsed().as_secs_f64()
        );
    }
    match output.deferred {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("obliq: {}", e);
            e.exit_code()
        }
    }
}
