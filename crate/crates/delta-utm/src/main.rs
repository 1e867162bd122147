use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use delta_utm::commands::{self, CompareOptions, Outcome};
use delta_utm::RunConfig;

/// Point-interaction Schrödinger solver: transform representation, reference
/// finite differences and diagnostics.
#[derive(Parser)]
#[command(name = "delta-utm", version)]
struct Cli {
    /// Exit with status 2 when a tolerance check fails.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML run configuration; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Setting overrides, `--name value` with `name` a field or dotted path.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "OVERRIDES")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the transform solution on the grid.
    Solve(ConfigArgs),
    /// Run the Crank–Nicolson reference solver.
    Oracle(ConfigArgs),
    /// Compare two field CSV files; the second is the reference.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "compare.json")]
        report: PathBuf,
        #[arg(long, default_value = "compare.csv")]
        table: PathBuf,
        /// Largest acceptable relative L∞ difference.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Long-time decay and bound-state extraction.
    Asymptotics(ConfigArgs),
    /// Interface jump and global-relation residuals.
    Diagnose(ConfigArgs),
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let load = |a: &ConfigArgs| RunConfig::resolve(a.config.as_deref(), &a.overrides);
    match &cli.command {
        Command::Solve(a) => commands::run_solve(&load(a)?),
        Command::Oracle(a) => commands::run_oracle(&load(a)?),
        Command::Asymptotics(a) => commands::run_asymptotics(&load(a)?),
        Command::Diagnose(a) => commands::run_diagnose(&load(a)?),
        Command::Compare { a, b, report, table, tolerance } => {
            let opts = CompareOptions { report: report.clone(), table: table.clone(), tolerance: *tolerance };
            commands::run_compare(a, b, &opts)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            for v in &outcome.violations {
                println!("tolerance check failed: {v}");
            }
            if cli.strict && !outcome.violations.is_empty() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
