use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fpf_cli::report::{failure_report, run_validation};
use fpf_cli::{parse_scenario_with, random::random_spec, run, CliError, Query, QueryKind, Report, Scenario};

#[derive(Parser)]
#[command(name = "fpf", version, about = "Measures of existence for fixed-point quantum histories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario's query and compare it with its oracle.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Override a tolerance, e.g. `--tol-override unitarity=1e-9`.
        #[arg(long = "tol-override", value_name = "K=V", value_parser = parse_override)]
        tol_override: Vec<(String, f64)>,
    },
    /// Load the scenario and check the propagator laws of its schedule.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Print a seeded random scenario.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        pieces: usize,
        #[arg(long, value_enum)]
        query: QueryKind,
    },
    /// Run a scenario whose query is a network and report its counts.
    Network {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected K=V, got '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value in '{s}': {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn load(path: &Path, overrides: &[(String, f64)]) -> Result<Scenario, CliError> {
    let bytes = std::fs::read(path)?;
    parse_scenario_with(&bytes, overrides)
}

/// Writes to stdout, ignoring a closed pipe.
fn write_out(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

fn emit(report: &Report, format: Format) {
    match format {
        Format::Json => write_out(&(report.to_json() + "\n")),
        Format::Table => write_out(&report.to_table()),
    }
}

fn fail(err: &CliError) -> ExitCode {
    eprintln!("{}", err.diagnostic_line());
    ExitCode::from(err.exit_code() as u8)
}

fn execute(scenario: &Scenario, format: Format, f: impl Fn(&Scenario) -> Result<Report, CliError>) -> ExitCode {
    match f(scenario) {
        Ok(report) => {
            emit(&report, format);
            ExitCode::SUCCESS
        }
        Err(err) => {
            emit(&failure_report(scenario, &err), format);
            fail(&err)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (file, overrides, format) = match cli.command {
        Command::Random { seed, dim, pieces, query } => {
            return match random_spec(seed, dim, pieces, query) {
                Ok(spec) => {
                    write_out(&(spec.to_json() + "\n"));
                    ExitCode::SUCCESS
                }
                Err(err) => fail(&err),
            };
        }
        Command::Run { ref file, format, ref tol_override } => (file.clone(), tol_override.clone(), format),
        Command::Validate { ref file, format } | Command::Network { ref file, format } => {
            (file.clone(), Vec::new(), format)
        }
    };
    let scenario = match load(&file, &overrides) {
        Ok(s) => s,
        Err(err) => return fail(&err),
    };
    match cli.command {
        Command::Validate { .. } => execute(&scenario, format, run_validation),
        Command::Network { .. } => {
            if !matches!(scenario.query, Query::Network { .. }) {
                return fail(&CliError::validation("query.kind", "`fpf network` needs a network query"));
            }
            execute(&scenario, format, run)
        }
        _ => execute(&scenario, format, run),
    }
}
