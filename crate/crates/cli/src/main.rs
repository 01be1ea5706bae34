//! `leakdpt`: command-line access to game values, partition bounds,
//! direct-product bound evaluators and the DIQKD simulator.
//!
//! Machine output goes to standard output (or `--out`), diagnostics to
//! standard error. Exit status: 0 success, 1 usage error, 2 computation error.

mod bounds_cmd;
mod diqkd_cmd;
mod dpt_cmd;
mod error;
mod game_cmd;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use error::CliError;
use output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "leakdpt",
    version,
    about = "Nonlocal games, partition bounds and leaky DIQKD"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct GlobalArgs {
    /// Seed for every random choice; runs with equal seeds are identical.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output format (default: csv for `diqkd sweep`, json otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write machine output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Game values and builtin games.
    #[command(subcommand)]
    Game(game_cmd::GameCommand),
    /// Partition bounds and γ₂-type bounds.
    #[command(subcommand)]
    Bounds(bounds_cmd::BoundsCommand),
    /// Direct-product bound evaluators and repetition probes.
    #[command(subcommand)]
    Dpt(dpt_cmd::DptCommand),
    /// DIQKD protocol simulation and key rates.
    #[command(subcommand)]
    Diqkd(diqkd_cmd::DiqkdCommand),
}

/// What a command produced: structured data, or preformatted text (CSV tables).
pub enum Output {
    Data(Value),
    Text(String),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    let out = match cli.command {
        Command::Game(c) => game_cmd::run(c, g)?,
        Command::Bounds(c) => bounds_cmd::run(c, g)?,
        Command::Dpt(c) => dpt_cmd::run(c, g)?,
        Command::Diqkd(c) => diqkd_cmd::run(c, g)?,
    };
    let text = match out {
        Output::Text(t) => t,
        Output::Data(v) => match g.format.unwrap_or(Format::Json) {
            Format::Json => output::to_json(&v),
            Format::Csv => output::to_csv(&v),
        },
    };
    output::emit(&text, g.out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Parses `"1,2;3,4"` (rows separated by `;`) into a row-major matrix.
pub fn parse_matrix(s: &str) -> Result<(usize, usize, Vec<f64>), CliError> {
    let rows: Vec<Vec<f64>> = s
        .split(';')
        .map(|r| {
            r.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::Usage(format!("bad matrix entry {x:?}: {e}")))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(CliError::Usage(format!(
            "matrix {s:?} must be rectangular and nonempty"
        )));
    }
    Ok((rows.len(), cols, rows.into_iter().flatten().collect()))
}
