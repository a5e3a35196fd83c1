//! `cce2nash`: generate matrix games, run no-regret self-play, check joint
//! distributions against the CCE-to-Nash bounds, and solve games exactly.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use cce2nash::learners::{Algorithm, Averaging};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cce2nash", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write random games with payoffs uniform on [-1, 1].
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        rows: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        cols: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run self-play on a game and report convergence to CCE and Nash.
    Learn {
        #[arg(long)]
        game: PathBuf,
        #[arg(long, default_value = "rm", value_parser = parse_algorithm)]
        algo: Algorithm,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        iters: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "expected", value_parser = parse_averaging)]
        averaging: Averaging,
        /// Checkpoint interval; 0 records only the final iteration.
        #[arg(long, default_value_t = 1000)]
        log_every: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check a joint distribution; exits 0 iff both bounds hold.
    Check {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        joint: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Solve a game exactly by linear programming.
    Value {
        #[arg(long)]
        game: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: cce2nash::Error| e.to_string())
}

fn parse_averaging(s: &str) -> Result<Averaging, String> {
    s.parse().map_err(|e: cce2nash::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen {
            rows,
            cols,
            count,
            seed,
            out,
        } => commands::gen(rows as usize, cols as usize, count as usize, seed, &out),
        Command::Learn {
            game,
            algo,
            iters,
            seed,
            averaging,
            log_every,
            out,
            format,
        } => commands::learn(&commands::LearnArgs {
            game,
            algo,
            iters,
            seed,
            averaging,
            log_every,
            out,
            format,
        }),
        Command::Check { game, joint, format } => commands::check(&game, &joint, format),
        Command::Value { game, format } => commands::value(&game, format),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
