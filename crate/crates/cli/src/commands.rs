use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use cce2nash::equilibrium::{cce_gap, marginal_profile, nash_gap, two_eps_check_with, value_consistency_check_with};
use cce2nash::format::{parse_game, parse_joint, write_game, write_trajectory_csv};
use cce2nash::learners::{self_play, Algorithm, Averaging, SelfPlayConfig};
use cce2nash::oracle::exact_value;
use cce2nash::sweep::{map_indices, random_game, Execution};
use cce2nash::Game;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::output::{json_to_csv, read, report_tolerance, write_atomic};
use crate::Format;

fn load_game(path: &Path) -> Result<Game> {
    parse_game(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn emit<T: Serialize>(report: &T, format: Format) -> Result<()> {
    let json = serde_json::to_value(report)?;
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&json)?),
        Format::Csv => print!("{}", json_to_csv(&json)),
    }
    Ok(())
}

/// Game `index` of seed `seed` uses ChaCha8 seeded with `seed` on stream
/// `index`, so files do not depend on generation order.
pub fn gen(rows: usize, cols: usize, count: usize, seed: u64, out: &Path) -> Result<ExitCode> {
    if rows == 0 || cols == 0 || count == 0 {
        bail!("rows, cols and count must be at least 1");
    }
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let results = map_indices(count, Execution::default(), |index| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let game = random_game(&mut rng, rows, cols);
        let path = out.join(format!("game_{seed}_{index}.txt"));
        write_atomic(&path, write_game(&game).as_bytes()).map(|_| path)
    });
    for path in results {
        println!("{}", path?.display());
    }
    Ok(ExitCode::SUCCESS)
}

pub struct LearnArgs {
    pub game: PathBuf,
    pub algo: Algorithm,
    pub iters: u64,
    pub seed: u64,
    pub averaging: Averaging,
    pub log_every: u64,
    pub out: PathBuf,
    pub format: Format,
}

#[derive(Debug, Serialize)]
pub struct LearnSummary {
    pub algo: Algorithm,
    pub iters: u64,
    pub seed: u64,
    pub averaging: Averaging,
    pub rows: usize,
    pub cols: usize,
    pub cce_eps: f64,
    pub nash_eps: f64,
    /// `nash_eps / max(cce_eps, 1e-15)`
    pub ratio: f64,
    pub holds_2eps: bool,
    pub avg_row_payoff: f64,
    pub oracle_value: f64,
    pub tolerance: f64,
}

pub fn learn(args: &LearnArgs) -> Result<ExitCode> {
    let game = load_game(&args.game)?;
    let tolerance = report_tolerance()?;
    let config = SelfPlayConfig::new(args.algo, args.iters)
        .seed(args.seed)
        .averaging(args.averaging)
        .log_every(args.log_every);
    let result = self_play(&game, &config)?;
    let last = *result.last();
    let oracle = exact_value(&game)?;

    let summary = LearnSummary {
        algo: args.algo,
        iters: args.iters,
        seed: args.seed,
        averaging: args.averaging,
        rows: game.rows(),
        cols: game.cols(),
        cce_eps: last.cce_eps,
        nash_eps: last.nash_eps,
        ratio: last.nash_eps / last.cce_eps.max(1e-15),
        holds_2eps: result
            .trajectory
            .iter()
            .all(|p| p.nash_eps <= 2.0 * p.cce_eps + tolerance),
        avg_row_payoff: last.avg_row_payoff,
        oracle_value: oracle.value,
        tolerance,
    };

    std::fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let mut csv = Vec::new();
    write_trajectory_csv(&mut csv, &result.trajectory)?;
    write_atomic(&args.out.join("trajectory.csv"), &csv)?;
    let mut json = serde_json::to_vec_pretty(&summary)?;
    json.push(b'\n');
    write_atomic(&args.out.join("summary.json"), &json)?;

    emit(&summary, args.format)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct CheckReport {
    rows: usize,
    cols: usize,
    tolerance: f64,
    cce: cce2nash::GapReport,
    nash_of_marginals: cce2nash::GapReport,
    value_consistency: cce2nash::ValueConsistency,
    two_eps: cce2nash::TwoEpsCheck,
    holds: bool,
}

pub fn check(game_path: &Path, joint_path: &Path, format: Format) -> Result<ExitCode> {
    let game = load_game(game_path)?;
    let joint = parse_joint(&read(joint_path)?).with_context(|| format!("{}", joint_path.display()))?;
    if (joint.rows(), joint.cols()) != (game.rows(), game.cols()) {
        bail!(
            "shape mismatch: game {} is {}x{} but joint distribution {} is {}x{}",
            game_path.display(),
            game.rows(),
            game.cols(),
            joint_path.display(),
            joint.rows(),
            joint.cols()
        );
    }
    let tolerance = report_tolerance()?;
    let value_consistency = value_consistency_check_with(&joint, &game, tolerance)?;
    let two_eps = two_eps_check_with(&joint, &game, tolerance)?;
    let report = CheckReport {
        rows: game.rows(),
        cols: game.cols(),
        tolerance,
        cce: cce_gap(&joint, &game)?,
        nash_of_marginals: nash_gap(&marginal_profile(&joint), &game)?,
        value_consistency,
        two_eps,
        holds: value_consistency.holds && two_eps.holds,
    };
    emit(&report, format)?;
    Ok(if report.holds { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

#[derive(Debug, Serialize)]
struct ValueReport {
    value: f64,
    row_strategy: cce2nash::MixedStrategy,
    col_strategy: cce2nash::MixedStrategy,
}

pub fn value(game_path: &Path, format: Format) -> Result<ExitCode> {
    let game = load_game(game_path)?;
    let sol = exact_value(&game)?;
    let report = ValueReport {
        value: sol.value,
        row_strategy: sol.row_strategy,
        col_strategy: sol.col_strategy,
    };
    match format {
        Format::Json => emit(&report, format)?,
        Format::Csv => {
            let join = |s: &cce2nash::MixedStrategy| s.probs().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
            println!("value,{}", report.value);
            println!("row_strategy,{}", join(&report.row_strategy));
            println!("col_strategy,{}", join(&report.col_strategy));
        }
    }
    Ok(ExitCode::SUCCESS)
}
