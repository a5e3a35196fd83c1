//! Plain-text file formats.
//!
//! Games and joint distributions share one layout: a `rows cols` header
//! followed by `rows` lines of `cols` whitespace-separated decimals. Lines
//! whose first non-blank character is `#` are comments; blank lines are
//! skipped. Line numbers in errors are 1-based physical lines.

use std::io::{self, Write};

use crate::equilibrium::JointDistribution;
use crate::error::{Error, Result};
use crate::game::Game;
use crate::learners::TrajectoryPoint;
use crate::tol;

pub const TRAJECTORY_HEADER: &str = "t,cce_eps,nash_eps,avg_row_payoff";

struct Matrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    // physical line of each data row
    lines: Vec<usize>,
}

fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut content = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = content.next().ok_or(Error::Parse {
        line: 1,
        message: "missing `rows cols` header".into(),
    })?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let parse_dim = |s: &str| -> Result<usize> {
        match s.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(Error::Parse {
                line: header_line,
                message: format!("invalid dimension `{s}`, expected a positive integer"),
            }),
        }
    };
    let [rows, cols] = dims[..] else {
        return Err(Error::Parse {
            line: header_line,
            message: format!("header must be `rows cols`, found `{header}`"),
        });
    };
    let (rows, cols) = (parse_dim(rows)?, parse_dim(cols)?);

    let mut values = Vec::with_capacity(rows * cols);
    let mut lines = Vec::with_capacity(rows);
    for (line, text) in content {
        if lines.len() == rows {
            return Err(Error::Parse {
                line,
                message: format!("unexpected content after {rows} data rows"),
            });
        }
        let mut count = 0;
        for token in text.split_whitespace() {
            let v: f64 = token.parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid number `{token}`"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("non-finite value `{token}`"),
                });
            }
            values.push(v);
            count += 1;
        }
        if count != cols {
            return Err(Error::Parse {
                line,
                message: format!("expected {cols} values, found {count}"),
            });
        }
        lines.push(line);
    }
    if lines.len() != rows {
        let last = text.lines().count().max(1);
        return Err(Error::Parse {
            line: last,
            message: format!("expected {rows} data rows, found {}", lines.len()),
        });
    }
    Ok(Matrix {
        rows,
        cols,
        values,
        lines,
    })
}

/// Parses a game file.
pub fn parse_game(text: &str) -> Result<Game> {
    let m = parse_matrix(text)?;
    Game::from_flat(m.rows, m.cols, m.values)
}

/// Serializes a game using the shortest decimal that reads back to the same
/// `f64`, so parsing the output is bit-exact.
pub fn write_game(game: &Game) -> String {
    write_matrix(game.rows(), game.cols(), game.payoffs())
}

/// Parses a joint distribution file. Masses must be nonnegative and sum to
/// one within [`tol::FILE_PROB_SUM`]; they are never renormalized.
pub fn parse_joint(text: &str) -> Result<JointDistribution> {
    let m = parse_matrix(text)?;
    for (i, &v) in m.values.iter().enumerate() {
        if v < 0.0 {
            return Err(Error::Parse {
                line: m.lines[i / m.cols],
                message: format!("negative mass {v} in column {}", i % m.cols),
            });
        }
    }
    let sum: f64 = m.values.iter().sum();
    if (sum - 1.0).abs() > tol::FILE_PROB_SUM {
        return Err(Error::InvalidDistribution(format!(
            "masses sum to {sum}, expected 1 within {}",
            tol::FILE_PROB_SUM
        )));
    }
    JointDistribution::with_sum_tolerance(m.rows, m.cols, m.values, tol::FILE_PROB_SUM)
}

pub fn write_joint(mu: &JointDistribution) -> String {
    write_matrix(mu.rows(), mu.cols(), mu.masses())
}

fn write_matrix(rows: usize, cols: usize, values: &[f64]) -> String {
    let mut out = format!("{rows} {cols}\n");
    for row in values.chunks(cols) {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Writes the trajectory as CSV with 16 significant digits per value.
pub fn write_trajectory_csv<W: Write>(mut out: W, trajectory: &[TrajectoryPoint]) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for p in trajectory {
        writeln!(
            out,
            "{},{:.15e},{:.15e},{:.15e}",
            p.t, p.cce_eps, p.nash_eps, p.avg_row_payoff
        )?;
    }
    Ok(())
}
