//! Two-player zero-sum matrix games, mixed strategies and utility evaluation.
//!
//! A [`Game`] stores only the row player's payoff matrix; the column player's
//! utility at every cell is its negation, so the zero-sum identity holds by
//! construction. Constant-sum games are accepted through
//! [`Game::from_constant_sum`], which shifts both players by half the constant.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// One of the two players.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Row,
    Col,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::Row, Player::Col];

    pub fn opponent(self) -> Player {
        match self {
            Player::Row => Player::Col,
            Player::Col => Player::Row,
        }
    }

    /// `+1` for the row player, `-1` for the column player.
    pub fn sign(self) -> f64 {
        match self {
            Player::Row => 1.0,
            Player::Col => -1.0,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Row => f.write_str("row"),
            Player::Col => f.write_str("col"),
        }
    }
}

/// A value held for each player.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PerPlayer<T> {
    pub row: T,
    pub col: T,
}

impl<T> PerPlayer<T> {
    pub fn new(row: T, col: T) -> Self {
        PerPlayer { row, col }
    }

    pub fn from_fn(mut f: impl FnMut(Player) -> T) -> Self {
        PerPlayer {
            row: f(Player::Row),
            col: f(Player::Col),
        }
    }
}

impl<T> Index<Player> for PerPlayer<T> {
    type Output = T;

    fn index(&self, player: Player) -> &T {
        match player {
            Player::Row => &self.row,
            Player::Col => &self.col,
        }
    }
}

impl<T> IndexMut<Player> for PerPlayer<T> {
    fn index_mut(&mut self, player: Player) -> &mut T {
        match player {
            Player::Row => &mut self.row,
            Player::Col => &mut self.col,
        }
    }
}

/// A two-player zero-sum game in matrix form.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    rows: usize,
    cols: usize,
    // row-major, row player's utility
    payoff: Vec<f64>,
    offset: f64,
}

impl Game {
    /// Builds a zero-sum game from the row player's payoff matrix.
    pub fn zero_sum<R: AsRef<[f64]>>(payoff: &[R]) -> Result<Game> {
        let (rows, cols, flat) = flatten(payoff)?;
        Game::from_flat(rows, cols, flat)
    }

    /// Builds a zero-sum game from a row-major payoff vector.
    pub fn from_flat(rows: usize, cols: usize, payoff: Vec<f64>) -> Result<Game> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if payoff.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "payoff matrix",
                expected: format!("{} entries", rows * cols),
                found: format!("{} entries", payoff.len()),
            });
        }
        if let Some(i) = payoff.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: i / cols,
                col: i % cols,
                value: payoff[i],
            });
        }
        Ok(Game {
            rows,
            cols,
            payoff,
            offset: 0.0,
        })
    }

    /// Normalizes a constant-sum bimatrix game to zero-sum.
    ///
    /// With `row + col = c0` at every cell, each player's utility is shifted
    /// down by `c0 / 2`. The shift is kept as [`Game::offset`] so original
    /// payoffs can be recovered as `offset + utility`.
    pub fn from_constant_sum<R: AsRef<[f64]>>(payoff_row: &[R], payoff_col: &[R]) -> Result<Game> {
        let (rows, cols, row_flat) = flatten(payoff_row)?;
        let (col_rows, col_cols, col_flat) = flatten(payoff_col)?;
        if (rows, cols) != (col_rows, col_cols) {
            return Err(Error::DimensionMismatch {
                what: "column player's payoff matrix",
                expected: format!("{rows}x{cols}"),
                found: format!("{col_rows}x{col_cols}"),
            });
        }
        for (i, v) in col_flat.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: i / cols,
                    col: i % cols,
                    value: *v,
                });
            }
        }
        let mut game = Game::from_flat(rows, cols, row_flat)?;
        let c0 = game.payoff[0] + col_flat[0];
        for (i, (a, b)) in game.payoff.iter().zip(&col_flat).enumerate() {
            let sum = a + b;
            if (sum - c0).abs() > tol::CONSTANT_SUM {
                return Err(Error::NotConstantSum {
                    first: (0, 0, c0),
                    second: (i / cols, i % cols, sum),
                });
            }
        }
        let half = c0 / 2.0;
        for v in &mut game.payoff {
            *v -= half;
        }
        game.offset = half;
        Ok(game)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Constant subtracted from each player's utility during normalization.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Number of pure strategies available to `player`.
    pub fn num_actions(&self, player: Player) -> usize {
        match player {
            Player::Row => self.rows,
            Player::Col => self.cols,
        }
    }

    /// Row-major row player payoffs.
    pub fn payoffs(&self) -> &[f64] {
        &self.payoff
    }

    pub fn payoff_row(&self, r: usize) -> &[f64] {
        &self.payoff[r * self.cols..(r + 1) * self.cols]
    }

    /// Largest minus smallest payoff entry.
    pub fn payoff_range(&self) -> f64 {
        let (lo, hi) = self
            .payoff
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        hi - lo
    }

    /// `u_player(r, c)` without bounds reporting. Panics if out of range.
    #[inline]
    pub fn utility(&self, player: Player, r: usize, c: usize) -> f64 {
        debug_assert!(r < self.rows && c < self.cols);
        player.sign() * self.payoff[r * self.cols + c]
    }

    /// `u_player(r, c)` for the pure profile `(r, c)`.
    pub fn pure_utility(&self, player: Player, r: usize, c: usize) -> Result<f64> {
        check_index("row", r, self.rows)?;
        check_index("column", c, self.cols)?;
        Ok(self.utility(player, r, c))
    }

    /// Expected utility of `player` when both sides play the profile
    /// independently.
    pub fn expected_utility(&self, player: Player, profile: &StrategyProfile) -> Result<f64> {
        self.check_strategy(Player::Row, &profile.row)?;
        self.check_strategy(Player::Col, &profile.col)?;
        let value: f64 = profile
            .row
            .probs()
            .iter()
            .enumerate()
            .map(|(r, &p)| p * dot(self.payoff_row(r), profile.col.probs()))
            .sum();
        Ok(player.sign() * value)
    }

    /// Utility of `player` playing pure strategy `pure` against the
    /// opponent's mixed strategy.
    pub fn pure_vs_mixed(&self, player: Player, pure: usize, opp: &MixedStrategy) -> Result<f64> {
        check_index("pure strategy", pure, self.num_actions(player))?;
        self.check_strategy(player.opponent(), opp)?;
        Ok(self.pure_vs_mixed_unchecked(player, pure, opp.probs()))
    }

    /// `pure_vs_mixed` for every pure strategy of `player`.
    pub fn action_utilities(&self, player: Player, opp: &MixedStrategy) -> Result<Vec<f64>> {
        self.check_strategy(player.opponent(), opp)?;
        Ok((0..self.num_actions(player))
            .map(|a| self.pure_vs_mixed_unchecked(player, a, opp.probs()))
            .collect())
    }

    pub(crate) fn pure_vs_mixed_unchecked(&self, player: Player, pure: usize, opp: &[f64]) -> f64 {
        match player {
            Player::Row => dot(self.payoff_row(pure), opp),
            Player::Col => {
                -opp.iter()
                    .enumerate()
                    .map(|(r, &p)| p * self.payoff[r * self.cols + pure])
                    .sum::<f64>()
            }
        }
    }

    /// Errors unless `s` has as many entries as `player` has pure strategies.
    pub fn check_strategy(&self, player: Player, s: &MixedStrategy) -> Result<()> {
        let expected = self.num_actions(player);
        if s.len() != expected {
            return Err(Error::DimensionMismatch {
                what: match player {
                    Player::Row => "row strategy",
                    Player::Col => "column strategy",
                },
                expected: expected.to_string(),
                found: s.len().to_string(),
            });
        }
        Ok(())
    }
}

fn flatten<R: AsRef<[f64]>>(matrix: &[R]) -> Result<(usize, usize, Vec<f64>)> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, |r| r.as_ref().len());
    if rows == 0 || cols == 0 {
        return Err(Error::Empty);
    }
    let mut flat = Vec::with_capacity(rows * cols);
    for (i, row) in matrix.iter().enumerate() {
        let row = row.as_ref();
        if row.len() != cols {
            return Err(Error::Ragged {
                row: i,
                expected: cols,
                found: row.len(),
            });
        }
        flat.extend_from_slice(row);
    }
    Ok((rows, cols, flat))
}

fn check_index(what: &'static str, index: usize, size: usize) -> Result<()> {
    if index >= size {
        return Err(Error::IndexOutOfRange { what, index, size });
    }
    Ok(())
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A probability distribution over one player's pure strategies.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MixedStrategy {
    probs: Vec<f64>,
}

impl MixedStrategy {
    /// Validates nonnegativity and that the entries sum to one within
    /// [`tol::PROB_SUM`].
    pub fn new(probs: Vec<f64>) -> Result<MixedStrategy> {
        validate_distribution(&probs, tol::PROB_SUM)?;
        Ok(MixedStrategy { probs })
    }

    pub fn uniform(k: usize) -> MixedStrategy {
        assert!(k > 0, "uniform strategy over zero actions");
        MixedStrategy {
            probs: vec![1.0 / k as f64; k],
        }
    }

    /// Point mass on `action`.
    pub fn pure(k: usize, action: usize) -> MixedStrategy {
        assert!(action < k, "action {action} out of range for {k} actions");
        let mut probs = vec![0.0; k];
        probs[action] = 1.0;
        MixedStrategy { probs }
    }

    /// Normalizes nonnegative weights. Falls back to uniform when every
    /// weight is zero.
    pub fn from_weights(weights: &[f64]) -> Result<MixedStrategy> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("no entries".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDistribution(format!("invalid weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Ok(MixedStrategy::uniform(weights.len()));
        }
        Ok(MixedStrategy {
            probs: weights.iter().map(|w| w / total).collect(),
        })
    }

    /// Caller guarantees the distribution invariants (used where the
    /// entries are sums of an already validated distribution).
    pub(crate) fn from_raw(probs: Vec<f64>) -> MixedStrategy {
        debug_assert!(!probs.is_empty() && probs.iter().all(|p| *p >= 0.0));
        MixedStrategy { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

impl Index<usize> for MixedStrategy {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.probs[i]
    }
}

pub(crate) fn validate_distribution(probs: &[f64], sum_tol: f64) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution("no entries".into()));
    }
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} is {p}, expected a nonnegative finite value"
            )));
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > sum_tol {
        return Err(Error::InvalidDistribution(format!(
            "entries sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

/// One mixed strategy per player, played independently.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyProfile {
    pub row: MixedStrategy,
    pub col: MixedStrategy,
}

impl StrategyProfile {
    pub fn new(row: MixedStrategy, col: MixedStrategy) -> StrategyProfile {
        StrategyProfile { row, col }
    }

    pub fn uniform(game: &Game) -> StrategyProfile {
        StrategyProfile {
            row: MixedStrategy::uniform(game.rows()),
            col: MixedStrategy::uniform(game.cols()),
        }
    }

    pub fn get(&self, player: Player) -> &MixedStrategy {
        match player {
            Player::Row => &self.row,
            Player::Col => &self.col,
        }
    }
}
