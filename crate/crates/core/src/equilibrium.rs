//! Joint distributions over pure profiles, marginal strategies, and the
//! coarse-correlated / Nash gap computations that relate them.
//!
//! Deviation gains are maximized over pure deviations only. Expected utility
//! is linear in the deviating player's mixed strategy, so the maximum over
//! mixed deviations is always attained at a pure strategy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{validate_distribution, Game, MixedStrategy, PerPlayer, Player, StrategyProfile};
use crate::tol;

/// A probability mass function over the cells of a `rows x cols` game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    mass: Vec<f64>,
}

impl JointDistribution {
    /// Row-major mass; entries must be nonnegative and sum to one within
    /// [`tol::PROB_SUM`].
    pub fn new(rows: usize, cols: usize, mass: Vec<f64>) -> Result<JointDistribution> {
        JointDistribution::with_sum_tolerance(rows, cols, mass, tol::PROB_SUM)
    }

    /// Same as [`JointDistribution::new`] with a caller-chosen tolerance on
    /// the total mass. The mass is stored as given, never renormalized.
    pub fn with_sum_tolerance(
        rows: usize,
        cols: usize,
        mass: Vec<f64>,
        sum_tol: f64,
    ) -> Result<JointDistribution> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if mass.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "joint distribution",
                expected: format!("{} entries", rows * cols),
                found: format!("{} entries", mass.len()),
            });
        }
        validate_distribution(&mass, sum_tol)?;
        Ok(JointDistribution { rows, cols, mass })
    }

    pub fn from_matrix<R: AsRef<[f64]>>(mass: &[R]) -> Result<JointDistribution> {
        let rows = mass.len();
        let cols = mass.first().map_or(0, |r| r.as_ref().len());
        let mut flat = Vec::with_capacity(rows * cols);
        for (i, row) in mass.iter().enumerate() {
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
        JointDistribution::new(rows, cols, flat)
    }

    /// Product distribution of two independent mixed strategies.
    pub fn product(profile: &StrategyProfile) -> JointDistribution {
        let rows = profile.row.len();
        let cols = profile.col.len();
        let mut mass = Vec::with_capacity(rows * cols);
        for &p in profile.row.probs() {
            mass.extend(profile.col.probs().iter().map(|&q| p * q));
        }
        JointDistribution { rows, cols, mass }
    }

    pub fn uniform(rows: usize, cols: usize) -> JointDistribution {
        assert!(rows > 0 && cols > 0);
        let n = rows * cols;
        JointDistribution {
            rows,
            cols,
            mass: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(rows: usize, cols: usize, r: usize, c: usize) -> JointDistribution {
        assert!(r < rows && c < cols);
        let mut mass = vec![0.0; rows * cols];
        mass[r * cols + c] = 1.0;
        JointDistribution { rows, cols, mass }
    }

    /// Builds from an accumulated nonnegative weight matrix by dividing by
    /// `total`. Used for time averages where `total` is the iteration count.
    pub(crate) fn from_accumulated(rows: usize, cols: usize, acc: &[f64], total: f64) -> JointDistribution {
        JointDistribution {
            rows,
            cols,
            mass: acc.iter().map(|v| v / total).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mass(&self, r: usize, c: usize) -> f64 {
        self.mass[r * self.cols + c]
    }

    /// Row-major masses.
    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn check_game(&self, game: &Game) -> Result<()> {
        if (self.rows, self.cols) != (game.rows(), game.cols()) {
            return Err(Error::DimensionMismatch {
                what: "joint distribution vs game",
                expected: format!("{}x{}", game.rows(), game.cols()),
                found: format!("{}x{}", self.rows, self.cols),
            });
        }
        Ok(())
    }
}

/// The marginal strategy of `player` under `mu`: row sums for the row
/// player, column sums for the column player.
pub fn marginal(mu: &JointDistribution, player: Player) -> MixedStrategy {
    let probs = match player {
        Player::Row => mu.mass.chunks(mu.cols).map(|row| row.iter().sum()).collect(),
        Player::Col => {
            let mut sums = vec![0.0; mu.cols];
            for row in mu.mass.chunks(mu.cols) {
                for (s, m) in sums.iter_mut().zip(row) {
                    *s += m;
                }
            }
            sums
        }
    };
    MixedStrategy::from_raw(probs)
}

/// Both marginals as a profile.
pub fn marginal_profile(mu: &JointDistribution) -> StrategyProfile {
    StrategyProfile::new(marginal(mu, Player::Row), marginal(mu, Player::Col))
}

/// `E_{rho ~ mu}[u_player(rho)]`.
pub fn expected_joint_utility(mu: &JointDistribution, game: &Game, player: Player) -> Result<f64> {
    mu.check_game(game)?;
    let sum: f64 = mu.mass.iter().zip(game.payoffs()).map(|(m, u)| m * u).sum();
    Ok(player.sign() * sum)
}

/// Value of deviating to `dev` while the opponent follows `mu`, evaluated
/// as `dev` against the opponent's marginal strategy.
pub fn deviation_value(mu: &JointDistribution, game: &Game, player: Player, dev: &MixedStrategy) -> Result<f64> {
    mu.check_game(game)?;
    game.check_strategy(player, dev)?;
    let opp = marginal(mu, player.opponent());
    Ok(dev
        .probs()
        .iter()
        .enumerate()
        .map(|(a, &p)| p * game.pure_vs_mixed_unchecked(player, a, opp.probs()))
        .sum())
}

/// `E_{rho ~ mu}[u_player(dev, rho_opp)]` summed directly over the cells of
/// `mu` without forming a marginal. Agrees with [`deviation_value`].
pub fn deviation_value_direct(
    mu: &JointDistribution,
    game: &Game,
    player: Player,
    dev: &MixedStrategy,
) -> Result<f64> {
    mu.check_game(game)?;
    game.check_strategy(player, dev)?;
    let mut total = 0.0;
    for r in 0..mu.rows {
        for c in 0..mu.cols {
            let m = mu.mass(r, c);
            let inner: f64 = dev
                .probs()
                .iter()
                .enumerate()
                .map(|(a, &p)| match player {
                    Player::Row => p * game.utility(player, a, c),
                    Player::Col => p * game.utility(player, r, a),
                })
                .sum();
            total += m * inner;
        }
    }
    Ok(total)
}

/// Per-player best deviation gains and the epsilon they imply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport {
    /// Largest gain from a pure deviation; negative when every deviation
    /// loses.
    pub per_player_gap: PerPlayer<f64>,
    /// `max(0, row gap, col gap)`.
    pub epsilon: f64,
    /// Lowest-index pure deviation attaining each player's gap.
    pub best_deviation: PerPlayer<usize>,
}

impl GapReport {
    fn from_gains(gains: PerPlayer<(usize, f64)>) -> GapReport {
        let per_player_gap = PerPlayer::new(gains.row.1, gains.col.1);
        GapReport {
            per_player_gap,
            epsilon: 0f64.max(per_player_gap.row).max(per_player_gap.col),
            best_deviation: PerPlayer::new(gains.row.0, gains.col.0),
        }
    }
}

/// First index of the maximum, so ties go to the lowest index.
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// Coarse-correlated equilibrium gap of `mu`: for each player, the best gain
/// from committing to a fixed pure strategy while the opponent follows `mu`.
pub fn cce_gap(mu: &JointDistribution, game: &Game) -> Result<GapReport> {
    mu.check_game(game)?;
    let gains = PerPlayer::from_fn(|player| {
        let opp = marginal(mu, player.opponent());
        let follow = expected_joint_utility(mu, game, player).expect("dimensions checked");
        argmax(
            (0..game.num_actions(player)).map(|a| game.pure_vs_mixed_unchecked(player, a, opp.probs()) - follow),
        )
    });
    Ok(GapReport::from_gains(gains))
}

/// Nash gap (exploitability per player) of an independent profile.
pub fn nash_gap(profile: &StrategyProfile, game: &Game) -> Result<GapReport> {
    let current = game.expected_utility(Player::Row, profile)?;
    let gains = PerPlayer::from_fn(|player| {
        let opp = profile.get(player.opponent());
        let base = player.sign() * current;
        argmax((0..game.num_actions(player)).map(|a| game.pure_vs_mixed_unchecked(player, a, opp.probs()) - base))
    });
    Ok(GapReport::from_gains(gains))
}

/// Outcome of comparing `mu`'s expected value with its marginal profile's.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValueConsistency {
    /// `|E_mu[u_row] - u_row(marginals)|`
    pub lhs: f64,
    /// CCE epsilon of `mu`.
    pub bound: f64,
    pub holds: bool,
}

/// Checks `|E_mu[u_row] - u_row(s^mu)| <= cce epsilon` at [`tol::GAP`].
pub fn value_consistency_check(mu: &JointDistribution, game: &Game) -> Result<ValueConsistency> {
    value_consistency_check_with(mu, game, tol::GAP)
}

/// The row player's statement is sufficient: in a zero-sum game the column
/// player's difference is the exact negation.
pub fn value_consistency_check_with(mu: &JointDistribution, game: &Game, slack: f64) -> Result<ValueConsistency> {
    let joint = expected_joint_utility(mu, game, Player::Row)?;
    let product = game.expected_utility(Player::Row, &marginal_profile(mu))?;
    let lhs = (joint - product).abs();
    let bound = cce_gap(mu, game)?.epsilon;
    Ok(ValueConsistency {
        lhs,
        bound,
        holds: lhs <= bound + slack,
    })
}

/// Outcome of the epsilon-CCE to 2-epsilon-Nash comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoEpsCheck {
    pub cce_eps: f64,
    pub nash_eps: f64,
    pub holds: bool,
}

/// Checks that the marginals of `mu` form a `2 * cce_eps` Nash equilibrium.
pub fn two_eps_check(mu: &JointDistribution, game: &Game) -> Result<TwoEpsCheck> {
    two_eps_check_with(mu, game, tol::GAP)
}

pub fn two_eps_check_with(mu: &JointDistribution, game: &Game, slack: f64) -> Result<TwoEpsCheck> {
    let cce_eps = cce_gap(mu, game)?.epsilon;
    let nash_eps = nash_gap(&marginal_profile(mu), game)?.epsilon;
    Ok(TwoEpsCheck {
        cce_eps,
        nash_eps,
        holds: nash_eps <= 2.0 * cce_eps + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pennies() -> Game {
        Game::zero_sum(&[[1.0, -1.0], [-1.0, 1.0]]).unwrap()
    }

    fn diagonal() -> JointDistribution {
        JointDistribution::from_matrix(&[[0.5, 0.0], [0.0, 0.5]]).unwrap()
    }

    #[test]
    fn joint_validation() {
        assert!(JointDistribution::from_matrix(&[[0.5, 0.0], [0.0, 0.4]]).is_err());
        assert!(JointDistribution::from_matrix(&[[1.5, -0.5]]).is_err());
        assert!(JointDistribution::from_matrix(&[vec![0.5, 0.5], vec![0.0]]).is_err());
        assert!(JointDistribution::new(2, 2, vec![1.0]).is_err());
        assert!(JointDistribution::new(0, 2, vec![]).is_err());
        let loose = vec![0.25, 0.25, 0.25, 0.25 + 5e-10];
        assert!(JointDistribution::new(2, 2, loose.clone()).is_err());
        let mu = JointDistribution::with_sum_tolerance(2, 2, loose.clone(), 1e-9).unwrap();
        assert_eq!(mu.masses(), &loose[..]);
    }

    #[test]
    fn marginal_examples() {
        let u = JointDistribution::uniform(2, 2);
        assert_eq!(marginal(&u, Player::Row).probs(), &[0.5, 0.5]);
        assert_eq!(marginal(&u, Player::Col).probs(), &[0.5, 0.5]);

        let p = JointDistribution::point_mass(2, 2, 0, 1);
        assert_eq!(marginal(&p, Player::Row).probs(), &[1.0, 0.0]);
        assert_eq!(marginal(&p, Player::Col).probs(), &[0.0, 1.0]);

        assert_eq!(marginal(&diagonal(), Player::Row).probs(), &[0.5, 0.5]);
        assert_eq!(marginal(&diagonal(), Player::Col).probs(), &[0.5, 0.5]);
    }

    #[test]
    fn joint_utility_examples() {
        let g = pennies();
        assert_eq!(expected_joint_utility(&diagonal(), &g, Player::Row).unwrap(), 1.0);
        assert_eq!(expected_joint_utility(&diagonal(), &g, Player::Col).unwrap(), -1.0);
        let g = Game::zero_sum(&[[3.0, -1.0, 2.0], [-2.0, 1.0, 0.5]]).unwrap();
        for r in 0..2 {
            for c in 0..3 {
                let p = JointDistribution::point_mass(2, 3, r, c);
                for player in Player::BOTH {
                    assert_eq!(
                        expected_joint_utility(&p, &g, player).unwrap(),
                        g.pure_utility(player, r, c).unwrap()
                    );
                }
            }
        }
        assert!(expected_joint_utility(&JointDistribution::uniform(3, 3), &g, Player::Row).is_err());
    }

    #[test]
    fn deviation_value_examples() {
        let g = pennies();
        let h = MixedStrategy::pure(2, 0);
        // direct sum: 0.5 * u(H, H) + 0.5 * u(H, T) = 0.5 - 0.5
        assert_eq!(deviation_value(&diagonal(), &g, Player::Row, &h).unwrap(), 0.0);
        assert_eq!(deviation_value_direct(&diagonal(), &g, Player::Row, &h).unwrap(), 0.0);

        let g1 = Game::zero_sum(&[[4.25]]).unwrap();
        let p = JointDistribution::point_mass(1, 1, 0, 0);
        let dev = marginal(&p, Player::Row);
        assert_eq!(deviation_value(&p, &g1, Player::Row, &dev).unwrap(), 4.25);

        let g = Game::zero_sum(&[[3.0, -1.0], [-2.0, 1.0]]).unwrap();
        let profile = StrategyProfile::new(
            MixedStrategy::new(vec![0.3, 0.7]).unwrap(),
            MixedStrategy::new(vec![0.6, 0.4]).unwrap(),
        );
        let mu = JointDistribution::product(&profile);
        let dev = MixedStrategy::new(vec![0.9, 0.1]).unwrap();
        let via_lemma = deviation_value(&mu, &g, Player::Row, &dev).unwrap();
        let expected = g
            .expected_utility(Player::Row, &StrategyProfile::new(dev.clone(), marginal(&mu, Player::Col)))
            .unwrap();
        assert_eq!(via_lemma, expected);

        assert!(deviation_value(&mu, &g, Player::Row, &MixedStrategy::uniform(3)).is_err());
        assert!(deviation_value_direct(&mu, &g, Player::Col, &MixedStrategy::uniform(1)).is_err());
    }

    #[test]
    fn cce_gap_examples() {
        let g = pennies();
        let report = cce_gap(&diagonal(), &g).unwrap();
        assert_eq!(report.per_player_gap, PerPlayer::new(-1.0, 1.0));
        assert_eq!(report.epsilon, 1.0);
        assert_eq!(report.best_deviation, PerPlayer::new(0, 0));

        let product = JointDistribution::uniform(2, 2);
        assert_eq!(cce_gap(&product, &g).unwrap().epsilon, 0.0);

        let g1 = Game::zero_sum(&[[2.0]]).unwrap();
        let report = cce_gap(&JointDistribution::point_mass(1, 1, 0, 0), &g1).unwrap();
        assert_eq!(report.epsilon, 0.0);
        assert_eq!(report.per_player_gap, PerPlayer::new(0.0, 0.0));
    }

    #[test]
    fn epsilon_clips_negative_gaps() {
        let g = pennies();
        let report = cce_gap(&diagonal(), &g).unwrap();
        assert!(report.per_player_gap.row < 0.0);
        assert!(report.epsilon >= 0.0);
        // strict dominance: the row player's only good action is played
        let g = Game::zero_sum(&[[1.0, 1.0], [0.0, 0.0]]).unwrap();
        let report = cce_gap(&JointDistribution::point_mass(2, 2, 0, 0), &g).unwrap();
        assert_eq!(report.per_player_gap.row, 0.0);
        assert_eq!(report.epsilon, 0.0);
    }

    #[test]
    fn nash_gap_examples() {
        let g = pennies();
        assert_eq!(nash_gap(&StrategyProfile::uniform(&g), &g).unwrap().epsilon, 0.0);

        let hh = StrategyProfile::new(MixedStrategy::pure(2, 0), MixedStrategy::pure(2, 0));
        let report = nash_gap(&hh, &g).unwrap();
        assert_eq!(report.per_player_gap, PerPlayer::new(0.0, 2.0));
        assert_eq!(report.best_deviation.col, 1);
        assert_eq!(report.epsilon, 2.0);

        let g = Game::zero_sum(&[[3.0, -1.0], [-2.0, 1.0]]).unwrap();
        let maximin = StrategyProfile::new(
            MixedStrategy::new(vec![3.0 / 7.0, 4.0 / 7.0]).unwrap(),
            MixedStrategy::new(vec![2.0 / 7.0, 5.0 / 7.0]).unwrap(),
        );
        assert!(nash_gap(&maximin, &g).unwrap().epsilon <= 1e-9);

        let bad = StrategyProfile::new(MixedStrategy::uniform(2), MixedStrategy::uniform(4));
        assert!(nash_gap(&bad, &g).is_err());
    }

    #[test]
    fn proposition_checks_on_examples() {
        let g = pennies();
        let v = value_consistency_check(&diagonal(), &g).unwrap();
        assert_eq!((v.lhs, v.bound, v.holds), (1.0, 1.0, true));
        let t = two_eps_check(&diagonal(), &g).unwrap();
        assert_eq!((t.cce_eps, t.nash_eps, t.holds), (1.0, 0.0, true));

        let g = Game::zero_sum(&[[3.0, -1.0, 0.5], [-2.0, 1.0, 0.0]]).unwrap();
        let profile = StrategyProfile::new(
            MixedStrategy::new(vec![0.2, 0.8]).unwrap(),
            MixedStrategy::new(vec![0.5, 0.25, 0.25]).unwrap(),
        );
        let v = value_consistency_check(&JointDistribution::product(&profile), &g).unwrap();
        assert!(v.lhs < 1e-15 && v.holds);
        let v = value_consistency_check(&JointDistribution::point_mass(2, 3, 1, 2), &g).unwrap();
        assert_eq!(v.lhs, 0.0);
        assert!(v.holds);
    }

    #[test]
    fn exact_cce_has_nash_marginals() {
        // product of the maximin strategies is an exact CCE
        let g = Game::zero_sum(&[[3.0, -1.0], [-2.0, 1.0]]).unwrap();
        let profile = StrategyProfile::new(
            MixedStrategy::new(vec![3.0 / 7.0, 4.0 / 7.0]).unwrap(),
            MixedStrategy::new(vec![2.0 / 7.0, 5.0 / 7.0]).unwrap(),
        );
        let t = two_eps_check(&JointDistribution::product(&profile), &g).unwrap();
        assert!(t.cce_eps < 1e-12);
        assert!(t.nash_eps < 1e-12);
        assert!(t.holds);
    }

    #[test]
    fn custom_slack_changes_verdict() {
        let g = pennies();
        // marginals (0.6, 0.4) / (0.5, 0.5) with mild correlation
        let mu = JointDistribution::from_matrix(&[[0.35, 0.25], [0.15, 0.25]]).unwrap();
        let t = two_eps_check_with(&mu, &g, 0.0).unwrap();
        assert!(t.holds);
        let strict = two_eps_check_with(&mu, &g, -1.0).unwrap();
        assert!(!strict.holds);
    }
}
