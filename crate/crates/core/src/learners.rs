//! No-external-regret learners and a full-information self-play driver.
//!
//! Running two no-regret learners against each other drives their average
//! joint play toward the set of coarse correlated equilibria; in a zero-sum
//! game the marginals of that average are then an approximate Nash
//! equilibrium. [`self_play`] records both gaps along the way.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::equilibrium::{cce_gap, expected_joint_utility, nash_gap, JointDistribution};
use crate::error::{Error, Result};
use crate::game::{Game, MixedStrategy, PerPlayer, Player, StrategyProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Algorithm {
    #[serde(rename = "rm")]
    RegretMatching,
    #[serde(rename = "rmplus")]
    RegretMatchingPlus,
    #[serde(rename = "mw")]
    MultiplicativeWeights,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::RegretMatching,
        Algorithm::RegretMatchingPlus,
        Algorithm::MultiplicativeWeights,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::RegretMatching => "rm",
            Algorithm::RegretMatchingPlus => "rmplus",
            Algorithm::MultiplicativeWeights => "mw",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Algorithm> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

/// How the empirical joint distribution is accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Average of the outer products of the two current mixed strategies.
    #[default]
    Expected,
    /// Average of point masses on profiles sampled from those strategies.
    Sampled,
}

impl fmt::Display for Averaging {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Averaging::Expected => "expected",
            Averaging::Sampled => "sampled",
        })
    }
}

impl FromStr for Averaging {
    type Err = Error;

    fn from_str(s: &str) -> Result<Averaging> {
        match s {
            "expected" => Ok(Averaging::Expected),
            "sampled" => Ok(Averaging::Sampled),
            other => Err(Error::UnknownAveraging(other.to_string())),
        }
    }
}

/// Bookkeeping for one learner.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    algo: Algorithm,
    /// Cumulative regrets (RM, RM+) or scaled cumulative utilities (MW).
    cumulative: Vec<f64>,
    t: u64,
    payoff_range: f64,
    step_size: f64,
}

impl LearnerState {
    /// A fresh learner over `num_actions` actions. For multiplicative
    /// weights the step size is fixed from the planned horizon as
    /// `sqrt(8 ln k / horizon) / payoff_range`.
    pub fn new(algo: Algorithm, num_actions: usize, payoff_range: f64, horizon: u64) -> LearnerState {
        assert!(num_actions > 0, "learner needs at least one action");
        let step_size = if payoff_range > 0.0 && horizon > 0 {
            (8.0 * (num_actions as f64).ln() / horizon as f64).sqrt() / payoff_range
        } else {
            0.0
        };
        LearnerState {
            algo,
            cumulative: vec![0.0; num_actions],
            t: 0,
            payoff_range,
            step_size,
        }
    }

    /// Overrides the multiplicative-weights step size.
    pub fn with_step_size(mut self, step_size: f64) -> LearnerState {
        self.step_size = step_size;
        self
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algo
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Number of `observe` calls applied so far.
    pub fn iterations(&self) -> u64 {
        self.t
    }

    pub fn payoff_range(&self) -> f64 {
        self.payoff_range
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    pub fn num_actions(&self) -> usize {
        self.cumulative.len()
    }

    /// The strategy to play next.
    pub fn next_strategy(&self) -> MixedStrategy {
        match self.algo {
            Algorithm::RegretMatching | Algorithm::RegretMatchingPlus => {
                let positive: Vec<f64> = self.cumulative.iter().map(|r| r.max(0.0)).collect();
                MixedStrategy::from_weights(&positive).expect("nonnegative finite weights")
            }
            Algorithm::MultiplicativeWeights => {
                let max = self.cumulative.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let weights: Vec<f64> = self.cumulative.iter().map(|w| (w - max).exp()).collect();
                MixedStrategy::from_weights(&weights).expect("nonnegative finite weights")
            }
        }
    }

    /// Feeds back the expected utility of every action against the
    /// opponent's current strategy, given that `played` was used.
    pub fn observe(&mut self, action_utilities: &[f64], played: &MixedStrategy) -> Result<()> {
        let k = self.cumulative.len();
        for (what, len) in [("action utilities", action_utilities.len()), ("played strategy", played.len())] {
            if len != k {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: k.to_string(),
                    found: len.to_string(),
                });
            }
        }
        match self.algo {
            Algorithm::RegretMatching | Algorithm::RegretMatchingPlus => {
                let realized: f64 = played.probs().iter().zip(action_utilities).map(|(p, u)| p * u).sum();
                let clip = self.algo == Algorithm::RegretMatchingPlus;
                for (r, u) in self.cumulative.iter_mut().zip(action_utilities) {
                    *r += u - realized;
                    if clip {
                        *r = r.max(0.0);
                    }
                }
            }
            Algorithm::MultiplicativeWeights => {
                for (w, u) in self.cumulative.iter_mut().zip(action_utilities) {
                    *w += self.step_size * u;
                }
            }
        }
        self.t += 1;
        Ok(())
    }
}

/// Parameters for [`self_play`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelfPlayConfig {
    pub algorithms: PerPlayer<Algorithm>,
    pub iterations: u64,
    pub seed: u64,
    pub averaging: Averaging,
    /// Record a checkpoint every this many iterations; `0` records only the
    /// final iteration. The final iteration is always recorded.
    pub log_every: u64,
}

impl SelfPlayConfig {
    pub fn new(algo: Algorithm, iterations: u64) -> SelfPlayConfig {
        SelfPlayConfig {
            algorithms: PerPlayer::new(algo, algo),
            iterations,
            seed: 0,
            averaging: Averaging::Expected,
            log_every: 0,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn averaging(mut self, averaging: Averaging) -> Self {
        self.averaging = averaging;
        self
    }

    pub fn log_every(mut self, log_every: u64) -> Self {
        self.log_every = log_every;
        self
    }

    /// Lets the column player run a different algorithm.
    pub fn col_algorithm(mut self, algo: Algorithm) -> Self {
        self.algorithms.col = algo;
        self
    }
}

/// Gap statistics at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: u64,
    /// CCE epsilon of the empirical joint distribution so far.
    pub cce_eps: f64,
    /// Nash epsilon of the averaged marginal profile.
    pub nash_eps: f64,
    /// Row player's expected utility under the empirical joint.
    pub avg_row_payoff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfPlayResult {
    pub empirical_joint: JointDistribution,
    pub avg_profile: StrategyProfile,
    pub trajectory: Vec<TrajectoryPoint>,
}

impl SelfPlayResult {
    pub fn last(&self) -> &TrajectoryPoint {
        self.trajectory.last().expect("trajectory always has the final point")
    }
}

/// Runs both learners against each other with full-information feedback.
///
/// Each iteration both players commit to their current strategies, then each
/// observes the expected utility of all its actions against the other's
/// strategy. Sampled averaging draws with ChaCha8 seeded from `config.seed`,
/// one `f64` for the row profile then one for the column profile per
/// iteration, inverting the cumulative distribution. Output is a pure
/// function of `(game, config)`.
pub fn self_play(game: &Game, config: &SelfPlayConfig) -> Result<SelfPlayResult> {
    if config.iterations == 0 {
        return Err(Error::ZeroIterations);
    }
    let (m, n) = (game.rows(), game.cols());
    let range = game.payoff_range();
    let mut learners = PerPlayer::from_fn(|p| {
        LearnerState::new(config.algorithms[p], game.num_actions(p), range, config.iterations)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut joint_acc = vec![0.0; m * n];
    let mut marg_acc = PerPlayer::new(vec![0.0; m], vec![0.0; n]);
    let mut trajectory = Vec::new();

    for t in 1..=config.iterations {
        let current = PerPlayer::from_fn(|p| learners[p].next_strategy());

        match config.averaging {
            Averaging::Expected => {
                for (r, &p) in current.row.probs().iter().enumerate() {
                    for (acc, &q) in joint_acc[r * n..(r + 1) * n].iter_mut().zip(current.col.probs()) {
                        *acc += p * q;
                    }
                }
                for player in Player::BOTH {
                    for (acc, &p) in marg_acc[player].iter_mut().zip(current[player].probs()) {
                        *acc += p;
                    }
                }
            }
            Averaging::Sampled => {
                let r = sample(&current.row, rng.random());
                let c = sample(&current.col, rng.random());
                joint_acc[r * n + c] += 1.0;
                marg_acc.row[r] += 1.0;
                marg_acc.col[c] += 1.0;
            }
        }

        for player in Player::BOTH {
            let utils = game.action_utilities(player, &current[player.opponent()])?;
            learners[player].observe(&utils, &current[player])?;
        }

        let checkpoint = t == config.iterations || (config.log_every > 0 && t % config.log_every == 0);
        if checkpoint {
            let (joint, profile) = averages(m, n, &joint_acc, &marg_acc, t);
            trajectory.push(TrajectoryPoint {
                t,
                cce_eps: cce_gap(&joint, game)?.epsilon,
                nash_eps: nash_gap(&profile, game)?.epsilon,
                avg_row_payoff: expected_joint_utility(&joint, game, Player::Row)?,
            });
        }
    }

    let (empirical_joint, avg_profile) = averages(m, n, &joint_acc, &marg_acc, config.iterations);
    Ok(SelfPlayResult {
        empirical_joint,
        avg_profile,
        trajectory,
    })
}

fn averages(
    m: usize,
    n: usize,
    joint_acc: &[f64],
    marg_acc: &PerPlayer<Vec<f64>>,
    t: u64,
) -> (JointDistribution, StrategyProfile) {
    let total = t as f64;
    let joint = JointDistribution::from_accumulated(m, n, joint_acc, total);
    let avg = |acc: &[f64]| MixedStrategy::from_raw(acc.iter().map(|v| v / total).collect());
    (joint, StrategyProfile::new(avg(&marg_acc.row), avg(&marg_acc.col)))
}

/// Inverse-CDF draw from `s` with `u` uniform in `[0, 1)`.
fn sample(s: &MixedStrategy, u: f64) -> usize {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &p) in s.probs().iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_positive = i;
            if u < acc {
                return i;
            }
        }
    }
    // rounding left the cdf just under 1
    last_positive
}
