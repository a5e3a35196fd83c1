//! Two-player zero-sum matrix games and the link between coarse correlated
//! equilibria and Nash equilibria.
//!
//! In a two-player zero-sum game, if a joint distribution `mu` over pure
//! profiles is an ε-coarse correlated equilibrium then the profile of its
//! marginal strategies is a 2ε-Nash equilibrium. This crate computes both
//! gaps, drives no-regret self-play whose average play converges to the CCE
//! set, and provides independent oracles (a simplex minimax solver and a
//! brute-force gap recomputation) for cross-checking.
//!
//! - [`game`]: games, mixed strategies, utilities
//! - [`equilibrium`]: joint distributions, marginals, CCE and Nash gaps
//! - [`learners`]: regret matching, RM+, multiplicative weights, self-play
//! - [`oracle`]: exact values by LP, best responses, brute-force gaps
//! - [`sweep`]: seeded random corpora and batch checks (rayon-parallel with
//!   the `parallel` feature)
//! - [`format`]: text file formats for games, joint distributions and
//!   trajectories

pub mod equilibrium;
pub mod error;
pub mod format;
pub mod game;
pub mod learners;
pub mod oracle;
pub mod sweep;
pub mod tol;

pub use equilibrium::{
    cce_gap, deviation_value, deviation_value_direct, expected_joint_utility, marginal, marginal_profile, nash_gap,
    two_eps_check, value_consistency_check, GapReport, JointDistribution, TwoEpsCheck, ValueConsistency,
};
pub use error::{Error, Result};
pub use game::{Game, MixedStrategy, PerPlayer, Player, StrategyProfile};
pub use learners::{
    self_play, Algorithm, Averaging, LearnerState, SelfPlayConfig, SelfPlayResult, TrajectoryPoint,
};
pub use oracle::{best_response, brute_force_gaps, exact_value, BestResponse, BruteForceGaps, ValueSolution};
