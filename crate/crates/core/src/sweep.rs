//! Batch verification over seeded random corpora of games and joint
//! distributions.
//!
//! Instances are generated independently from `(seed, index)`, so a sweep
//! produces identical results whether it runs on one thread or many. With
//! the `parallel` feature (on by default) [`Execution::Parallel`] fans out
//! over rayon; without it every sweep runs sequentially.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::equilibrium::{
    cce_gap, deviation_value, deviation_value_direct, expected_joint_utility, marginal_profile, nash_gap,
    value_consistency_check_with, JointDistribution,
};
use crate::game::{Game, MixedStrategy, PerPlayer, Player};
use crate::oracle::brute_force_gaps;
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Maps `f` over `0..count`, collecting results in index order.
pub fn map_indices<T, F>(count: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(f).collect()
        }
        _ => (0..count).map(f).collect(),
    }
}

/// Shape of the random joint distribution attached to an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MassShape {
    /// Independent U[0,1] mass per cell, normalized.
    Uniform,
    /// U[0,1] mass on roughly a fifth of the cells, zero elsewhere.
    Sparse,
    /// U[0,1]^8 per cell, which concentrates mass on a few cells.
    Peaked,
    /// A mixture of a point mass and a product distribution, which has
    /// strong correlation between the players.
    Correlated,
}

impl MassShape {
    pub const ALL: [MassShape; 4] = [MassShape::Uniform, MassShape::Sparse, MassShape::Peaked, MassShape::Correlated];
}

/// Description of a reproducible random corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub seed: u64,
    pub count: usize,
    /// Rows and columns are drawn uniformly from `1..=max_dim`.
    pub max_dim: usize,
    /// Instance `i` uses `shapes[i % shapes.len()]`.
    pub shapes: Vec<MassShape>,
}

impl Corpus {
    pub fn new(seed: u64, count: usize, max_dim: usize) -> Corpus {
        Corpus {
            seed,
            count,
            max_dim,
            shapes: vec![MassShape::Uniform],
        }
    }

    pub fn with_shapes(mut self, shapes: &[MassShape]) -> Corpus {
        assert!(!shapes.is_empty());
        self.shapes = shapes.to_vec();
        self
    }

    pub fn instance(&self, index: usize) -> Instance {
        Instance::random(self.seed, index as u64, self.max_dim, self.shapes[index % self.shapes.len()])
    }
}

/// A game, a joint distribution over its cells, and one mixed deviation
/// per player.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub game: Game,
    pub joint: JointDistribution,
    pub deviation: PerPlayer<MixedStrategy>,
}

impl Instance {
    /// Payoffs are U[-1, 1]. The generator is ChaCha8 seeded with `seed`
    /// on stream `index`.
    pub fn random(seed: u64, index: u64, max_dim: usize, shape: MassShape) -> Instance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let rows = rng.random_range(1..=max_dim);
        let cols = rng.random_range(1..=max_dim);
        let game = random_game(&mut rng, rows, cols);
        let joint = random_joint(&mut rng, rows, cols, shape);
        let deviation = PerPlayer::new(random_strategy(&mut rng, rows), random_strategy(&mut rng, cols));
        Instance { game, joint, deviation }
    }
}

/// A `rows x cols` game with payoffs drawn uniformly from `[-1, 1]`.
pub fn random_game<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Game {
    let payoff = (0..rows * cols).map(|_| rng.random_range(-1.0..=1.0)).collect();
    Game::from_flat(rows, cols, payoff).expect("finite payoffs")
}

pub fn random_strategy<R: Rng>(rng: &mut R, k: usize) -> MixedStrategy {
    let weights: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
    MixedStrategy::from_weights(&weights).expect("nonnegative weights")
}

pub fn random_joint<R: Rng>(rng: &mut R, rows: usize, cols: usize, shape: MassShape) -> JointDistribution {
    let n = rows * cols;
    let mut mass: Vec<f64> = match shape {
        MassShape::Uniform => (0..n).map(|_| rng.random::<f64>()).collect(),
        MassShape::Sparse => {
            let mut m: Vec<f64> = (0..n)
                .map(|_| if rng.random_bool(0.2) { rng.random::<f64>() } else { 0.0 })
                .collect();
            if m.iter().all(|v| *v == 0.0) {
                m[rng.random_range(0..n)] = 1.0;
            }
            m
        }
        MassShape::Peaked => (0..n).map(|_| rng.random::<f64>().powi(8)).collect(),
        MassShape::Correlated => {
            let w: f64 = rng.random();
            let cell = rng.random_range(0..n);
            let p = random_strategy(rng, rows);
            let q = random_strategy(rng, cols);
            let mut m: Vec<f64> = (0..n).map(|i| (1.0 - w) * p[i / cols] * q[i % cols]).collect();
            m[cell] += w;
            m
        }
    };
    let total: f64 = mass.iter().sum();
    if total <= 0.0 {
        mass.iter_mut().for_each(|v| *v = 1.0);
    }
    let total: f64 = mass.iter().sum();
    mass.iter_mut().for_each(|v| *v /= total);
    JointDistribution::new(rows, cols, mass).expect("normalized mass")
}

/// Aggregate outcome of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepStats {
    pub instances: usize,
    /// Instances where the checked inequality failed.
    pub failures: usize,
    /// Largest observed error (for equalities) or `lhs - bound` (for
    /// inequalities; negative when every instance holds with room).
    pub worst: f64,
    /// Largest `nash_eps / max(cce_eps, 1e-15)`; zero for sweeps that do
    /// not compare the two.
    pub max_ratio: f64,
}

impl SweepStats {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn collect(results: Vec<(bool, f64, f64)>) -> SweepStats {
        SweepStats {
            instances: results.len(),
            failures: results.iter().filter(|r| !r.0).count(),
            worst: results.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max),
            max_ratio: results.iter().map(|r| r.2).fold(0.0, f64::max),
        }
    }
}

/// Deviation value through the marginal vs the direct sum over `mu`, for
/// both players and for both the sampled mixed deviation and every pure
/// one. `worst` is the largest absolute difference.
pub fn lemma_sweep(corpus: &Corpus, exec: Execution, tolerance: f64) -> SweepStats {
    let results = map_indices(corpus.count, exec, |i| {
        let inst = corpus.instance(i);
        let mut worst: f64 = 0.0;
        for player in Player::BOTH {
            let k = inst.game.num_actions(player);
            let devs = std::iter::once(inst.deviation[player].clone()).chain((0..k).map(|a| MixedStrategy::pure(k, a)));
            for dev in devs {
                let via_marginal = deviation_value(&inst.joint, &inst.game, player, &dev).expect("dims");
                let direct = deviation_value_direct(&inst.joint, &inst.game, player, &dev).expect("dims");
                worst = worst.max((via_marginal - direct).abs());
            }
        }
        (worst <= tolerance, worst, 0.0)
    });
    SweepStats::collect(results)
}

/// `|E_mu[u_row] - u_row(s^mu)| <= cce eps + slack`; `worst` is the largest
/// `lhs - bound`.
pub fn value_consistency_sweep(corpus: &Corpus, exec: Execution, slack: f64) -> SweepStats {
    let results = map_indices(corpus.count, exec, |i| {
        let inst = corpus.instance(i);
        let check = value_consistency_check_with(&inst.joint, &inst.game, slack).expect("dims");
        (check.holds, check.lhs - check.bound, 0.0)
    });
    SweepStats::collect(results)
}

/// `nash eps of marginals <= 2 cce eps + slack`; `worst` is the largest
/// `nash_eps - 2 cce_eps`.
pub fn two_eps_sweep(corpus: &Corpus, exec: Execution, slack: f64) -> SweepStats {
    let results = map_indices(corpus.count, exec, |i| {
        let inst = corpus.instance(i);
        let cce = cce_gap(&inst.joint, &inst.game).expect("dims").epsilon;
        let nash = nash_gap(&marginal_profile(&inst.joint), &inst.game).expect("dims").epsilon;
        let ratio = nash / cce.max(1e-15);
        (nash <= 2.0 * cce + slack, nash - 2.0 * cce, ratio)
    });
    SweepStats::collect(results)
}

/// Brute-force gap oracle vs the equilibrium module; `worst` is the
/// largest absolute difference over both reports and both players.
pub fn oracle_agreement_sweep(corpus: &Corpus, exec: Execution, tolerance: f64) -> SweepStats {
    let results = map_indices(corpus.count, exec, |i| {
        let inst = corpus.instance(i);
        let brute = brute_force_gaps(&inst.joint, &inst.game).expect("dims");
        let cce = cce_gap(&inst.joint, &inst.game).expect("dims");
        let nash = nash_gap(&marginal_profile(&inst.joint), &inst.game).expect("dims");
        let mut worst: f64 = 0.0;
        for (a, b) in [(brute.cce, cce), (brute.nash_of_marginals, nash)] {
            worst = worst
                .max((a.per_player_gap.row - b.per_player_gap.row).abs())
                .max((a.per_player_gap.col - b.per_player_gap.col).abs())
                .max((a.epsilon - b.epsilon).abs());
        }
        (worst <= tolerance, worst, 0.0)
    });
    SweepStats::collect(results)
}

/// Zero-sum symmetry: the column player's `|E_mu[u_col] - u_col(s^mu)|`
/// equals the row player's exactly.
pub fn symmetry_sweep(corpus: &Corpus, exec: Execution) -> SweepStats {
    let results = map_indices(corpus.count, exec, |i| {
        let inst = corpus.instance(i);
        let profile = marginal_profile(&inst.joint);
        let diff = |p: Player| {
            (expected_joint_utility(&inst.joint, &inst.game, p).expect("dims")
                - inst.game.expected_utility(p, &profile).expect("dims"))
            .abs()
        };
        let gap = (diff(Player::Row) - diff(Player::Col)).abs();
        (gap == 0.0, gap, 0.0)
    });
    SweepStats::collect(results)
}

/// Default slack for the bound sweeps.
pub const DEFAULT_SLACK: f64 = tol::GAP;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_reproducible() {
        let corpus = Corpus::new(11, 8, 6).with_shapes(&MassShape::ALL);
        for i in 0..8 {
            assert_eq!(corpus.instance(i), corpus.instance(i));
        }
        assert_ne!(corpus.instance(0), corpus.instance(1));
    }

    #[test]
    fn generated_objects_are_valid() {
        let corpus = Corpus::new(5, 40, 7).with_shapes(&MassShape::ALL);
        for i in 0..corpus.count {
            let inst = corpus.instance(i);
            let (m, n) = (inst.game.rows(), inst.game.cols());
            assert!((1..=7).contains(&m) && (1..=7).contains(&n));
            assert!(inst.game.payoffs().iter().all(|v| (-1.0..=1.0).contains(v)));
            assert!(inst.joint.check_game(&inst.game).is_ok());
            assert!(JointDistribution::new(m, n, inst.joint.masses().to_vec()).is_ok());
            assert!(MixedStrategy::new(inst.deviation.row.probs().to_vec()).is_ok());
            assert_eq!(inst.deviation.col.len(), n);
        }
    }

    #[test]
    fn execution_modes_agree() {
        let corpus = Corpus::new(2, 64, 8).with_shapes(&MassShape::ALL);
        let a = two_eps_sweep(&corpus, Execution::Sequential, DEFAULT_SLACK);
        let b = two_eps_sweep(&corpus, Execution::Parallel, DEFAULT_SLACK);
        assert_eq!(a, b);
        assert_eq!(a.instances, 64);
        assert!(a.passed());
    }

    #[test]
    fn map_indices_preserves_order() {
        let v = map_indices(100, Execution::Parallel, |i| i * i);
        assert_eq!(v, (0..100).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn failures_are_counted() {
        let corpus = Corpus::new(9, 30, 5);
        // an impossible slack flags every instance whose bound is not slack
        let stats = value_consistency_sweep(&corpus, Execution::Sequential, -10.0);
        assert_eq!(stats.failures, 30);
        assert!(!stats.passed());
    }
}
