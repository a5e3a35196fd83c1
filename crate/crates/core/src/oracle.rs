//! Ground-truth machinery: exact game values by linear programming, pure
//! best responses, and a brute-force recomputation of equilibrium gaps.
//!
//! Nothing in here calls into [`crate::equilibrium`] for its inner sums, so
//! agreement between the two is a meaningful check.

use serde::Serialize;

use crate::equilibrium::{GapReport, JointDistribution};
use crate::error::{Error, Result};
use crate::game::{Game, MixedStrategy, PerPlayer, Player};
use crate::tol;

/// Pivot budget for [`exact_value`]. Bland's rule cannot cycle, so hitting
/// this means the instance is far outside desk scale.
pub const MAX_PIVOTS: usize = 200_000;

/// Minimax value of a zero-sum game with optimal strategies for both sides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueSolution {
    /// Row player's expected utility at the returned profile.
    pub value: f64,
    /// Maximin strategy of the row player.
    pub row_strategy: MixedStrategy,
    /// Minimax strategy of the column player.
    pub col_strategy: MixedStrategy,
    pub lp: LpStats,
}

/// Diagnostics from the simplex run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LpStats {
    /// Optimal objective of the column player's normalized LP.
    pub primal_objective: f64,
    /// Objective of the dual solution read off the final tableau.
    pub dual_objective: f64,
    /// What the row strategy guarantees: `min_c u_row(row_strategy, c)`.
    pub row_guarantee: f64,
    /// What the column strategy concedes: `max_r u_row(r, col_strategy)`.
    pub col_guarantee: f64,
    pub pivots: usize,
}

/// Solves the game by the standard minimax LP.
///
/// With every payoff shifted to `A' = A + shift >= 1` the value `v'` is
/// positive, and the column player's problem
///
/// ```text
/// maximize 1'y  subject to  A'y <= 1, y >= 0
/// ```
///
/// has optimum `1/v'`. Its dual `minimize 1'x s.t. A'^T x >= 1` gives the row
/// player. Scaling `y` and `x` by `v'` yields the optimal strategies and
/// `v = v' - shift`. The origin is feasible, so no phase one is needed.
pub fn exact_value(game: &Game) -> Result<ValueSolution> {
    let m = game.rows();
    let n = game.cols();
    let min = game.payoffs().iter().copied().fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min;

    let mut tab = Tableau::new(m, n);
    for r in 0..m {
        for (c, &a) in game.payoff_row(r).iter().enumerate() {
            *tab.at(r, c) = a + shift;
        }
        *tab.at(r, n + r) = 1.0;
        *tab.at(r, tab.rhs_col()) = 1.0;
    }
    for c in 0..n {
        *tab.at(m, c) = -1.0;
    }
    let pivots = tab.solve(MAX_PIVOTS)?;

    let mut y = vec![0.0; n];
    for (r, &var) in tab.basis.iter().enumerate() {
        if var < n {
            y[var] = tab.get(r, tab.rhs_col()).max(0.0);
        }
    }
    let x: Vec<f64> = (0..m).map(|r| tab.get(m, n + r).max(0.0)).collect();
    let primal_objective = tab.get(m, tab.rhs_col());
    let dual_objective: f64 = x.iter().sum();

    let row_strategy = MixedStrategy::from_weights(&x)?;
    let col_strategy = MixedStrategy::from_weights(&y)?;

    let value = (0..m)
        .map(|r| {
            row_strategy[r]
                * game
                    .payoff_row(r)
                    .iter()
                    .zip(col_strategy.probs())
                    .map(|(a, q)| a * q)
                    .sum::<f64>()
        })
        .sum();
    let row_guarantee = (0..n)
        .map(|c| (0..m).map(|r| row_strategy[r] * game.utility(Player::Row, r, c)).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let col_guarantee = (0..m)
        .map(|r| (0..n).map(|c| col_strategy[c] * game.utility(Player::Row, r, c)).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(ValueSolution {
        value,
        row_strategy,
        col_strategy,
        lp: LpStats {
            primal_objective,
            dual_objective,
            row_guarantee,
            col_guarantee,
            pivots,
        },
    })
}

/// Dense simplex tableau for `max c'y, Ay <= b` in canonical form. The last
/// row holds reduced costs (negated objective), the last column the rhs.
struct Tableau {
    width: usize,
    cells: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(m: usize, n: usize) -> Tableau {
        let width = n + m + 1;
        Tableau {
            width,
            cells: vec![0.0; (m + 1) * width],
            basis: (n..n + m).collect(),
        }
    }

    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn constraints(&self) -> usize {
        self.basis.len()
    }

    fn at(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.cells[r * self.width + c]
    }

    fn get(&self, r: usize, c: usize) -> f64 {
        self.cells[r * self.width + c]
    }

    /// Pivots with Bland's rule until no reduced cost is negative.
    fn solve(&mut self, limit: usize) -> Result<usize> {
        let m = self.constraints();
        let rhs = self.rhs_col();
        for pivots in 0..=limit {
            // Bland: lowest-index improving column
            let Some(enter) = (0..rhs).find(|&j| self.get(m, j) < -tol::LP_PIVOT) else {
                return Ok(pivots);
            };
            if pivots == limit {
                break;
            }
            // min ratio, ties to the lowest-index basic variable
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..m {
                let a = self.get(r, enter);
                if a > tol::LP_PIVOT {
                    let ratio = self.get(r, rhs) / a;
                    let better = match leave {
                        None => true,
                        Some((best, best_ratio)) => {
                            ratio < best_ratio - tol::LP_PIVOT
                                || (ratio <= best_ratio + tol::LP_PIVOT && self.basis[r] < self.basis[best])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            // A' > 0 keeps the problem bounded, so some row always qualifies.
            let (leave, _) = leave.expect("bounded LP has a leaving row");
            self.pivot(leave, enter);
        }
        Err(Error::IterationLimit { limit })
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.get(row, col);
        for v in &mut self.cells[row * w..(row + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.cells[row * w..(row + 1) * w].to_vec();
        for r in 0..=self.constraints() {
            if r == row {
                continue;
            }
            let factor = self.get(r, col);
            if factor == 0.0 {
                continue;
            }
            for (v, &pv) in self.cells[r * w..(r + 1) * w].iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            *self.at(r, col) = 0.0;
        }
        self.basis[row] = col;
    }
}

/// A pure best response and its value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestResponse {
    pub action: usize,
    pub value: f64,
}

/// Best pure reply of `player` to the opponent's mixed strategy; ties go to
/// the lowest index.
pub fn best_response(game: &Game, player: Player, opp: &MixedStrategy) -> Result<BestResponse> {
    let utils = game.action_utilities(player, opp)?;
    let mut best = BestResponse {
        action: 0,
        value: utils[0],
    };
    for (a, &v) in utils.iter().enumerate().skip(1) {
        if v > best.value {
            best = BestResponse { action: a, value: v };
        }
    }
    Ok(best)
}

/// Both gap reports recomputed from their defining sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BruteForceGaps {
    pub cce: GapReport,
    pub nash_of_marginals: GapReport,
}

/// Recomputes the CCE gap of `mu` and the Nash gap of its marginals by
/// enumerating every deviation and summing over every cell.
///
/// Quadratic in the number of cells per player; intended for games up to
/// about 50x50.
pub fn brute_force_gaps(mu: &JointDistribution, game: &Game) -> Result<BruteForceGaps> {
    mu.check_game(game)?;
    let (m, n) = (game.rows(), game.cols());
    let a = game.payoffs();
    let w = mu.masses();

    // CCE: E_mu[u_i(dev, rho_-i) - u_i(rho)] for each pure dev
    let mut cce_row = Vec::with_capacity(m);
    for dev in 0..m {
        let mut gain = 0.0;
        for r in 0..m {
            for c in 0..n {
                gain += w[r * n + c] * (a[dev * n + c] - a[r * n + c]);
            }
        }
        cce_row.push(gain);
    }
    let mut cce_col = Vec::with_capacity(n);
    for dev in 0..n {
        let mut gain = 0.0;
        for r in 0..m {
            for c in 0..n {
                gain += w[r * n + c] * (-a[r * n + dev] + a[r * n + c]);
            }
        }
        cce_col.push(gain);
    }

    // Nash gap of the marginal profile
    let mut p = vec![0.0; m];
    let mut q = vec![0.0; n];
    for r in 0..m {
        for c in 0..n {
            p[r] += w[r * n + c];
            q[c] += w[r * n + c];
        }
    }
    let mut current = 0.0;
    for r in 0..m {
        for c in 0..n {
            current += p[r] * q[c] * a[r * n + c];
        }
    }
    let nash_row: Vec<f64> = (0..m)
        .map(|dev| {
            let mut v = 0.0;
            for c in 0..n {
                v += q[c] * a[dev * n + c];
            }
            v - current
        })
        .collect();
    let nash_col: Vec<f64> = (0..n)
        .map(|dev| {
            let mut v = 0.0;
            for r in 0..m {
                v -= p[r] * a[r * n + dev];
            }
            v + current
        })
        .collect();

    Ok(BruteForceGaps {
        cce: report(&cce_row, &cce_col),
        nash_of_marginals: report(&nash_row, &nash_col),
    })
}

fn report(row: &[f64], col: &[f64]) -> GapReport {
    fn best(gains: &[f64]) -> (usize, f64) {
        let mut idx = 0;
        for i in 1..gains.len() {
            if gains[i] > gains[idx] {
                idx = i;
            }
        }
        (idx, gains[idx])
    }
    let (ri, rg) = best(row);
    let (ci, cg) = best(col);
    GapReport {
        per_player_gap: PerPlayer::new(rg, cg),
        epsilon: [0.0, rg, cg].into_iter().fold(f64::NEG_INFINITY, f64::max),
        best_deviation: PerPlayer::new(ri, ci),
    }
}
