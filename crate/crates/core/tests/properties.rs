use cce2nash::equilibrium::{
    cce_gap, deviation_value, deviation_value_direct, expected_joint_utility, marginal, marginal_profile, nash_gap,
    two_eps_check, value_consistency_check, JointDistribution,
};
use cce2nash::game::{Game, MixedStrategy, Player, StrategyProfile};
use cce2nash::oracle::{best_response, brute_force_gaps};
use proptest::prelude::*;

fn weights(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, k).prop_map(|mut w| {
        if w.iter().all(|v| *v == 0.0) {
            w[0] = 1.0;
        }
        let s: f64 = w.iter().sum();
        w.iter().map(|v| v / s).collect()
    })
}

/// Game with payoffs in [-1, 1], a joint distribution, and one mixed
/// deviation per player.
fn instance(max_dim: usize) -> impl Strategy<Value = (Game, JointDistribution, MixedStrategy, MixedStrategy)> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(m, n)| {
        (
            prop::collection::vec(-1.0f64..=1.0, m * n),
            weights(m * n),
            weights(m),
            weights(n),
        )
            .prop_map(move |(payoff, mass, dr, dc)| {
                (
                    Game::from_flat(m, n, payoff).unwrap(),
                    JointDistribution::new(m, n, mass).unwrap(),
                    MixedStrategy::new(dr).unwrap(),
                    MixedStrategy::new(dc).unwrap(),
                )
            })
    })
}

fn shifted(game: &Game, k: f64) -> Game {
    Game::from_flat(game.rows(), game.cols(), game.payoffs().iter().map(|v| v + k).collect()).unwrap()
}

fn argmax_set(values: &[f64]) -> Vec<usize> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..values.len()).filter(|&i| (values[i] - max).abs() <= 1e-12).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn zero_sum_identity((g, ..) in instance(8)) {
        for r in 0..g.rows() {
            for c in 0..g.cols() {
                let sum = g.pure_utility(Player::Row, r, c).unwrap() + g.pure_utility(Player::Col, r, c).unwrap();
                prop_assert_eq!(sum, 0.0);
            }
        }
    }

    #[test]
    fn expected_utility_is_bilinear(
        (g, _, s1, t) in instance(6),
        lambda in 0.0f64..=1.0,
        seed_w in prop::collection::vec(0.0f64..1.0, 6),
    ) {
        let mut w: Vec<f64> = seed_w[..g.rows()].to_vec();
        w[0] += 0.1;
        let s2 = MixedStrategy::from_weights(&w).unwrap();
        let mix: Vec<f64> = s1.probs().iter().zip(s2.probs()).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let mix = MixedStrategy::new(mix).unwrap();
        let u = |s: &MixedStrategy| g.expected_utility(Player::Row, &StrategyProfile::new(s.clone(), t.clone())).unwrap();
        prop_assert!((u(&mix) - (lambda * u(&s1) + (1.0 - lambda) * u(&s2))).abs() <= 1e-12);
    }

    #[test]
    fn point_masses_reproduce_pure_utility((g, ..) in instance(6)) {
        for r in 0..g.rows() {
            for c in 0..g.cols() {
                let profile = StrategyProfile::new(MixedStrategy::pure(g.rows(), r), MixedStrategy::pure(g.cols(), c));
                for p in Player::BOTH {
                    prop_assert_eq!(g.expected_utility(p, &profile).unwrap(), g.pure_utility(p, r, c).unwrap());
                }
            }
        }
    }

    #[test]
    fn constant_sum_preserves_best_responses(
        (g, _, s, t) in instance(6),
        c0 in -5.0f64..5.0,
    ) {
        // split c0 unevenly so the bimatrix is not already symmetric
        let row: Vec<Vec<f64>> = (0..g.rows()).map(|r| g.payoff_row(r).iter().map(|v| v + 0.3 * c0).collect()).collect();
        let col: Vec<Vec<f64>> = (0..g.rows()).map(|r| g.payoff_row(r).iter().map(|v| -v + 0.7 * c0).collect()).collect();
        let normalized = Game::from_constant_sum(&row, &col).unwrap();
        for (player, opp) in [(Player::Row, &t), (Player::Col, &s)] {
            let before: Vec<f64> = (0..g.num_actions(player))
                .map(|a| opp.probs().iter().enumerate().map(|(b, p)| {
                    let (r, c) = if player == Player::Row { (a, b) } else { (b, a) };
                    p * if player == Player::Row { row[r][c] } else { col[r][c] }
                }).sum())
                .collect();
            let after = normalized.action_utilities(player, opp).unwrap();
            prop_assert_eq!(argmax_set(&before), argmax_set(&after));
            let br = best_response(&normalized, player, opp).unwrap();
            prop_assert!(argmax_set(&before).contains(&br.action));
        }
    }

    #[test]
    fn lemma_equality((g, mu, dr, dc) in instance(10)) {
        for (player, dev) in [(Player::Row, &dr), (Player::Col, &dc)] {
            let a = deviation_value(&mu, &g, player, dev).unwrap();
            let b = deviation_value_direct(&mu, &g, player, dev).unwrap();
            prop_assert!((a - b).abs() <= 1e-9, "{} vs {}", a, b);
        }
    }

    #[test]
    fn marginals_are_valid_strategies((_, mu, ..) in instance(10)) {
        for p in Player::BOTH {
            let s = marginal(&mu, p);
            prop_assert!(MixedStrategy::new(s.probs().to_vec()).is_ok());
        }
    }

    #[test]
    fn pure_deviations_suffice((g, mu, dr, dc) in instance(8)) {
        for (player, dev) in [(Player::Row, &dr), (Player::Col, &dc)] {
            let k = g.num_actions(player);
            let best_pure = (0..k)
                .map(|a| deviation_value(&mu, &g, player, &MixedStrategy::pure(k, a)).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(deviation_value(&mu, &g, player, dev).unwrap() <= best_pure + 1e-12);
        }
    }

    #[test]
    fn value_consistency_holds((g, mu, ..) in instance(10)) {
        prop_assert!(value_consistency_check(&mu, &g).unwrap().holds);
    }

    #[test]
    fn two_eps_bound_holds((g, mu, ..) in instance(10)) {
        let check = two_eps_check(&mu, &g).unwrap();
        prop_assert!(check.holds, "{:?}", check);
    }

    #[test]
    fn gaps_are_shift_invariant((g, mu, ..) in instance(8), k in -10.0f64..10.0) {
        let h = shifted(&g, k);
        let profile = marginal_profile(&mu);
        prop_assert!((cce_gap(&mu, &g).unwrap().epsilon - cce_gap(&mu, &h).unwrap().epsilon).abs() <= 1e-9);
        prop_assert!((nash_gap(&profile, &g).unwrap().epsilon - nash_gap(&profile, &h).unwrap().epsilon).abs() <= 1e-9);
    }

    #[test]
    fn consistency_gap_is_symmetric_between_players((g, mu, ..) in instance(8)) {
        let profile = marginal_profile(&mu);
        let diff = |p: Player| (expected_joint_utility(&mu, &g, p).unwrap() - g.expected_utility(p, &profile).unwrap()).abs();
        prop_assert_eq!(diff(Player::Row), diff(Player::Col));
    }

    #[test]
    fn brute_force_agrees_with_module((g, mu, ..) in instance(10)) {
        let brute = brute_force_gaps(&mu, &g).unwrap();
        let cce = cce_gap(&mu, &g).unwrap();
        let nash = nash_gap(&marginal_profile(&mu), &g).unwrap();
        prop_assert!((brute.cce.epsilon - cce.epsilon).abs() <= 1e-9);
        prop_assert!((brute.nash_of_marginals.epsilon - nash.epsilon).abs() <= 1e-9);
        prop_assert!((brute.cce.per_player_gap.row - cce.per_player_gap.row).abs() <= 1e-9);
        prop_assert!((brute.cce.per_player_gap.col - cce.per_player_gap.col).abs() <= 1e-9);
    }

    #[test]
    fn epsilon_dominates_clipped_gaps((g, mu, ..) in instance(8)) {
        let r = cce_gap(&mu, &g).unwrap();
        prop_assert!(r.epsilon >= 0.0);
        prop_assert!(r.epsilon >= r.per_player_gap.row.max(0.0));
        prop_assert!(r.epsilon >= r.per_player_gap.col.max(0.0));
    }
}

/// The CCE epsilon measured on a constant-sum bimatrix (each player's own
/// payoffs) equals the epsilon of its zero-sum normalization.
#[test]
#[allow(clippy::needless_range_loop)]
fn epsilon_is_the_same_before_and_after_normalization() {
    let row = vec![vec![3.0, 0.5, 2.0], vec![1.0, 4.0, 0.0]];
    let c0 = 4.0;
    let col: Vec<Vec<f64>> = row.iter().map(|r| r.iter().map(|v| c0 - v).collect()).collect();
    let g = Game::from_constant_sum(&row, &col).unwrap();
    let mu = JointDistribution::from_matrix(&[[0.1, 0.3, 0.05], [0.2, 0.15, 0.2]]).unwrap();

    // direct enumeration on the original payoffs
    let mut row_gap = f64::NEG_INFINITY;
    for dev in 0..2 {
        let mut gain = 0.0;
        for r in 0..2 {
            for c in 0..3 {
                gain += mu.mass(r, c) * (row[dev][c] - row[r][c]);
            }
        }
        row_gap = row_gap.max(gain);
    }
    let mut col_gap = f64::NEG_INFINITY;
    for dev in 0..3 {
        let mut gain = 0.0;
        for r in 0..2 {
            for c in 0..3 {
                gain += mu.mass(r, c) * (col[r][dev] - col[r][c]);
            }
        }
        col_gap = col_gap.max(gain);
    }
    let original = 0f64.max(row_gap).max(col_gap);
    let normalized = cce_gap(&mu, &g).unwrap();
    assert!((original - normalized.epsilon).abs() <= 1e-12);
    assert!((row_gap - normalized.per_player_gap.row).abs() <= 1e-12);
    assert!((col_gap - normalized.per_player_gap.col).abs() <= 1e-12);
}
