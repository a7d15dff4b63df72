//! Step-bounded safety: the probability of staying inside a safe set for
//! the next k steps, under optimal coalition play against the worst-case
//! adversary. Exact finite sweeps, no epsilon.

use super::{argopt, expected, jacobi_sweep, opt, SolveError, SolveResult};
use crate::game::{max_roles, Coalition, Direction, StochasticGame, StrategyProfile};

/// `V_0(s) = [s safe]`, `V_j(s) = [s safe] * opt_a sum P(s,a,s') V_{j-1}(s')`
/// with max at coalition states and min at opponent states. Returns `V_k` as
/// values and `Q_k` for every state-action pair.
pub fn solve_bounded_safety(
    game: &StochasticGame,
    coalition: &Coalition,
    safe: &[bool],
    k: u32,
) -> Result<SolveResult, SolveError> {
    if coalition.is_empty() {
        return Err(SolveError::EmptyCoalition);
    }
    let is_max = max_roles(game, coalition, Direction::Max);
    Ok(bounded_safety_roles(game, coalition, &is_max, safe, k))
}

/// Same sweeps with the maximizer side chosen by the caller (min-queries
/// flip the roles).
pub(crate) fn bounded_safety_roles(
    game: &StochasticGame,
    coalition: &Coalition,
    is_max: &[bool],
    safe: &[bool],
    k: u32,
) -> SolveResult {
    assert!(k >= 1, "bounded safety requires a horizon of at least 1");
    let n = game.num_states();
    let mut values: Vec<f64> = (0..n).map(|s| if safe[s] { 1.0 } else { 0.0 }).collect();
    for _ in 0..k - 1 {
        let prev = &values;
        values = jacobi_sweep(n, |s| {
            if !safe[s] {
                return 0.0;
            }
            opt(
                game.states[s].choices.iter().map(|c| expected(c, prev)),
                is_max[s],
            )
        });
    }
    // final sweep: keep per-action values
    let q_values: Vec<Vec<f64>> = (0..n)
        .map(|s| {
            game.states[s]
                .choices
                .iter()
                .map(|c| if safe[s] { expected(c, &values) } else { 0.0 })
                .collect()
        })
        .collect();
    let values: Vec<f64> = (0..n)
        .map(|s| opt(q_values[s].iter().copied(), is_max[s]))
        .collect();
    let mut strategy = StrategyProfile::empty(n);
    for s in 0..n {
        if coalition.contains(game.states[s].owner) {
            strategy.choice[s] = argopt(&game.states[s].choices, &q_values[s], is_max[s]);
        }
    }
    SolveResult {
        values,
        q_values: Some(q_values),
        strategy,
        iterations: k as usize,
        converged: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameBuilder;
    use crate::oracle::{tree_bounded_safety_q, tree_bounded_safety_value};
    use crate::random::{random_game, random_state_set, RandomGameConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_safe_is_one_everywhere() {
        let mut b = GameBuilder::new(&["p1", "p2"]);
        let s0 = b.add_state(0, &[]);
        let s1 = b.add_state(1, &[]);
        b.add_choice(s0, "a", &[(s0, 0.5), (s1, 0.5)]);
        b.add_choice(s1, "b", &[(s0, 1.0)]);
        let game = b.build();
        for k in [1, 3, 7] {
            let r = solve_bounded_safety(&game, &Coalition::new([0]), &[true, true], k).unwrap();
            assert!(r.values.iter().all(|&v| v == 1.0));
            assert!(r.q_values.unwrap().iter().flatten().all(|&q| q == 1.0));
        }
    }

    #[test]
    fn one_step_q_arithmetic() {
        let mut b = GameBuilder::new(&["p1"]);
        let s0 = b.add_state(0, &[]);
        let s1 = b.add_state(0, &[]);
        b.add_choice(s0, "alpha", &[(s0, 0.9), (s1, 0.1)]);
        b.add_choice(s1, "stay", &[(s1, 1.0)]);
        let game = b.build();
        let r = solve_bounded_safety(&game, &Coalition::new([0]), &[true, false], 1).unwrap();
        assert_eq!(r.q_values.as_ref().unwrap()[0][0], 0.9);
        assert_eq!(r.values[0], 0.9);
        assert_eq!(r.values[1], 0.0);
    }

    #[test]
    fn matches_exhaustive_tree_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = RandomGameConfig {
            states: 5,
            ..Default::default()
        };
        for _ in 0..20 {
            let game = random_game(&mut rng, &cfg);
            let safe = random_state_set(&mut rng, 5);
            let coalition = Coalition::new([0]);
            let is_max = max_roles(&game, &coalition, Direction::Max);
            let r = solve_bounded_safety(&game, &coalition, &safe, 3).unwrap();
            let q = r.q_values.unwrap();
            for s in 0..5 {
                let v = tree_bounded_safety_value(&game, &is_max, &safe, s, 3);
                assert!((r.values[s] - v).abs() < 1e-12);
                for (i, _) in game.states[s].choices.iter().enumerate() {
                    let tq = tree_bounded_safety_q(&game, &is_max, &safe, s, i, 3);
                    assert!((q[s][i] - tq).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn anti_monotone_in_horizon() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let cfg = RandomGameConfig::default();
        for _ in 0..10 {
            let game = random_game(&mut rng, &cfg);
            let safe = random_state_set(&mut rng, cfg.states);
            let coalition = Coalition::new([0]);
            let mut prev: Option<Vec<f64>> = None;
            for k in 1..=5 {
                let r = solve_bounded_safety(&game, &coalition, &safe, k).unwrap();
                if let Some(p) = prev {
                    for s in 0..cfg.states {
                        assert!(r.values[s] <= p[s] + 1e-12);
                    }
                }
                prev = Some(r.values);
            }
        }
    }

    #[test]
    fn empty_coalition_rejected() {
        let mut b = GameBuilder::new(&["p1"]);
        let s0 = b.add_state(0, &[]);
        b.add_choice(s0, "a", &[(s0, 1.0)]);
        let game = b.build();
        assert!(matches!(
            solve_bounded_safety(&game, &Coalition::new([]), &[true], 1),
            Err(SolveError::EmptyCoalition)
        ));
    }
}
