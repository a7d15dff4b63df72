//! Reachability and until objectives: qualitative precomputation of the
//! exact value-0 and value-1 state sets, then value iteration from below on
//! the remaining states.

use super::{argopt, expected, jacobi_sweep, opt, SolveError, SolveResult, SolverParams};
use crate::game::{
    max_roles, Coalition, Direction, StateId, StochasticGame, StrategyProfile,
};

/// Probability of eventually reaching `target`, with the coalition
/// optimizing `direction` and the complement opposing. Targets are made
/// absorbing during solving; the input game is untouched.
pub fn solve_reachability(
    game: &StochasticGame,
    coalition: &Coalition,
    target: &[bool],
    direction: Direction,
    params: &SolverParams,
) -> Result<SolveResult, SolveError> {
    if coalition.is_empty() {
        return Err(SolveError::EmptyCoalition);
    }
    let blocked = vec![false; game.num_states()];
    Ok(solve_reach_like(game, coalition, target, &blocked, direction, params))
}

/// `phi1 U phi2`: reach `phi2` while staying in `phi1`. States outside both
/// sets are pinned to value 0.
pub fn solve_until(
    game: &StochasticGame,
    coalition: &Coalition,
    phi1: &[bool],
    phi2: &[bool],
    direction: Direction,
    params: &SolverParams,
) -> Result<SolveResult, SolveError> {
    if coalition.is_empty() {
        return Err(SolveError::EmptyCoalition);
    }
    let blocked: Vec<bool> = (0..game.num_states())
        .map(|s| !phi1[s] && !phi2[s])
        .collect();
    Ok(solve_reach_like(game, coalition, phi2, &blocked, direction, params))
}

/// Least fixpoint of "can reach the target with positive probability":
/// existential on the maximizer side, universal on the minimizer side.
/// The complement is the exact value-0 set. `blocked` states never join.
pub(crate) fn positive_reach_set(
    game: &StochasticGame,
    is_max: &[bool],
    target: &[bool],
    blocked: &[bool],
) -> Vec<bool> {
    let n = game.num_states();
    let mut z: Vec<bool> = (0..n).map(|s| target[s] && !blocked[s]).collect();
    loop {
        let mut changed = false;
        for s in 0..n {
            if z[s] || blocked[s] {
                continue;
            }
            let hits = |c: &crate::game::Choice| c.branches.iter().any(|&(t, _)| z[t]);
            let joins = if is_max[s] {
                game.states[s].choices.iter().any(hits)
            } else {
                !game.states[s].choices.is_empty() && game.states[s].choices.iter().all(hits)
            };
            if joins {
                z[s] = true;
                changed = true;
            }
        }
        if !changed {
            return z;
        }
    }
}

/// Exact value-1 set via the standard two-nested-fixpoint attractor on the
/// game graph. Also records, for maximizer states, a witness choice that
/// forces almost-sure reachability.
pub(crate) fn almost_sure_reach_set(
    game: &StochasticGame,
    is_max: &[bool],
    target: &[bool],
    blocked: &[bool],
) -> (Vec<bool>, Vec<Option<usize>>) {
    let n = game.num_states();
    let mut x: Vec<bool> = (0..n).map(|s| !blocked[s]).collect();
    loop {
        let mut y: Vec<bool> = (0..n).map(|s| target[s] && !blocked[s]).collect();
        let mut round_witness: Vec<Option<usize>> = vec![None; n];
        loop {
            let mut changed = false;
            for s in 0..n {
                if y[s] || !x[s] || blocked[s] {
                    continue;
                }
                let good = |c: &crate::game::Choice| {
                    c.branches.iter().all(|&(t, _)| x[t])
                        && c.branches.iter().any(|&(t, _)| y[t])
                };
                if is_max[s] {
                    if let Some(idx) = game.states[s].choices.iter().position(good) {
                        y[s] = true;
                        round_witness[s] = Some(idx);
                        changed = true;
                    }
                } else if !game.states[s].choices.is_empty()
                    && game.states[s].choices.iter().all(good)
                {
                    y[s] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if y == x {
            return (x, round_witness);
        }
        x = y;
    }
}

pub(crate) fn solve_reach_like(
    game: &StochasticGame,
    coalition: &Coalition,
    target: &[bool],
    blocked: &[bool],
    direction: Direction,
    params: &SolverParams,
) -> SolveResult {
    let n = game.num_states();
    let is_max = max_roles(game, coalition, direction);
    let positive = positive_reach_set(game, &is_max, target, blocked);
    let (value1, as_witness) = almost_sure_reach_set(game, &is_max, target, blocked);

    let mut values: Vec<f64> = (0..n).map(|s| if value1[s] { 1.0 } else { 0.0 }).collect();
    let pinned: Vec<bool> = (0..n)
        .map(|s| value1[s] || !positive[s] || target[s] || blocked[s])
        .collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iterations {
        iterations += 1;
        let prev = &values;
        let next = jacobi_sweep(n, |s| {
            if pinned[s] {
                return prev[s];
            }
            let v = opt(
                game.states[s].choices.iter().map(|c| expected(c, prev)),
                is_max[s],
            );
            debug_assert!(v >= prev[s] - 1e-12, "iterates must be non-decreasing");
            v
        });
        let diff = next
            .iter()
            .zip(values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        values = next;
        if diff < params.epsilon {
            converged = true;
            break;
        }
    }
    super::clamp_probabilities(&mut values);

    let strategy = extract_strategy(
        game,
        coalition,
        &is_max,
        target,
        blocked,
        &value1,
        &as_witness,
        &values,
        params,
    );
    SolveResult {
        values,
        q_values: None,
        strategy,
        iterations,
        converged,
    }
}

/// Memoryless strategy for the coalition.
///
/// When the coalition is the reach-maximizing side, a plain argmax over the
/// converged values is not enough: value-preserving choices may stall in a
/// plateau (e.g. a self-loop whose q ties the optimum). The witness choices
/// from the value-1 attractor cover the almost-sure region; the rest is
/// assigned by a progress ranking that only admits value-optimal choices
/// with a positive-probability step towards already-ranked states. The
/// reach-minimizing side only needs value-preserving choices.
#[allow(clippy::too_many_arguments)]
fn extract_strategy(
    game: &StochasticGame,
    coalition: &Coalition,
    is_max: &[bool],
    target: &[bool],
    blocked: &[bool],
    value1: &[bool],
    as_witness: &[Option<usize>],
    values: &[f64],
    params: &SolverParams,
) -> StrategyProfile {
    let n = game.num_states();
    let tol = (params.epsilon * 8.0).max(1e-12);
    let q_of = |s: StateId, i: usize| expected(&game.states[s].choices[i], values);

    let mut strategy = StrategyProfile::empty(n);
    let mut ranked: Vec<bool> = (0..n).map(|s| target[s] && !blocked[s]).collect();
    let mut chosen: Vec<Option<usize>> = vec![None; n];
    // almost-sure region first: attractor witnesses are always progressive
    for s in 0..n {
        if value1[s] && !target[s] && is_max[s] {
            chosen[s] = as_witness[s];
        }
    }
    loop {
        let mut changed = false;
        for s in 0..n {
            if ranked[s] || blocked[s] || values[s] <= tol {
                continue;
            }
            let choices = &game.states[s].choices;
            if is_max[s] {
                // among value-optimal choices, lowest action id with a step
                // towards the ranked region
                let mut pick: Option<usize> = None;
                for (i, c) in choices.iter().enumerate() {
                    if q_of(s, i) < values[s] - tol {
                        continue;
                    }
                    if !c.branches.iter().any(|&(t, _)| ranked[t]) {
                        continue;
                    }
                    let better = match pick {
                        None => true,
                        Some(p) => c.action_id < choices[p].action_id,
                    };
                    if better {
                        pick = Some(i);
                    }
                }
                if let Some(i) = pick {
                    if chosen[s].is_none() {
                        chosen[s] = Some(i);
                    }
                    ranked[s] = true;
                    changed = true;
                }
            } else {
                // a minimizer state is ranked once every near-optimal choice
                // of the opponent steps towards the ranked region
                let all_progress = choices.iter().enumerate().all(|(i, c)| {
                    q_of(s, i) > values[s] + tol || c.branches.iter().any(|&(t, _)| ranked[t])
                });
                if all_progress {
                    ranked[s] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    for s in 0..n {
        if !coalition.contains(game.states[s].owner) {
            continue;
        }
        if game.states[s].choices.is_empty() {
            continue;
        }
        strategy.choice[s] = if is_max[s] {
            match chosen[s] {
                Some(i) => Some(i),
                None => {
                    // value-0 states or unranked leftovers: plain argmax
                    let qs: Vec<f64> = (0..game.states[s].choices.len())
                        .map(|i| q_of(s, i))
                        .collect();
                    argopt(&game.states[s].choices, &qs, true)
                }
            }
        } else {
            // value-preserving choices suffice for the minimizing side
            let qs: Vec<f64> = (0..game.states[s].choices.len())
                .map(|i| q_of(s, i))
                .collect();
            argopt(&game.states[s].choices, &qs, false)
        };
    }
    strategy
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameBuilder;
    use crate::oracle::{oracle_value, Objective, OracleBudget};
    use crate::random::{random_game, random_state_set, RandomGameConfig};
    use crate::solver::fix_coalition_strategy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn target_everywhere_is_one() {
        let mut b = GameBuilder::new(&["p1"]);
        let s0 = b.add_state(0, &[]);
        b.add_choice(s0, "a", &[(s0, 1.0)]);
        let game = b.build();
        let r = solve_reachability(
            &game,
            &Coalition::new([0]),
            &[true],
            Direction::Max,
            &SolverParams::default(),
        )
        .unwrap();
        assert_eq!(r.values, vec![1.0]);
        assert!(r.converged);
    }

    #[test]
    fn one_step_half_half() {
        let mut b = GameBuilder::new(&["p1"]);
        let s0 = b.add_state(0, &[]);
        let target = b.add_state(0, &[]);
        let sink = b.add_state(0, &[]);
        b.add_choice(s0, "go", &[(target, 0.5), (sink, 0.5)]);
        b.add_choice(target, "stay", &[(target, 1.0)]);
        b.add_choice(sink, "stay", &[(sink, 1.0)]);
        let game = b.build();
        let r = solve_reachability(
            &game,
            &Coalition::new([0]),
            &[false, true, false],
            Direction::Max,
            &SolverParams::default(),
        )
        .unwrap();
        assert!((r.values[0] - 0.5).abs() < 1e-6);
        assert_eq!(r.values[2], 0.0);
    }

    #[test]
    fn stalling_tie_does_not_trap_the_strategy() {
        // self-loop q ties the optimum; argmax with lowest action id would
        // stall forever, the progress ranking must pick the move
        let mut b = GameBuilder::new(&["p1"]);
        let s0 = b.add_state(0, &[]);
        let target = b.add_state(0, &[]);
        let sink = b.add_state(0, &[]);
        b.add_choice(s0, "loop", &[(s0, 1.0)]);
        b.add_choice(s0, "move", &[(target, 0.5), (sink, 0.5)]);
        b.add_choice(target, "stay", &[(target, 1.0)]);
        b.add_choice(sink, "stay", &[(sink, 1.0)]);
        let game = b.build();
        let coalition = Coalition::new([0]);
        let r = solve_reachability(
            &game,
            &coalition,
            &[false, true, false],
            Direction::Max,
            &SolverParams::default(),
        )
        .unwrap();
        assert_eq!(r.strategy.choice[0], Some(1));
        // certifying re-solve: coalition fixed, value must be preserved
        let fixed = fix_coalition_strategy(&game, &coalition, &r.strategy);
        let r2 = solve_reachability(
            &fixed,
            &coalition,
            &[false, true, false],
            Direction::Max,
            &SolverParams::default(),
        )
        .unwrap();
        assert!((r2.values[0] - r.values[0]).abs() < 2e-6);
    }

    #[test]
    fn until_cases() {
        let mut b = GameBuilder::new(&["p1"]);
        let s0 = b.add_state(0, &[]);
        let s1 = b.add_state(0, &[]);
        b.add_choice(s0, "a", &[(s1, 1.0)]);
        b.add_choice(s1, "a", &[(s0, 1.0)]);
        let game = b.build();
        let coalition = Coalition::new([0]);
        let params = SolverParams::default();
        // phi1 empty, initial not in phi2 -> 0
        let r = solve_until(
            &game,
            &coalition,
            &[false, false],
            &[false, true],
            Direction::Max,
            &params,
        )
        .unwrap();
        assert_eq!(r.values[0], 0.0);
        // phi2 everywhere -> 1
        let r = solve_until(
            &game,
            &coalition,
            &[false, false],
            &[true, true],
            Direction::Max,
            &params,
        )
        .unwrap();
        assert_eq!(r.values, vec![1.0, 1.0]);
    }

    #[test]
    fn random_games_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let cfg = RandomGameConfig::default();
        let params = SolverParams::default();
        let budget = OracleBudget::default();
        for round in 0..40 {
            let game = random_game(&mut rng, &cfg);
            let target = random_state_set(&mut rng, cfg.states);
            let coalition = Coalition::new([0]);
            for direction in [Direction::Max, Direction::Min] {
                let r = solve_reachability(&game, &coalition, &target, direction, &params).unwrap();
                let v = oracle_value(
                    &game,
                    &coalition,
                    &Objective::Reach(target.clone()),
                    direction,
                    &budget,
                )
                .unwrap();
                for s in 0..cfg.states {
                    assert!(
                        (r.values[s] - v[s]).abs() < 1e-5,
                        "round {round} {direction:?} state {s}: solver {} oracle {}",
                        r.values[s],
                        v[s]
                    );
                }
            }
        }
    }

    #[test]
    fn random_until_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let cfg = RandomGameConfig::default();
        let params = SolverParams::default();
        let budget = OracleBudget::default();
        for _ in 0..25 {
            let game = random_game(&mut rng, &cfg);
            let phi1 = random_state_set(&mut rng, cfg.states);
            let phi2 = random_state_set(&mut rng, cfg.states);
            let coalition = Coalition::new([0]);
            let r = solve_until(&game, &coalition, &phi1, &phi2, Direction::Max, &params).unwrap();
            let v = oracle_value(
                &game,
                &coalition,
                &Objective::Until(phi1.clone(), phi2.clone()),
                Direction::Max,
                &budget,
            )
            .unwrap();
            for s in 0..cfg.states {
                assert!((r.values[s] - v[s]).abs() < 1e-5);
            }
        }
    }
}
