//! Dispatch from a bound property to the matching solver engine.

use super::{
    argopt, bounded::bounded_safety_roles, expected, jacobi_sweep, opt, solve_mean_payoff,
    solve_reachability, solve_until, SolveError, SolveResult, SolverParams,
};
use crate::game::{max_roles, Coalition, Direction, StochasticGame, StrategyProfile};
use crate::property::{BoundPath, BoundProperty};

/// Solve the objective a property describes. The result's values are the
/// property's value per state; the strategy optimizes it for the coalition.
pub fn evaluate(
    game: &StochasticGame,
    property: &BoundProperty,
    params: &SolverParams,
) -> Result<SolveResult, SolveError> {
    let coalition = &property.coalition;
    if coalition.is_empty() {
        return Err(SolveError::EmptyCoalition);
    }
    let direction = if property.quantifier.is_max() {
        Direction::Max
    } else {
        Direction::Min
    };
    match &property.path {
        BoundPath::Next(target) => Ok(solve_next(game, coalition, target, direction)),
        BoundPath::Finally(target) => {
            solve_reachability(game, coalition, target, direction, params)
        }
        BoundPath::FinallyBounded(target, k) => {
            Ok(solve_bounded_reach(game, coalition, target, *k, direction))
        }
        BoundPath::Until(phi1, phi2) => {
            solve_until(game, coalition, phi1, phi2, direction, params)
        }
        BoundPath::GloballyBounded(safe, k) => {
            let is_max = max_roles(game, coalition, direction);
            Ok(bounded_safety_roles(game, coalition, &is_max, safe, *k))
        }
        BoundPath::Globally(safe) => {
            // G phi = 1 - reach(!phi) with the optimization dualized
            let unsafe_set: Vec<bool> = safe.iter().map(|s| !s).collect();
            let dual = match direction {
                Direction::Max => Direction::Min,
                Direction::Min => Direction::Max,
            };
            let mut result =
                solve_reachability(game, coalition, &unsafe_set, dual, params)?;
            for v in &mut result.values {
                *v = 1.0 - *v;
            }
            result.q_values = None;
            Ok(result)
        }
        BoundPath::SteadyState => {
            let name = property
                .reward_name
                .as_ref()
                .expect("R quantifier without a reward name");
            let reward = game
                .reward_structures
                .get(name)
                .ok_or_else(|| SolveError::UnknownReward(name.clone()))?;
            solve_mean_payoff(game, coalition, reward, direction, params)
        }
    }
}

/// `X phi`: one expectation sweep over the indicator of the target set.
fn solve_next(
    game: &StochasticGame,
    coalition: &Coalition,
    target: &[bool],
    direction: Direction,
) -> SolveResult {
    let n = game.num_states();
    let is_max = max_roles(game, coalition, direction);
    let indicator: Vec<f64> = target.iter().map(|&t| if t { 1.0 } else { 0.0 }).collect();
    let values = jacobi_sweep(n, |s| {
        opt(
            game.states[s]
                .choices
                .iter()
                .map(|c| expected(c, &indicator)),
            is_max[s],
        )
    });
    let mut strategy = StrategyProfile::empty(n);
    for s in game.coalition_states(coalition) {
        let qs: Vec<f64> = game.states[s]
            .choices
            .iter()
            .map(|c| expected(c, &indicator))
            .collect();
        strategy.choice[s] = argopt(&game.states[s].choices, &qs, is_max[s]);
    }
    SolveResult {
        values,
        q_values: None,
        strategy,
        iterations: 1,
        converged: true,
    }
}

/// `F<=k phi`: k exact sweeps with the target absorbing at value 1.
fn solve_bounded_reach(
    game: &StochasticGame,
    coalition: &Coalition,
    target: &[bool],
    k: u32,
    direction: Direction,
) -> SolveResult {
    let n = game.num_states();
    let is_max = max_roles(game, coalition, direction);
    let mut values: Vec<f64> = target.iter().map(|&t| if t { 1.0 } else { 0.0 }).collect();
    for _ in 0..k {
        let prev = &values;
        values = jacobi_sweep(n, |s| {
            if target[s] {
                return 1.0;
            }
            opt(
                game.states[s].choices.iter().map(|c| expected(c, prev)),
                is_max[s],
            )
        });
    }
    let mut strategy = StrategyProfile::empty(n);
    for s in game.coalition_states(coalition) {
        let qs: Vec<f64> = game.states[s]
            .choices
            .iter()
            .map(|c| expected(c, &values))
            .collect();
        strategy.choice[s] = argopt(&game.states[s].choices, &qs, is_max[s]);
    }
    SolveResult {
        values,
        q_values: None,
        strategy,
        iterations: k as usize,
        converged: true,
    }
}
