//! Mean-payoff (long-run average reward) objectives.
//!
//! Total-reward value iteration with a damping factor: the damped operator
//! `v' = (1-alpha) v + alpha (r + P v)` makes the iteration aperiodic, so
//! per-state windowed gain estimates `(v_n - v_{n-w}) / (w alpha)` settle
//! even on periodic game graphs. Gains are state-dependent throughout; no
//! multi-chain assumption is made. Termination is heuristic (windowed gain
//! differences) and honestly reported via `converged`.

use std::collections::VecDeque;

use super::{expected, jacobi_sweep, SolveError, SolveResult, SolverParams};
use crate::game::{
    max_roles, Choice, Coalition, Direction, RewardStructure, StochasticGame, StrategyProfile,
};

const ALPHA: f64 = 0.5;

pub fn solve_mean_payoff(
    game: &StochasticGame,
    coalition: &Coalition,
    reward: &RewardStructure,
    direction: Direction,
    params: &SolverParams,
) -> Result<SolveResult, SolveError> {
    if coalition.is_empty() {
        return Err(SolveError::EmptyCoalition);
    }
    let n = game.num_states();
    let is_max = max_roles(game, coalition, direction);
    let w = params.lra_window.max(1);

    let one_step = |s: usize, c: &Choice, v: &[f64]| -> f64 {
        reward.state_reward(s) + reward.action_reward(s, c.action_id) + expected(c, v)
    };

    let mut v = vec![0.0; n];
    // value vectors of the last 2w iterations (front is the oldest)
    let mut history: VecDeque<Vec<f64>> = VecDeque::with_capacity(2 * w + 1);
    history.push_back(v.clone());
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iterations {
        iterations += 1;
        let prev = &v;
        let next = jacobi_sweep(n, |s| {
            let t = super::opt(
                game.states[s].choices.iter().map(|c| one_step(s, c, prev)),
                is_max[s],
            );
            (1.0 - ALPHA) * prev[s] + ALPHA * t
        });
        v = next;
        history.push_back(v.clone());
        if history.len() > 2 * w + 1 {
            history.pop_front();
        }
        if history.len() == 2 * w + 1 {
            // g_n vs g_{n-w}
            let oldest = &history[0];
            let mid = &history[w];
            let g_now: Vec<f64> = (0..n)
                .map(|s| (v[s] - mid[s]) / (w as f64 * ALPHA))
                .collect();
            let worst = (0..n)
                .map(|s| {
                    let g_prev = (mid[s] - oldest[s]) / (w as f64 * ALPHA);
                    (g_now[s] - g_prev).abs()
                })
                .fold(0.0, f64::max);
            // stationary-looking gains are not enough in multi-chain games:
            // a state can sit on a lower-gain chain for many sweeps before
            // the better chain's values overtake it, so also require the
            // gain optimality equation g(s) = opt_c E_c[g] to hold
            let worst_bellman = (0..n)
                .map(|s| {
                    let best = super::opt(
                        game.states[s].choices.iter().map(|c| expected(c, &g_now)),
                        is_max[s],
                    );
                    (g_now[s] - best).abs()
                })
                .fold(0.0, f64::max);
            if worst < params.lra_gain_tolerance
                && worst_bellman < params.lra_gain_tolerance.max(1e-6)
            {
                converged = true;
                break;
            }
        }
    }

    // gain estimates from the last full window (fall back to the whole run
    // if it was shorter than one window)
    let span = history.len() - 1;
    let window = span.min(w);
    let base = &history[history.len() - 1 - window];
    let values: Vec<f64> = if window == 0 {
        vec![0.0; n]
    } else {
        (0..n)
            .map(|s| (v[s] - base[s]) / (window as f64 * ALPHA))
            .collect()
    };

    // per-action one-sweep lookahead gains, and the final-sweep strategy
    let mut q_values: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut strategy = StrategyProfile::empty(n);
    for s in 0..n {
        let qs: Vec<f64> = game.states[s]
            .choices
            .iter()
            .map(|c| {
                let stepped = (1.0 - ALPHA) * v[s] + ALPHA * one_step(s, c, &v);
                if window == 0 {
                    0.0
                } else {
                    // base vector shifted one sweep forward
                    let base_next = &history[history.len() - window];
                    (stepped - base_next[s]) / (window as f64 * ALPHA)
                }
            })
            .collect();
        if coalition.contains(game.states[s].owner) && !game.states[s].choices.is_empty() {
            // argopt on the raw one-step values keeps the asymptotic
            // gain-then-bias ordering
            let raw: Vec<f64> = game.states[s]
                .choices
                .iter()
                .map(|c| one_step(s, c, &v))
                .collect();
            strategy.choice[s] = super::argopt(&game.states[s].choices, &raw, is_max[s]);
        }
        q_values.push(qs);
    }

    Ok(SolveResult {
        values,
        q_values: Some(q_values),
        strategy,
        iterations,
        converged,
    })
}
