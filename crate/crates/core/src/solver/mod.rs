//! Value-iteration engines for bounded safety, reachability/until and
//! mean-payoff objectives on stochastic multi-player games, with memoryless
//! deterministic strategy extraction.

mod bounded;
mod evaluate;
mod lra;
mod reach;

pub use bounded::solve_bounded_safety;
pub use evaluate::evaluate;
pub use lra::solve_mean_payoff;
pub use reach::{solve_reachability, solve_until};

use crate::game::{Choice, Coalition, StateId, StochasticGame, StrategyProfile};
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct SolverParams {
    pub epsilon: f64,
    pub max_iterations: usize,
    pub lra_window: usize,
    pub lra_gain_tolerance: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            epsilon: 1e-6,
            max_iterations: 1_000_000,
            lra_window: 100,
            lra_gain_tolerance: 1e-4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Per-state value of the objective.
    pub values: Vec<f64>,
    /// Per-(state, choice) values; present for bounded safety and mean-payoff.
    pub q_values: Option<Vec<Vec<f64>>>,
    /// Memoryless deterministic strategy for the coalition (choice index per
    /// coalition-owned state).
    pub strategy: StrategyProfile,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("coalition must be non-empty")]
    EmptyCoalition,
    #[error("unknown reward structure {0:?}")]
    UnknownReward(String),
}

/// One Jacobi sweep of `state_value` over all states, parallelized across
/// states; values are read from the previous vector only, so results are
/// independent of the thread count.
pub(crate) fn jacobi_sweep<F>(num_states: usize, state_value: F) -> Vec<f64>
where
    F: Fn(StateId) -> f64 + Sync + Send,
{
    (0..num_states)
        .into_par_iter()
        .map(state_value)
        .collect()
}

pub(crate) fn expected(choice: &Choice, values: &[f64]) -> f64 {
    choice.branches.iter().map(|&(t, p)| p * values[t]).sum()
}

/// Best choice index by q-value; ties go to the lowest action id.
pub(crate) fn argopt(choices: &[Choice], qs: &[f64], maximize: bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, c) in choices.iter().enumerate() {
        let better = match best {
            None => true,
            Some(b) => {
                let improves = if maximize { qs[i] > qs[b] } else { qs[i] < qs[b] };
                improves || (qs[i] == qs[b] && c.action_id < choices[b].action_id)
            }
        };
        if better {
            best = Some(i);
        }
    }
    best
}

pub(crate) fn opt(values: impl Iterator<Item = f64>, maximize: bool) -> f64 {
    if maximize {
        values.fold(f64::NEG_INFINITY, f64::max)
    } else {
        values.fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn clamp_probabilities(values: &mut [f64]) {
    for v in values {
        *v = v.clamp(0.0, 1.0);
    }
}

/// A copy of the game where every coalition-owned state keeps only the
/// choice picked by `strategy`. Used to certify strategy optimality by
/// re-solving with the adversary free.
pub fn fix_coalition_strategy(
    game: &StochasticGame,
    coalition: &Coalition,
    strategy: &StrategyProfile,
) -> StochasticGame {
    let mut fixed = game.clone();
    for s in 0..fixed.states.len() {
        if coalition.contains(fixed.states[s].owner) {
            if let Some(idx) = strategy.choice[s] {
                let kept = fixed.states[s].choices[idx].clone();
                fixed.states[s].choices = vec![kept];
            }
        }
    }
    fixed
}
