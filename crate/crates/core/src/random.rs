//! Seeded random game generation, used by the test suites and benchmarks.
//!
//! Branch probabilities are dyadic (multiples of 1/8) so that every choice
//! sums to exactly 1.0 in binary floating point.

use crate::game::{GameBuilder, StochasticGame};
use rand::prelude::*;

#[derive(Debug, Clone)]
pub struct RandomGameConfig {
    pub states: usize,
    pub max_choices: usize,
    pub max_branches: usize,
    pub players: usize,
    /// When set, a reward structure named "r" with state rewards in [0,1)
    /// and occasional action rewards is attached.
    pub with_rewards: bool,
    /// Turn states 0 and 1 into distinct absorbing self-loops, guaranteeing
    /// at least two disjoint end components.
    pub force_multichain: bool,
}

impl Default for RandomGameConfig {
    fn default() -> Self {
        RandomGameConfig {
            states: 6,
            max_choices: 3,
            max_branches: 2,
            players: 2,
            with_rewards: false,
            force_multichain: false,
        }
    }
}

pub fn random_game(rng: &mut impl Rng, cfg: &RandomGameConfig) -> StochasticGame {
    let player_names: Vec<String> = (0..cfg.players).map(|p| format!("p{p}")).collect();
    let name_refs: Vec<&str> = player_names.iter().map(|s| s.as_str()).collect();
    let mut b = GameBuilder::new(&name_refs);
    for _ in 0..cfg.states {
        let owner = rng.gen_range(0..cfg.players);
        b.add_state(owner, &[]);
    }
    for s in 0..cfg.states {
        if cfg.force_multichain && s < 2 {
            b.add_choice(s, "a0", &[(s, 1.0)]);
            continue;
        }
        let choices = rng.gen_range(1..=cfg.max_choices);
        for c in 0..choices {
            let k = rng.gen_range(1..=cfg.max_branches.min(8));
            let mut targets: Vec<usize> = (0..cfg.states).collect();
            targets.shuffle(rng);
            targets.truncate(k);
            let mut parts = vec![1u32; k];
            for _ in 0..(8 - k as u32) {
                parts[rng.gen_range(0..k)] += 1;
            }
            let branches: Vec<(usize, f64)> = targets
                .iter()
                .zip(parts.iter())
                .map(|(&t, &w)| (t, w as f64 / 8.0))
                .collect();
            b.add_choice(s, &format!("a{c}"), &branches);
        }
    }
    if cfg.with_rewards {
        for s in 0..cfg.states {
            b.set_state_reward("r", s, rng.gen_range(0.0..1.0));
            if rng.gen_bool(0.3) {
                let label = format!("a{}", rng.gen_range(0..cfg.max_choices));
                b.set_action_reward("r", s, &label, rng.gen_range(0.0..1.0));
            }
        }
    }
    b.build()
}

/// A random subset of states, never empty and never everything when
/// `states >= 2` (so targets and safe sets stay interesting).
pub fn random_state_set(rng: &mut impl Rng, states: usize) -> Vec<bool> {
    loop {
        let set: Vec<bool> = (0..states).map(|_| rng.gen_bool(0.4)).collect();
        let count = set.iter().filter(|&&b| b).count();
        if count > 0 && (states < 2 || count < states) {
            return set;
        }
    }
}
