//! Brute-force reference results on small games: enumerate memoryless
//! deterministic strategy profiles and solve the induced Markov chains
//! exactly with dense linear algebra.
//!
//! The oracle trades scale for trust: it refuses games above its budget
//! instead of attempting sparse methods.

use crate::game::{
    induce_markov_chain, Coalition, Direction, MarkovChain, McRewards, StateId, StochasticGame,
    StrategyProfile,
};

#[derive(Debug, Clone)]
pub struct OracleBudget {
    pub max_states: usize,
    pub max_profile_count: u128,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_states: 8,
            max_profile_count: 1_000_000,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("game has {actual} states, oracle budget allows {budget}")]
    TooManyStates { actual: usize, budget: usize },
    #[error("profile count {actual} exceeds oracle budget {budget}")]
    TooManyProfiles { actual: u128, budget: u128 },
    #[error("unknown reward structure {0:?}")]
    UnknownReward(String),
}

/// What the oracle is asked to value on each induced chain.
#[derive(Debug, Clone)]
pub enum Objective {
    Reach(Vec<bool>),
    Until(Vec<bool>, Vec<bool>),
    BoundedSafety(Vec<bool>, u32),
    Lra(String),
}

// ---------------------------------------------------------------------------
// dense linear algebra

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let diag = a[col][col];
        assert!(diag.abs() > 1e-12, "singular system in oracle solve");
        for row in col + 1..n {
            let factor = a[row][col] / diag;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

// ---------------------------------------------------------------------------
// Markov chain analysis

/// Strongly connected components by Kosaraju's algorithm (iterative DFS).
/// Returns a component id per state.
fn scc_ids(rows: &[Vec<(StateId, f64)>]) -> (Vec<usize>, usize) {
    let n = rows.len();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        // stack of (state, next successor index)
        let mut stack = vec![(start, 0usize)];
        seen[start] = true;
        while let Some(&mut (s, ref mut next)) = stack.last_mut() {
            if *next < rows[s].len() {
                let t = rows[s][*next].0;
                *next += 1;
                if !seen[t] {
                    seen[t] = true;
                    stack.push((t, 0));
                }
            } else {
                order.push(s);
                stack.pop();
            }
        }
    }
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, row) in rows.iter().enumerate() {
        for &(t, _) in row {
            reverse[t].push(s);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for &start in order.iter().rev() {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = count;
        while let Some(s) = stack.pop() {
            for &t in &reverse[s] {
                if comp[t] == usize::MAX {
                    comp[t] = count;
                    stack.push(t);
                }
            }
        }
        count += 1;
    }
    (comp, count)
}

/// Bottom strongly connected components: lists of member states.
pub fn bsccs(mc: &MarkovChain) -> Vec<Vec<StateId>> {
    let (comp, count) = scc_ids(&mc.rows);
    let mut bottom = vec![true; count];
    for (s, row) in mc.rows.iter().enumerate() {
        for &(t, _) in row {
            if comp[t] != comp[s] {
                bottom[comp[s]] = false;
            }
        }
    }
    let mut members: Vec<Vec<StateId>> = vec![Vec::new(); count];
    for s in 0..mc.rows.len() {
        members[comp[s]].push(s);
    }
    members
        .into_iter()
        .enumerate()
        .filter(|(c, _)| bottom[*c])
        .map(|(_, m)| m)
        .collect()
}

/// Exact reachability probabilities: graph precomputation of the value-0
/// set, then a dense linear solve on the remaining states.
pub fn mc_reach_exact(mc: &MarkovChain, target: &[bool]) -> Vec<f64> {
    let n = mc.num_states();
    // backward reachability: states with some path to the target
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, row) in mc.rows.iter().enumerate() {
        for &(t, _) in row {
            reverse[t].push(s);
        }
    }
    let mut can_reach = target.to_vec();
    let mut stack: Vec<usize> = (0..n).filter(|&s| target[s]).collect();
    while let Some(s) = stack.pop() {
        for &p in &reverse[s] {
            if !can_reach[p] {
                can_reach[p] = true;
                stack.push(p);
            }
        }
    }
    let unknown: Vec<usize> = (0..n).filter(|&s| can_reach[s] && !target[s]).collect();
    let index: std::collections::HashMap<usize, usize> =
        unknown.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let m = unknown.len();
    let mut a = vec![vec![0.0; m]; m];
    let mut b = vec![0.0; m];
    for (i, &s) in unknown.iter().enumerate() {
        a[i][i] = 1.0;
        for &(t, p) in &mc.rows[s] {
            if target[t] {
                b[i] += p;
            } else if let Some(&j) = index.get(&t) {
                a[i][j] -= p;
            }
        }
    }
    let x = if m > 0 { solve_dense(a, b) } else { Vec::new() };
    let mut values = vec![0.0; n];
    for s in 0..n {
        if target[s] {
            values[s] = 1.0;
        } else if let Some(&i) = index.get(&s) {
            values[s] = x[i];
        }
    }
    values
}

/// Exact long-run average rewards: BSCC decomposition, stationary
/// distribution per BSCC, absorption probabilities for transient states.
pub fn mc_lra_exact(mc: &MarkovChain, rewards: &McRewards) -> Vec<f64> {
    let n = mc.num_states();
    let bottoms = bsccs(mc);
    let mut gains = vec![0.0; n];
    let mut in_bscc = vec![false; n];
    let mut bscc_gain = Vec::with_capacity(bottoms.len());
    for members in &bottoms {
        let m = members.len();
        let index: std::collections::HashMap<usize, usize> =
            members.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        // stationary distribution: pi (P - I) = 0, sum pi = 1
        let mut a = vec![vec![0.0; m]; m];
        let mut b = vec![0.0; m];
        for (j, &s) in members.iter().enumerate() {
            for &(t, p) in &mc.rows[s] {
                let i = index[&t];
                a[i][j] += p;
            }
            a[j][j] -= 1.0;
        }
        // replace last equation with the normalization constraint
        for j in 0..m {
            a[m - 1][j] = 1.0;
        }
        b[m - 1] = 1.0;
        let pi = solve_dense(a, b);
        let gain: f64 = members
            .iter()
            .enumerate()
            .map(|(i, &s)| pi[i] * (rewards.state_rewards[s] + rewards.step_rewards[s]))
            .sum();
        for &s in members {
            gains[s] = gain;
            in_bscc[s] = true;
        }
        bscc_gain.push(gain);
    }
    // transient states: absorption-weighted mixture of BSCC gains
    let transient: Vec<usize> = (0..n).filter(|&s| !in_bscc[s]).collect();
    if !transient.is_empty() {
        let index: std::collections::HashMap<usize, usize> =
            transient.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let m = transient.len();
        // (I - P_tt) g = P_{t, bscc} . gain
        let mut a = vec![vec![0.0; m]; m];
        let mut b = vec![0.0; m];
        for (i, &s) in transient.iter().enumerate() {
            a[i][i] = 1.0;
            for &(t, p) in &mc.rows[s] {
                if in_bscc[t] {
                    b[i] += p * gains[t];
                } else {
                    a[i][index[&t]] -= p;
                }
            }
        }
        let x = solve_dense(a, b);
        for (i, &s) in transient.iter().enumerate() {
            gains[s] = x[i];
        }
    }
    gains
}

// ---------------------------------------------------------------------------
// profile enumeration

/// Iterator over all full memoryless deterministic profiles of a game,
/// odometer-style over per-state choice counts.
pub struct ProfileIter {
    counts: Vec<usize>,
    current: Vec<usize>,
    done: bool,
}

impl ProfileIter {
    fn new(counts: Vec<usize>) -> Self {
        let done = counts.iter().any(|&c| c == 0);
        ProfileIter {
            current: vec![0; counts.len()],
            counts,
            done,
        }
    }
}

impl Iterator for ProfileIter {
    type Item = StrategyProfile;

    fn next(&mut self) -> Option<StrategyProfile> {
        if self.done {
            return None;
        }
        let profile = StrategyProfile {
            choice: self.current.iter().map(|&c| Some(c)).collect(),
        };
        // advance the odometer
        let mut i = 0;
        loop {
            if i == self.counts.len() {
                self.done = true;
                break;
            }
            self.current[i] += 1;
            if self.current[i] < self.counts[i] {
                break;
            }
            self.current[i] = 0;
            i += 1;
        }
        Some(profile)
    }
}

pub fn profile_count(game: &StochasticGame) -> u128 {
    game.states
        .iter()
        .map(|s| s.choices.len() as u128)
        .product()
}

/// Every deterministic memoryless full profile, exactly once.
pub fn enumerate_profiles(
    game: &StochasticGame,
    budget: &OracleBudget,
) -> Result<ProfileIter, OracleError> {
    let count = profile_count(game);
    if count > budget.max_profile_count {
        return Err(OracleError::TooManyProfiles {
            actual: count,
            budget: budget.max_profile_count,
        });
    }
    Ok(ProfileIter::new(
        game.states.iter().map(|s| s.choices.len()).collect(),
    ))
}

// ---------------------------------------------------------------------------
// game values by exhaustive search

/// Recursive depth-k evaluation of the bounded-safety value, independent of
/// the solver's sweep implementation (no memoization, no vectors).
pub fn tree_bounded_safety_value(
    game: &StochasticGame,
    is_max: &[bool],
    safe: &[bool],
    s: StateId,
    k: u32,
) -> f64 {
    if !safe[s] {
        return 0.0;
    }
    if k == 0 {
        return 1.0;
    }
    let per_choice = game.states[s].choices.iter().map(|c| {
        c.branches
            .iter()
            .map(|&(t, p)| p * tree_bounded_safety_value(game, is_max, safe, t, k - 1))
            .sum::<f64>()
    });
    if is_max[s] {
        per_choice.fold(f64::NEG_INFINITY, f64::max)
    } else {
        per_choice.fold(f64::INFINITY, f64::min)
    }
}

/// Depth-k Q value of taking choice `choice_idx` first in `s`.
pub fn tree_bounded_safety_q(
    game: &StochasticGame,
    is_max: &[bool],
    safe: &[bool],
    s: StateId,
    choice_idx: usize,
    k: u32,
) -> f64 {
    assert!(k >= 1);
    if !safe[s] {
        return 0.0;
    }
    game.states[s].choices[choice_idx]
        .branches
        .iter()
        .map(|&(t, p)| p * tree_bounded_safety_value(game, is_max, safe, t, k - 1))
        .sum()
}

fn mc_objective_values(mc: &MarkovChain, objective: &Objective) -> Result<Vec<f64>, OracleError> {
    match objective {
        Objective::Reach(target) => Ok(mc_reach_exact(mc, target)),
        Objective::Until(phi1, phi2) => {
            // states outside phi1 and phi2 can never satisfy the until:
            // freeze them with a self-loop, then reach phi2
            let mut frozen = mc.clone();
            for s in 0..frozen.rows.len() {
                if !phi1[s] && !phi2[s] {
                    frozen.rows[s] = vec![(s, 1.0)];
                }
            }
            Ok(mc_reach_exact(&frozen, phi2))
        }
        Objective::Lra(name) => {
            let rewards = mc
                .rewards
                .get(name)
                .ok_or_else(|| OracleError::UnknownReward(name.clone()))?;
            Ok(mc_lra_exact(mc, rewards))
        }
        Objective::BoundedSafety(..) => unreachable!("handled by tree evaluation"),
    }
}

/// Exact game value per state: best over coalition strategies of the
/// worst-case over opponent strategies, componentwise. Sound for these
/// objectives because optimal memoryless deterministic strategies exist
/// uniformly on finite turn-based games. Bounded safety is evaluated by
/// exhaustive depth-k game-tree recursion instead (optimal play there is
/// step-dependent).
pub fn oracle_value(
    game: &StochasticGame,
    coalition: &Coalition,
    objective: &Objective,
    direction: Direction,
    budget: &OracleBudget,
) -> Result<Vec<f64>, OracleError> {
    let n = game.num_states();
    if n > budget.max_states {
        return Err(OracleError::TooManyStates {
            actual: n,
            budget: budget.max_states,
        });
    }
    if let Objective::BoundedSafety(safe, k) = objective {
        let is_max: Vec<bool> = (0..n)
            .map(|s| {
                let owned = coalition.contains(game.states[s].owner);
                match direction {
                    Direction::Max => owned,
                    Direction::Min => !owned,
                }
            })
            .collect();
        return Ok((0..n)
            .map(|s| tree_bounded_safety_value(game, &is_max, safe, s, *k))
            .collect());
    }

    let coalition_owned: Vec<bool> = (0..n)
        .map(|s| coalition.contains(game.states[s].owner))
        .collect();
    let coal_states: Vec<usize> = (0..n).filter(|&s| coalition_owned[s]).collect();
    let opp_states: Vec<usize> = (0..n).filter(|&s| !coalition_owned[s]).collect();
    let counts = |ids: &[usize]| -> Vec<usize> {
        ids.iter().map(|&s| game.states[s].choices.len()).collect()
    };
    let total = profile_count(game);
    if total > budget.max_profile_count {
        return Err(OracleError::TooManyProfiles {
            actual: total,
            budget: budget.max_profile_count,
        });
    }

    // coalition plays `direction`; the complement plays the opposite
    let (outer_better, inner_better): (fn(f64, f64) -> f64, fn(f64, f64) -> f64) = match direction {
        Direction::Max => (f64::max, f64::min),
        Direction::Min => (f64::min, f64::max),
    };

    let mut best: Option<Vec<f64>> = None;
    for coal_assign in assignments(&counts(&coal_states)) {
        let mut worst: Option<Vec<f64>> = None;
        for opp_assign in assignments(&counts(&opp_states)) {
            let mut profile = StrategyProfile::empty(n);
            for (i, &s) in coal_states.iter().enumerate() {
                profile.choice[s] = Some(coal_assign[i]);
            }
            for (i, &s) in opp_states.iter().enumerate() {
                profile.choice[s] = Some(opp_assign[i]);
            }
            let mc = induce_markov_chain(game, &profile).expect("full profile");
            let values = mc_objective_values(&mc, objective)?;
            worst = Some(match worst {
                None => values,
                Some(w) => w
                    .iter()
                    .zip(values.iter())
                    .map(|(&a, &b)| inner_better(a, b))
                    .collect(),
            });
        }
        let worst = worst.expect("at least one opponent assignment");
        best = Some(match best {
            None => worst,
            Some(b) => b
                .iter()
                .zip(worst.iter())
                .map(|(&a, &w)| outer_better(a, w))
                .collect(),
        });
    }
    Ok(best.expect("at least one coalition assignment"))
}

/// All index assignments over the given per-slot counts (empty counts yield
/// the single empty assignment).
fn assignments(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &c in counts {
        let mut next = Vec::with_capacity(out.len() * c);
        for prefix in &out {
            for i in 0..c {
                let mut a = prefix.clone();
                a.push(i);
                next.push(a);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameBuilder;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn chain(rows: Vec<Vec<(usize, f64)>>) -> MarkovChain {
        MarkovChain {
            rows,
            rewards: Default::default(),
        }
    }

    #[test]
    fn profile_counts() {
        let mut b = GameBuilder::new(&["p1"]);
        let s0 = b.add_state(0, &[]);
        let s1 = b.add_state(0, &[]);
        for s in [s0, s1] {
            b.add_choice(s, "a", &[(s, 1.0)]);
            b.add_choice(s, "b", &[(s, 1.0)]);
        }
        let game = b.build();
        let budget = OracleBudget::default();
        assert_eq!(enumerate_profiles(&game, &budget).unwrap().count(), 4);

        let mut b = GameBuilder::new(&["p1"]);
        let s0 = b.add_state(0, &[]);
        b.add_choice(s0, "a", &[(s0, 1.0)]);
        assert_eq!(enumerate_profiles(&b.build(), &budget).unwrap().count(), 1);

        let mut b = GameBuilder::new(&["p1"]);
        let s0 = b.add_state(0, &[]);
        let s1 = b.add_state(0, &[]);
        let s2 = b.add_state(0, &[]);
        b.add_choice(s0, "a", &[(s0, 1.0)]);
        b.add_choice(s0, "b", &[(s0, 1.0)]);
        for l in ["a", "b", "c"] {
            b.add_choice(s1, l, &[(s1, 1.0)]);
        }
        b.add_choice(s2, "a", &[(s2, 1.0)]);
        assert_eq!(enumerate_profiles(&b.build(), &budget).unwrap().count(), 6);
    }

    #[test]
    fn profile_budget_enforced() {
        let mut b = GameBuilder::new(&["p1"]);
        let s0 = b.add_state(0, &[]);
        b.add_choice(s0, "a", &[(s0, 1.0)]);
        b.add_choice(s0, "b", &[(s0, 1.0)]);
        let budget = OracleBudget {
            max_states: 8,
            max_profile_count: 1,
        };
        assert!(matches!(
            enumerate_profiles(&b.build(), &budget),
            Err(OracleError::TooManyProfiles { actual: 2, .. })
        ));
    }

    #[test]
    fn reach_absorbing_target() {
        let mc = chain(vec![vec![(1, 1.0)], vec![(1, 1.0)]]);
        let v = mc_reach_exact(&mc, &[false, true]);
        assert_eq!(v, vec![1.0, 1.0]);
    }

    #[test]
    fn reach_no_path_is_zero() {
        let mc = chain(vec![vec![(0, 1.0)], vec![(1, 1.0)]]);
        let v = mc_reach_exact(&mc, &[false, true]);
        assert_eq!(v[0], 0.0);
    }

    #[test]
    fn reach_gamblers_ruin_closed_form() {
        // states: 0 = ruin, 1..=3 transient, 4 = win; up with prob p
        let p: f64 = 0.3;
        let q = 1.0 - p;
        let mut rows = vec![vec![(0, 1.0)]];
        for s in 1..4 {
            rows.push(vec![(s - 1, q), (s + 1, p)]);
        }
        rows.push(vec![(4, 1.0)]);
        let mc = chain(rows);
        let v = mc_reach_exact(&mc, &[false, false, false, false, true]);
        let r = q / p;
        for s in 1..4 {
            let expect = (1.0 - r.powi(s as i32)) / (1.0 - r.powi(4));
            assert!((v[s] - expect).abs() < 1e-12, "state {s}: {} vs {expect}", v[s]);
        }
    }

    fn rewards(state: Vec<f64>, step: Vec<f64>) -> McRewards {
        McRewards {
            state_rewards: state,
            step_rewards: step,
        }
    }

    #[test]
    fn lra_irreducible_two_cycle() {
        let mc = chain(vec![vec![(1, 1.0)], vec![(0, 1.0)]]);
        let g = mc_lra_exact(&mc, &rewards(vec![0.0, 4.0], vec![0.0, 0.0]));
        assert!((g[0] - 2.0).abs() < 1e-12);
        assert!((g[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lra_transient_mixture() {
        let mc = chain(vec![
            vec![(1, 0.5), (2, 0.5)],
            vec![(1, 1.0)],
            vec![(2, 1.0)],
        ]);
        let g = mc_lra_exact(&mc, &rewards(vec![0.0, 1.0, 5.0], vec![0.0; 3]));
        assert!((g[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lra_matches_simulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let n = 6;
            let mut rows = Vec::new();
            for _ in 0..n {
                let k = rng.gen_range(1..=3);
                let mut targets: Vec<usize> = (0..n).collect();
                targets.shuffle(&mut rng);
                let targets = &targets[..k];
                // dyadic probabilities summing to exactly 1
                let mut parts = vec![1u32; k];
                for _ in 0..(8 - k as u32) {
                    parts[rng.gen_range(0..k)] += 1;
                }
                rows.push(
                    targets
                        .iter()
                        .zip(parts.iter())
                        .map(|(&t, &w)| (t, w as f64 / 8.0))
                        .collect::<Vec<_>>(),
                );
            }
            let mc = chain(rows);
            let state_rewards: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let rew = rewards(state_rewards.clone(), vec![0.0; n]);
            let gains = mc_lra_exact(&mc, &rew);

            // secondary oracle: long-run simulation average from state 0
            let steps = 1_000_000u64;
            let mut s = 0usize;
            let mut total = 0.0;
            for _ in 0..steps {
                total += state_rewards[s];
                let x: f64 = rng.gen();
                let mut acc = 0.0;
                for &(t, p) in &mc.rows[s] {
                    acc += p;
                    if x < acc {
                        s = t;
                        break;
                    }
                }
            }
            let sim = total / steps as f64;
            assert!(
                (gains[0] - sim).abs() < 1e-2,
                "exact {} vs simulated {sim}",
                gains[0]
            );
        }
    }

    #[test]
    fn oracle_value_no_opponent_states() {
        // single player; two actions, one reaches the target
        let mut b = GameBuilder::new(&["p1"]);
        let s0 = b.add_state(0, &[]);
        let s1 = b.add_state(0, &[]);
        let s2 = b.add_state(0, &[]);
        b.add_choice(s0, "good", &[(s1, 1.0)]);
        b.add_choice(s0, "bad", &[(s2, 1.0)]);
        b.add_choice(s1, "stay", &[(s1, 1.0)]);
        b.add_choice(s2, "stay", &[(s2, 1.0)]);
        let game = b.build();
        let v = oracle_value(
            &game,
            &Coalition::new([0]),
            &Objective::Reach(vec![false, true, false]),
            Direction::Max,
            &OracleBudget::default(),
        )
        .unwrap();
        assert_eq!(v[0], 1.0);
    }

    #[test]
    fn oracle_value_single_state_lra() {
        let mut b = GameBuilder::new(&["p1"]);
        let s0 = b.add_state(0, &[]);
        b.add_choice(s0, "loop", &[(s0, 1.0)]);
        b.set_state_reward("r", s0, 3.5);
        let game = b.build();
        let v = oracle_value(
            &game,
            &Coalition::new([0]),
            &Objective::Lra("r".into()),
            Direction::Max,
            &OracleBudget::default(),
        )
        .unwrap();
        assert_eq!(v[0], 3.5);
    }

    #[test]
    fn oracle_value_matching_pennies_like() {
        // maximizer picks left/right, minimizer then picks left/right;
        // outcomes are probabilistic coin flips into target/sink except when
        // the minimizer matches the maximizer's pick, which is worse for
        // the maximizer. Value ends up strictly between the pure payoffs.
        let mut b = GameBuilder::new(&["max", "min"]);
        let s0 = b.add_state(0, &[]); // maximizer root
        let l = b.add_state(1, &[]); // minimizer after "left"
        let r = b.add_state(1, &[]); // minimizer after "right"
        let target = b.add_state(0, &[]);
        let sink = b.add_state(0, &[]);
        b.add_choice(s0, "left", &[(l, 1.0)]);
        b.add_choice(s0, "right", &[(r, 1.0)]);
        // matching hurts the maximizer (0.25), mismatching helps (0.75)
        b.add_choice(l, "left", &[(target, 0.25), (sink, 0.75)]);
        b.add_choice(l, "right", &[(target, 0.75), (sink, 0.25)]);
        b.add_choice(r, "left", &[(target, 0.75), (sink, 0.25)]);
        b.add_choice(r, "right", &[(target, 0.25), (sink, 0.75)]);
        b.add_choice(target, "stay", &[(target, 1.0)]);
        b.add_choice(sink, "stay", &[(sink, 1.0)]);
        let game = b.build();
        let mut target_set = vec![false; 5];
        target_set[target] = true;
        let v = oracle_value(
            &game,
            &Coalition::new([0]),
            &Objective::Reach(target_set),
            Direction::Max,
            &OracleBudget::default(),
        )
        .unwrap();
        // symmetric instance: opponent can always force the matching flip
        assert!((v[s0] - 0.25).abs() < 1e-12);
        assert!(v[s0] > 0.0 && v[s0] < 0.75);
    }
}
