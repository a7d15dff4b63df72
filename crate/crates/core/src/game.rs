//! Explicit representation of turn-based stochastic multi-player games,
//! coalitions and induced Markov chains.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub type StateId = usize;
pub type PlayerId = usize;
pub type ActionId = usize;

/// Tolerance for "branch probabilities sum to 1" checks.
pub const PROB_SUM_TOL: f64 = 1e-9;

/// One probabilistic transition available in a state.
#[derive(Debug, Clone, PartialEq)]
pub struct Choice {
    /// Global id, stable across states for a given action label.
    pub action_id: ActionId,
    pub action_label: String,
    /// (target state, probability); probabilities in (0,1], summing to 1.
    pub branches: Vec<(StateId, f64)>,
}

#[derive(Debug, Clone)]
pub struct State {
    pub owner: PlayerId,
    pub labels: BTreeSet<String>,
    /// Ordered (variable name, value) pairs; shared ordering across all states.
    pub valuation: Vec<(String, i64)>,
    pub choices: Vec<Choice>,
}

impl State {
    /// `move=0 & x1=0 & y1=0` style rendering of the valuation.
    pub fn valuation_string(&self) -> String {
        self.valuation
            .iter()
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join(" & ")
    }
}

#[derive(Debug, Clone, Default)]
pub struct RewardStructure {
    /// Per-state reward; indexed by state id, missing entries read as 0.
    pub state_rewards: Vec<f64>,
    /// Reward for taking action `action_id` in a state.
    pub action_rewards: HashMap<(StateId, ActionId), f64>,
}

impl RewardStructure {
    pub fn state_reward(&self, s: StateId) -> f64 {
        self.state_rewards.get(s).copied().unwrap_or(0.0)
    }

    pub fn action_reward(&self, s: StateId, a: ActionId) -> f64 {
        self.action_rewards.get(&(s, a)).copied().unwrap_or(0.0)
    }
}

/// Subset of the declared players that jointly optimizes a property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coalition(pub BTreeSet<PlayerId>);

impl Coalition {
    pub fn new<I: IntoIterator<Item = PlayerId>>(players: I) -> Self {
        Coalition(players.into_iter().collect())
    }

    pub fn contains(&self, p: PlayerId) -> bool {
        self.0.contains(&p)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A memoryless deterministic strategy: one choice index per covered state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyProfile {
    /// Index into `state.choices`, per state; `None` where the profile is silent.
    pub choice: Vec<Option<usize>>,
}

impl StrategyProfile {
    pub fn empty(num_states: usize) -> Self {
        StrategyProfile {
            choice: vec![None; num_states],
        }
    }

    pub fn is_full(&self) -> bool {
        self.choice.iter().all(|c| c.is_some())
    }

    /// The chosen choice of `s`, if any.
    pub fn chosen<'g>(&self, game: &'g StochasticGame, s: StateId) -> Option<&'g Choice> {
        self.choice[s].map(|i| &game.states[s].choices[i])
    }
}

/// Rewards of a Markov chain induced from a game: the state rewards are kept,
/// the action reward of the chosen choice becomes a per-state step reward.
#[derive(Debug, Clone)]
pub struct McRewards {
    pub state_rewards: Vec<f64>,
    pub step_rewards: Vec<f64>,
}

/// Markov chain sharing the state indexing of the game it came from.
#[derive(Debug, Clone)]
pub struct MarkovChain {
    pub rows: Vec<Vec<(StateId, f64)>>,
    pub rewards: BTreeMap<String, McRewards>,
}

impl MarkovChain {
    pub fn num_states(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Debug, Clone)]
pub struct StochasticGame {
    pub players: Vec<String>,
    pub states: Vec<State>,
    pub initial_state: StateId,
    pub reward_structures: BTreeMap<String, RewardStructure>,
    /// Action id → label registry; ids are assigned in first-use order.
    pub action_labels: Vec<String>,
}

impl StochasticGame {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn player_id(&self, name: &str) -> Option<PlayerId> {
        self.players.iter().position(|p| p == name)
    }

    /// Resolve player names into a coalition.
    pub fn coalition(&self, names: &[impl AsRef<str>]) -> Result<Coalition, String> {
        let mut set = BTreeSet::new();
        for n in names {
            match self.player_id(n.as_ref()) {
                Some(id) => {
                    set.insert(id);
                }
                None => return Err(n.as_ref().to_string()),
            }
        }
        Ok(Coalition(set))
    }

    /// States whose owner is in the coalition, in id order.
    pub fn coalition_states<'a>(
        &'a self,
        coalition: &'a Coalition,
    ) -> impl Iterator<Item = StateId> + 'a {
        (0..self.states.len()).filter(move |&s| coalition.contains(self.states[s].owner))
    }

    pub fn num_choices(&self) -> usize {
        self.states.iter().map(|s| s.choices.len()).sum()
    }

    pub fn num_transitions(&self) -> usize {
        self.states
            .iter()
            .flat_map(|s| s.choices.iter())
            .map(|c| c.branches.len())
            .sum()
    }

    /// Debug dump, one line per choice:
    /// `state owner action_id action_label target:prob ...`
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (sid, state) in self.states.iter().enumerate() {
            for choice in &state.choices {
                let branches = choice
                    .branches
                    .iter()
                    .map(|(t, p)| format!("{t}:{p}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                out.push_str(&format!(
                    "{sid} {} {} {} {branches}\n",
                    self.players[state.owner], choice.action_id, choice.action_label
                ));
            }
        }
        out
    }
}

/// Optimization direction of a query: the coalition maximizes for `max=?`
/// operators and minimizes for `min=?` operators; the complement always
/// plays the opposite role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Max,
    Min,
}

/// Per-state maximizer flags for a coalition playing `direction`.
pub fn max_roles(game: &StochasticGame, coalition: &Coalition, direction: Direction) -> Vec<bool> {
    (0..game.states.len())
        .map(|s| {
            let owned = coalition.contains(game.states[s].owner);
            match direction {
                Direction::Max => owned,
                Direction::Min => !owned,
            }
        })
        .collect()
}

/// Role of a state's owner relative to a coalition, for a max-query.
/// The solver flips roles for min-queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Maximizer,
    Minimizer,
}

impl Role {
    pub fn flip(self) -> Role {
        match self {
            Role::Maximizer => Role::Minimizer,
            Role::Minimizer => Role::Maximizer,
        }
    }
}

pub fn coalition_role(game: &StochasticGame, coalition: &Coalition, state: StateId) -> Role {
    if coalition.contains(game.states[state].owner) {
        Role::Maximizer
    } else {
        Role::Minimizer
    }
}

/// A violated invariant; diagnostics are data, not errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub state: Option<StateId>,
    pub rule: &'static str,
    pub detail: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.state {
            Some(s) => write!(f, "state {s}: {}: {}", self.rule, self.detail),
            None => write!(f, "{}: {}", self.rule, self.detail),
        }
    }
}

/// Check all structural invariants; empty result means the game is well-formed.
pub fn validate(game: &StochasticGame) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let n = game.states.len();
    if game.initial_state >= n {
        out.push(Diagnostic {
            state: None,
            rule: "initial state",
            detail: format!("index {} out of range (game has {n} states)", game.initial_state),
        });
    }
    let mut label_ids: HashMap<&str, ActionId> = HashMap::new();
    for (sid, state) in game.states.iter().enumerate() {
        if state.owner >= game.players.len() {
            out.push(Diagnostic {
                state: Some(sid),
                rule: "owner",
                detail: format!("player id {} not declared", state.owner),
            });
        }
        if state.choices.is_empty() {
            out.push(Diagnostic {
                state: Some(sid),
                rule: "deadlock",
                detail: format!("no choices at [{}]", state.valuation_string()),
            });
        }
        for choice in &state.choices {
            match label_ids.get(choice.action_label.as_str()) {
                Some(&id) if id != choice.action_id => out.push(Diagnostic {
                    state: Some(sid),
                    rule: "action id stability",
                    detail: format!(
                        "label {:?} has ids {id} and {}",
                        choice.action_label, choice.action_id
                    ),
                }),
                None => {
                    label_ids.insert(&choice.action_label, choice.action_id);
                }
                _ => {}
            }
            let mut sum = 0.0;
            for &(target, p) in &choice.branches {
                if target >= n {
                    out.push(Diagnostic {
                        state: Some(sid),
                        rule: "branch target",
                        detail: format!("target {target} out of range"),
                    });
                }
                if !(p > 0.0 && p <= 1.0) {
                    out.push(Diagnostic {
                        state: Some(sid),
                        rule: "branch probability",
                        detail: format!("probability {p} outside (0, 1]"),
                    });
                }
                sum += p;
            }
            if (sum - 1.0).abs() > PROB_SUM_TOL {
                out.push(Diagnostic {
                    state: Some(sid),
                    rule: "probability sum",
                    detail: format!("branches of {:?} sum to {sum}", choice.action_label),
                });
            }
        }
    }
    for (name, rew) in &game.reward_structures {
        if rew.state_rewards.iter().any(|v| !v.is_finite())
            || rew.action_rewards.values().any(|v| !v.is_finite())
        {
            out.push(Diagnostic {
                state: None,
                rule: "reward finiteness",
                detail: format!("reward structure {name:?} contains non-finite values"),
            });
        }
    }
    out
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum InduceError {
    #[error("strategy profile is missing a choice for state {0}")]
    MissingState(StateId),
}

/// Fix one choice per state and collapse the game into a Markov chain.
/// Reward structures are carried over value-for-value; the chosen choice's
/// action reward becomes the state's step reward.
pub fn induce_markov_chain(
    game: &StochasticGame,
    profile: &StrategyProfile,
) -> Result<MarkovChain, InduceError> {
    let mut rows = Vec::with_capacity(game.states.len());
    let mut chosen_actions = Vec::with_capacity(game.states.len());
    for (sid, state) in game.states.iter().enumerate() {
        let idx = profile.choice[sid].ok_or(InduceError::MissingState(sid))?;
        let choice = &state.choices[idx];
        rows.push(choice.branches.clone());
        chosen_actions.push(choice.action_id);
    }
    let mut rewards = BTreeMap::new();
    for (name, rew) in &game.reward_structures {
        let state_rewards = (0..game.states.len()).map(|s| rew.state_reward(s)).collect();
        let step_rewards = (0..game.states.len())
            .map(|s| rew.action_reward(s, chosen_actions[s]))
            .collect();
        rewards.insert(
            name.clone(),
            McRewards {
                state_rewards,
                step_rewards,
            },
        );
    }
    Ok(MarkovChain { rows, rewards })
}

/// Convenience builder for hand-constructed games (tests, fixtures).
#[derive(Debug, Default)]
pub struct GameBuilder {
    players: Vec<String>,
    states: Vec<State>,
    action_labels: Vec<String>,
    reward_structures: BTreeMap<String, RewardStructure>,
    initial_state: StateId,
}

impl GameBuilder {
    pub fn new(players: &[&str]) -> Self {
        GameBuilder {
            players: players.iter().map(|p| p.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn intern_action(&mut self, label: &str) -> ActionId {
        if let Some(id) = self.action_labels.iter().position(|l| l == label) {
            id
        } else {
            self.action_labels.push(label.to_string());
            self.action_labels.len() - 1
        }
    }

    pub fn add_state(&mut self, owner: PlayerId, labels: &[&str]) -> StateId {
        self.states.push(State {
            owner,
            labels: labels.iter().map(|l| l.to_string()).collect(),
            valuation: Vec::new(),
            choices: Vec::new(),
        });
        self.states.len() - 1
    }

    pub fn set_valuation(&mut self, s: StateId, valuation: &[(&str, i64)]) {
        self.states[s].valuation = valuation
            .iter()
            .map(|(n, v)| (n.to_string(), *v))
            .collect();
    }

    pub fn add_choice(&mut self, s: StateId, label: &str, branches: &[(StateId, f64)]) {
        let action_id = self.intern_action(label);
        self.states[s].choices.push(Choice {
            action_id,
            action_label: label.to_string(),
            branches: branches.to_vec(),
        });
    }

    pub fn set_state_reward(&mut self, structure: &str, s: StateId, value: f64) {
        let rew = self.reward_structures.entry(structure.to_string()).or_default();
        if rew.state_rewards.len() <= s {
            rew.state_rewards.resize(s + 1, 0.0);
        }
        rew.state_rewards[s] = value;
    }

    pub fn set_action_reward(&mut self, structure: &str, s: StateId, label: &str, value: f64) {
        let action_id = self.intern_action(label);
        self.reward_structures
            .entry(structure.to_string())
            .or_default()
            .action_rewards
            .insert((s, action_id), value);
    }

    pub fn set_initial(&mut self, s: StateId) {
        self.initial_state = s;
    }

    pub fn build(mut self) -> StochasticGame {
        for rew in self.reward_structures.values_mut() {
            rew.state_rewards.resize(self.states.len(), 0.0);
        }
        StochasticGame {
            players: self.players,
            states: self.states,
            initial_state: self.initial_state,
            reward_structures: self.reward_structures,
            action_labels: self.action_labels,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn self_loop_game() -> StochasticGame {
        let mut b = GameBuilder::new(&["p1"]);
        let s = b.add_state(0, &[]);
        b.add_choice(s, "loop", &[(s, 1.0)]);
        b.build()
    }

    #[test]
    fn validate_accepts_self_loop() {
        assert!(validate(&self_loop_game()).is_empty());
    }

    #[test]
    fn validate_flags_probability_sum() {
        let mut b = GameBuilder::new(&["p1"]);
        let s = b.add_state(0, &[]);
        b.add_choice(s, "a", &[(s, 0.5), (s, 0.3)]);
        let diags = validate(&b.build());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].rule, "probability sum");
        assert_eq!(diags[0].state, Some(0));
    }

    #[test]
    fn validate_flags_deadlock() {
        let mut b = GameBuilder::new(&["p1"]);
        b.add_state(0, &[]);
        let diags = validate(&b.build());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].rule, "deadlock");
    }

    #[test]
    fn induce_two_state_cycle() {
        let mut b = GameBuilder::new(&["p1", "p2"]);
        let s0 = b.add_state(0, &[]);
        let s1 = b.add_state(1, &[]);
        b.add_choice(s0, "go", &[(s1, 1.0)]);
        b.add_choice(s1, "back", &[(s0, 1.0)]);
        let game = b.build();
        let profile = StrategyProfile {
            choice: vec![Some(0), Some(0)],
        };
        let mc = induce_markov_chain(&game, &profile).unwrap();
        assert_eq!(mc.rows[0], vec![(1, 1.0)]);
        assert_eq!(mc.rows[1], vec![(0, 1.0)]);
    }

    #[test]
    fn induce_coin_flip_row() {
        let mut b = GameBuilder::new(&["p1"]);
        let s0 = b.add_state(0, &[]);
        let s1 = b.add_state(0, &[]);
        b.add_choice(s0, "flip", &[(s0, 0.5), (s1, 0.5)]);
        b.add_choice(s1, "stay", &[(s1, 1.0)]);
        let game = b.build();
        let profile = StrategyProfile {
            choice: vec![Some(0), Some(0)],
        };
        let mc = induce_markov_chain(&game, &profile).unwrap();
        assert_eq!(mc.rows[0], vec![(0, 0.5), (1, 0.5)]);
    }

    #[test]
    fn induce_missing_state_errors() {
        let game = self_loop_game();
        let profile = StrategyProfile::empty(game.num_states());
        assert!(matches!(
            induce_markov_chain(&game, &profile),
            Err(InduceError::MissingState(0))
        ));
    }

    #[test]
    fn induce_preserves_rewards() {
        let mut b = GameBuilder::new(&["p1"]);
        let s0 = b.add_state(0, &[]);
        let s1 = b.add_state(0, &[]);
        b.add_choice(s0, "a", &[(s1, 1.0)]);
        b.add_choice(s0, "b", &[(s0, 1.0)]);
        b.add_choice(s1, "a", &[(s1, 1.0)]);
        b.set_state_reward("r", s0, 2.5);
        b.set_action_reward("r", s0, "b", 7.0);
        let game = b.build();
        let profile = StrategyProfile {
            choice: vec![Some(1), Some(0)],
        };
        let mc = induce_markov_chain(&game, &profile).unwrap();
        let r = &mc.rewards["r"];
        assert_eq!(r.state_rewards, vec![2.5, 0.0]);
        assert_eq!(r.step_rewards, vec![7.0, 0.0]);
    }

    #[test]
    fn coalition_roles() {
        let mut b = GameBuilder::new(&["p1", "p2"]);
        let s0 = b.add_state(0, &[]);
        let s1 = b.add_state(1, &[]);
        b.add_choice(s0, "a", &[(s0, 1.0)]);
        b.add_choice(s1, "a", &[(s1, 1.0)]);
        let game = b.build();
        let c = Coalition::new([0]);
        assert_eq!(coalition_role(&game, &c, s0), Role::Maximizer);
        assert_eq!(coalition_role(&game, &c, s1), Role::Minimizer);
        // min-queries flip roles
        assert_eq!(coalition_role(&game, &c, s0).flip(), Role::Minimizer);
    }

    #[test]
    fn action_ids_stable_per_label() {
        let mut b = GameBuilder::new(&["p1"]);
        let s0 = b.add_state(0, &[]);
        let s1 = b.add_state(0, &[]);
        b.add_choice(s0, "e", &[(s1, 1.0)]);
        b.add_choice(s1, "s", &[(s0, 1.0)]);
        b.add_choice(s1, "e", &[(s1, 1.0)]);
        let game = b.build();
        assert_eq!(game.states[0].choices[0].action_id, 0);
        assert_eq!(game.states[1].choices[0].action_id, 1);
        assert_eq!(game.states[1].choices[1].action_id, 0);
        assert!(validate(&game).is_empty());
    }
}
