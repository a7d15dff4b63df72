//! Shield synthesis from solver results and the textual shield format.
//!
//! A pre-safety shield lists, per coalition state, the actions whose
//! safety-value passes a threshold; a post-safety shield forwards every
//! action either to itself or to a safe correction; an optimal shield
//! forwards every action to the mean-payoff-optimal one.

use std::fmt::Write as _;

use crate::game::{ActionId, Coalition, StateId, StochasticGame};
use crate::solver::SolveResult;

/// Comparisons that pass floating-point argmax ties cleanly.
const THRESHOLD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// Allow actions with safety-value >= gamma.
    Absolute { gamma: f64 },
    /// Allow actions with safety-value >= lambda * best value in the state.
    Relative { lambda: f64 },
}

impl Threshold {
    fn level(self) -> f64 {
        match self {
            Threshold::Absolute { gamma } => gamma,
            Threshold::Relative { lambda } => lambda,
        }
    }

    fn passes(self, q: f64, best: f64) -> bool {
        match self {
            Threshold::Absolute { gamma } => q >= gamma - THRESHOLD_TOL,
            Threshold::Relative { lambda } => q >= lambda * best - THRESHOLD_TOL,
        }
    }

    /// `absolute comparison (gamma = 0.8)` / `relative comparison (lambda = 0.95)`.
    fn describe(self) -> String {
        match self {
            Threshold::Absolute { gamma } => format!("absolute comparison (gamma = {gamma})"),
            Threshold::Relative { lambda } => format!("relative comparison (lambda = {lambda})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ShieldError {
    #[error("threshold {0} out of [0,1]")]
    ThresholdOutOfRange(f64),
    #[error("solver result carries no Q-values; shields need solve_bounded_safety output")]
    MissingQValues,
    #[error("solver result carries no strategy choice at state {0}")]
    MissingStrategy(StateId),
}

/// One allowed action of a pre-shield row.
#[derive(Debug, Clone, PartialEq)]
pub struct AllowedAction {
    pub action_id: ActionId,
    pub action_label: String,
    pub safety_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreShield {
    pub threshold: Threshold,
    /// Coalition-owned states in id order with their allowed actions.
    pub rows: Vec<(StateId, Vec<AllowedAction>)>,
}

/// One forwarding entry of a post-shield row.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    pub action_id: ActionId,
    pub action_label: String,
    pub forward_id: ActionId,
    pub forward_label: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PostKind {
    Safety(Threshold),
    Optimal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PostShield {
    pub kind: PostKind,
    /// Coalition-owned states in id order; the domain covers every action
    /// available at the state.
    pub rows: Vec<(StateId, Vec<Forward>)>,
}

fn check_threshold(threshold: Threshold) -> Result<(), ShieldError> {
    let level = threshold.level();
    if !(0.0..=1.0).contains(&level) {
        return Err(ShieldError::ThresholdOutOfRange(level));
    }
    Ok(())
}

/// Index of the best choice by Q-value, lowest action id among ties.
fn argmax_choice(game: &StochasticGame, s: StateId, qs: &[f64]) -> usize {
    let choices = &game.states[s].choices;
    let mut best = 0;
    for i in 1..choices.len() {
        if qs[i] > qs[best]
            || (qs[i] == qs[best] && choices[i].action_id < choices[best].action_id)
        {
            best = i;
        }
    }
    best
}

fn q_values<'r>(result: &'r SolveResult) -> Result<&'r Vec<Vec<f64>>, ShieldError> {
    result.q_values.as_ref().ok_or(ShieldError::MissingQValues)
}

pub fn synthesize_pre_safety(
    game: &StochasticGame,
    coalition: &Coalition,
    result: &SolveResult,
    threshold: Threshold,
) -> Result<PreShield, ShieldError> {
    check_threshold(threshold)?;
    let q = q_values(result)?;
    let mut rows = Vec::new();
    for s in game.coalition_states(coalition) {
        let choices = &game.states[s].choices;
        let best = q[s][argmax_choice(game, s, &q[s])];
        let mut allowed: Vec<AllowedAction> = choices
            .iter()
            .enumerate()
            .filter(|&(i, _)| threshold.passes(q[s][i], best))
            .map(|(i, c)| AllowedAction {
                action_id: c.action_id,
                action_label: c.action_label.clone(),
                safety_value: q[s][i],
            })
            .collect();
        if allowed.is_empty() {
            // the absolute threshold can be unattainable; a shield must
            // still permit something, so keep the argmax actions (all ties)
            allowed = choices
                .iter()
                .enumerate()
                .filter(|&(i, _)| q[s][i] >= best - THRESHOLD_TOL)
                .map(|(i, c)| AllowedAction {
                    action_id: c.action_id,
                    action_label: c.action_label.clone(),
                    safety_value: q[s][i],
                })
                .collect();
        }
        rows.push((s, allowed));
    }
    Ok(PreShield { threshold, rows })
}

pub fn synthesize_post_safety(
    game: &StochasticGame,
    coalition: &Coalition,
    result: &SolveResult,
    threshold: Threshold,
) -> Result<PostShield, ShieldError> {
    check_threshold(threshold)?;
    let q = q_values(result)?;
    let mut rows = Vec::new();
    for s in game.coalition_states(coalition) {
        let choices = &game.states[s].choices;
        let bi = argmax_choice(game, s, &q[s]);
        let best = &choices[bi];
        let forwards = choices
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let target = if threshold.passes(q[s][i], q[s][bi]) {
                    c
                } else {
                    best
                };
                Forward {
                    action_id: c.action_id,
                    action_label: c.action_label.clone(),
                    forward_id: target.action_id,
                    forward_label: target.action_label.clone(),
                }
            })
            .collect();
        rows.push((s, forwards));
    }
    Ok(PostShield {
        kind: PostKind::Safety(threshold),
        rows,
    })
}

/// Forward every action to the one the mean-payoff strategy picks.
pub fn synthesize_optimal(
    game: &StochasticGame,
    coalition: &Coalition,
    result: &SolveResult,
) -> Result<PostShield, ShieldError> {
    let mut rows = Vec::new();
    for s in game.coalition_states(coalition) {
        let choices = &game.states[s].choices;
        let pick = result.strategy.choice[s].ok_or(ShieldError::MissingStrategy(s))?;
        let target = &choices[pick];
        let forwards = choices
            .iter()
            .map(|c| Forward {
                action_id: c.action_id,
                action_label: c.action_label.clone(),
                forward_id: target.action_id,
                forward_label: target.action_label.clone(),
            })
            .collect();
        rows.push((s, forwards));
    }
    Ok(PostShield {
        kind: PostKind::Optimal,
        rows,
    })
}

impl PreShield {
    /// The textual shield listing; values use the shortest decimal form
    /// that round-trips, so 1.0 prints as `1`.
    pub fn render(&self, game: &StochasticGame) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Pre-Safety-Shield with {}:",
            self.threshold.describe()
        );
        out.push_str(
            " state_id [label]:  'allowed actions' [<value>: (<action_id {label})>]:\n\n",
        );
        for (s, allowed) in &self.rows {
            let entries: Vec<String> = allowed
                .iter()
                .map(|a| format!("{}:({} {{{}}})", a.safety_value, a.action_id, a.action_label))
                .collect();
            let _ = writeln!(
                out,
                "{s} [{}]:  {}",
                game.states[*s].valuation_string(),
                entries.join("; ")
            );
        }
        out
    }

    /// Tab-separated export, one line per allowed action.
    pub fn export_tsv(&self, game: &StochasticGame) -> String {
        let mut out = String::from("# state_id\tvaluation\taction_id\taction_label\tsafety_value\n");
        for (s, allowed) in &self.rows {
            for a in allowed {
                let _ = writeln!(
                    out,
                    "{s}\t{}\t{}\t{}\t{}",
                    game.states[*s].valuation_string(),
                    a.action_id,
                    a.action_label,
                    a.safety_value
                );
            }
        }
        out
    }

    /// Number of (state, action) pairs the shield blocks.
    pub fn blocked_count(&self, game: &StochasticGame) -> usize {
        self.rows
            .iter()
            .map(|(s, allowed)| game.states[*s].choices.len() - allowed.len())
            .sum()
    }
}

impl PostShield {
    pub fn render(&self, game: &StochasticGame) -> String {
        let mut out = String::new();
        match self.kind {
            PostKind::Safety(threshold) => {
                let _ = writeln!(
                    out,
                    "Post-Safety-Shield with {}:",
                    threshold.describe()
                );
            }
            PostKind::Optimal => out.push_str("Optimal-Shield:\n"),
        }
        out.push_str(
            " state_id [label]: 'forwarded actions' [<action_id> {label}: <forwarded_action_id> {label}]:\n\n",
        );
        for (s, forwards) in &self.rows {
            let entries: Vec<String> = forwards
                .iter()
                .map(|f| {
                    format!(
                        "{}{{{}}}:{}{{{}}}",
                        f.action_id, f.action_label, f.forward_id, f.forward_label
                    )
                })
                .collect();
            let _ = writeln!(
                out,
                "{s} [{}]:  {}",
                game.states[*s].valuation_string(),
                entries.join("; ")
            );
        }
        out
    }

    /// Tab-separated export, one line per available action.
    pub fn export_tsv(&self, game: &StochasticGame) -> String {
        let mut out = String::from(
            "# state_id\tvaluation\taction_id\taction_label\tforward_id\tforward_label\n",
        );
        for (s, forwards) in &self.rows {
            for f in forwards {
                let _ = writeln!(
                    out,
                    "{s}\t{}\t{}\t{}\t{}\t{}",
                    game.states[*s].valuation_string(),
                    f.action_id,
                    f.action_label,
                    f.forward_id,
                    f.forward_label
                );
            }
        }
        out
    }

    /// Number of (state, action) pairs forwarded to a different action.
    pub fn corrected_count(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|(_, fs)| fs)
            .filter(|f| f.action_id != f.forward_id)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{GameBuilder, StrategyProfile};
    use proptest::prelude::*;

    /// One coalition state with the given Q-values; actions named a0, a1, ...
    fn fixture(qs: &[f64]) -> (StochasticGame, Coalition, SolveResult) {
        let mut b = GameBuilder::new(&["p1", "p2"]);
        let s = b.add_state(0, &[]);
        let labels: Vec<String> = (0..qs.len()).map(|i| format!("a{i}")).collect();
        for label in &labels {
            b.add_choice(s, label, &[(s, 1.0)]);
        }
        let game = b.build();
        let result = SolveResult {
            values: vec![qs.iter().cloned().fold(f64::MIN, f64::max)],
            q_values: Some(vec![qs.to_vec()]),
            strategy: StrategyProfile::empty(1),
            iterations: 1,
            converged: true,
        };
        (game, Coalition::new([0]), result)
    }

    #[test]
    fn absolute_threshold_allows_passing_actions() {
        let (game, coalition, result) = fixture(&[1.0, 1.0, 0.3]);
        let shield =
            synthesize_pre_safety(&game, &coalition, &result, Threshold::Absolute { gamma: 0.8 })
                .unwrap();
        let allowed: Vec<&str> = shield.rows[0]
            .1
            .iter()
            .map(|a| a.action_label.as_str())
            .collect();
        assert_eq!(allowed, vec!["a0", "a1"]);
        assert_eq!(shield.blocked_count(&game), 1);
    }

    #[test]
    fn relative_threshold_at_one_keeps_only_argmax() {
        let (game, coalition, result) = fixture(&[0.5, 0.7, 0.7]);
        let shield =
            synthesize_pre_safety(&game, &coalition, &result, Threshold::Relative { lambda: 1.0 })
                .unwrap();
        let allowed: Vec<&str> = shield.rows[0]
            .1
            .iter()
            .map(|a| a.action_label.as_str())
            .collect();
        assert_eq!(allowed, vec!["a1", "a2"]);
    }

    #[test]
    fn zero_gamma_allows_everything() {
        let (game, coalition, result) = fixture(&[0.0, 0.2, 1.0]);
        let shield =
            synthesize_pre_safety(&game, &coalition, &result, Threshold::Absolute { gamma: 0.0 })
                .unwrap();
        assert_eq!(shield.rows[0].1.len(), 3);
    }

    #[test]
    fn unattainable_gamma_falls_back_to_argmax_ties() {
        let (game, coalition, result) = fixture(&[0.5, 0.7, 0.7]);
        let shield =
            synthesize_pre_safety(&game, &coalition, &result, Threshold::Absolute { gamma: 0.9 })
                .unwrap();
        let allowed: Vec<&str> = shield.rows[0]
            .1
            .iter()
            .map(|a| a.action_label.as_str())
            .collect();
        assert_eq!(allowed, vec!["a1", "a2"]);
    }

    #[test]
    fn post_shield_forwards_failing_actions_to_argmax() {
        let (game, coalition, result) = fixture(&[0.9, 1.0]);
        let shield = synthesize_post_safety(
            &game,
            &coalition,
            &result,
            Threshold::Relative { lambda: 0.95 },
        )
        .unwrap();
        let forwards = &shield.rows[0].1;
        assert_eq!(
            (forwards[0].action_label.as_str(), forwards[0].forward_label.as_str()),
            ("a0", "a1")
        );
        assert_eq!(
            (forwards[1].action_label.as_str(), forwards[1].forward_label.as_str()),
            ("a1", "a1")
        );
        assert_eq!(shield.corrected_count(), 1);
    }

    #[test]
    fn equal_q_values_forward_identically() {
        let (game, coalition, result) = fixture(&[0.6, 0.6, 0.6]);
        let shield = synthesize_post_safety(
            &game,
            &coalition,
            &result,
            Threshold::Relative { lambda: 1.0 },
        )
        .unwrap();
        assert!(shield.rows[0].1.iter().all(|f| f.action_id == f.forward_id));
    }

    #[test]
    fn optimal_shield_forwards_to_the_strategy_action() {
        let (game, coalition, mut result) = fixture(&[0.1, 0.9, 0.3]);
        result.strategy.choice[0] = Some(1);
        let shield = synthesize_optimal(&game, &coalition, &result).unwrap();
        assert!(shield.rows[0].1.iter().all(|f| f.forward_label == "a1"));
    }

    #[test]
    fn out_of_range_threshold_rejected() {
        let (game, coalition, result) = fixture(&[0.5]);
        assert_eq!(
            synthesize_pre_safety(&game, &coalition, &result, Threshold::Absolute { gamma: 1.2 }),
            Err(ShieldError::ThresholdOutOfRange(1.2))
        );
        assert_eq!(
            synthesize_post_safety(
                &game,
                &coalition,
                &result,
                Threshold::Relative { lambda: -0.1 }
            ),
            Err(ShieldError::ThresholdOutOfRange(-0.1))
        );
    }

    #[test]
    fn pre_render_has_header_legend_and_rows() {
        let (mut game, coalition, result) = fixture(&[1.0, 0.9]);
        game.states[0].valuation = vec![("x".into(), 0)];
        let shield =
            synthesize_pre_safety(&game, &coalition, &result, Threshold::Absolute { gamma: 0.8 })
                .unwrap();
        let text = shield.render(&game);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "Pre-Safety-Shield with absolute comparison (gamma = 0.8):"
        );
        assert_eq!(
            lines[1],
            " state_id [label]:  'allowed actions' [<value>: (<action_id {label})>]:"
        );
        assert_eq!(lines[2], "");
        assert_eq!(lines[3], "0 [x=0]:  1:(0 {a0}); 0.9:(1 {a1})");
    }

    #[test]
    fn post_render_matches_format() {
        let (mut game, coalition, result) = fixture(&[0.9, 1.0]);
        game.states[0].valuation = vec![("x".into(), 1)];
        let shield = synthesize_post_safety(
            &game,
            &coalition,
            &result,
            Threshold::Relative { lambda: 0.95 },
        )
        .unwrap();
        let text = shield.render(&game);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "Post-Safety-Shield with relative comparison (lambda = 0.95):"
        );
        assert_eq!(lines[3], "0 [x=1]:  0{a0}:1{a1}; 1{a1}:1{a1}");
    }

    #[test]
    fn empty_coalition_state_set_renders_header_only() {
        let (game, _, result) = fixture(&[1.0]);
        let shield = synthesize_pre_safety(
            &game,
            &Coalition::new([1]),
            &result,
            Threshold::Absolute { gamma: 0.5 },
        )
        .unwrap();
        let text = shield.render(&game);
        // header, legend and the blank separator; no state rows
        assert!(text.ends_with("]:\n\n"), "{text:?}");
        assert_eq!(text.lines().count(), 3);
    }

    proptest! {
        /// Scaling all Q-values of a state by c in (0,1] must not change
        /// the relative shield's allowed set.
        #[test]
        fn relative_shield_scaling_invariance(
            qs in proptest::collection::vec(0.0..1.0f64, 1..5),
            lambda in 0.0..=1.0f64,
            c in 0.01..=1.0f64,
        ) {
            let (game, coalition, result) = fixture(&qs);
            let scaled: Vec<f64> = qs.iter().map(|q| q * c).collect();
            let (_, _, scaled_result) = fixture(&scaled);
            let t = Threshold::Relative { lambda };
            let a = synthesize_pre_safety(&game, &coalition, &result, t).unwrap();
            let b = synthesize_pre_safety(&game, &coalition, &scaled_result, t).unwrap();
            let ids = |s: &PreShield| -> Vec<usize> {
                s.rows[0].1.iter().map(|x| x.action_id).collect()
            };
            prop_assert_eq!(ids(&a), ids(&b));
        }

        /// The post shield never makes things worse.
        #[test]
        fn post_forwarding_never_decreases_q(
            qs in proptest::collection::vec(0.0..1.0f64, 1..5),
            lambda in 0.0..=1.0f64,
        ) {
            let (game, coalition, result) = fixture(&qs);
            let shield = synthesize_post_safety(
                &game,
                &coalition,
                &result,
                Threshold::Relative { lambda },
            )
            .unwrap();
            for f in &shield.rows[0].1 {
                prop_assert!(qs[f.forward_id] >= qs[f.action_id]);
            }
        }
    }
}
