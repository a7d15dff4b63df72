//! Synthesis toolkit for turn-based stochastic multi-player games: a
//! guarded-command modeling language, an rPATL-style property language,
//! value-iteration solvers and shield synthesis (pre-safety, post-safety,
//! optimal).

pub mod game;
pub mod generators;
pub mod model;
pub mod oracle;
pub mod property;
pub mod random;
pub mod shields;
pub mod solver;

pub use game::{
    coalition_role, induce_markov_chain, max_roles, validate, ActionId, Choice, Coalition,
    Diagnostic, Direction, MarkovChain, PlayerId, RewardStructure, Role, State, StateId,
    StochasticGame, StrategyProfile,
};
pub use model::{build_game, parse_model, BuildError, BuildOptions, SyntaxError};
pub use property::{
    parse_property, parse_props_file, BindError, BoundPath, BoundProperty, PathFormula, Property,
    PropertyError, Quantifier, ShieldAnnotation, StateFormula,
};
pub use shields::{
    synthesize_optimal, synthesize_post_safety, synthesize_pre_safety, PostShield, PreShield,
    ShieldError, Threshold,
};
pub use solver::{
    evaluate, fix_coalition_strategy, solve_bounded_safety, solve_mean_payoff,
    solve_reachability, solve_until, SolveError, SolveResult, SolverParams,
};
