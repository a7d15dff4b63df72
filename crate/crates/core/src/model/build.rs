//! Explicit state-space construction: BFS exploration of a parsed program
//! into a [`StochasticGame`].

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::expr::{Expr, Value};
use super::{Command, ConstType, ModelAst};
use crate::game::{
    ActionId, Choice, PlayerId, RewardStructure, State, StateId, StochasticGame, PROB_SUM_TOL,
};

/// Action label given to the self-loop added on deadlock states when
/// [`BuildOptions::fix_deadlocks`] is set.
pub const DEADLOCK_ACTION: &str = "__deadlock";

#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Values for constants declared without a definition (and overrides
    /// for defined ones).
    pub constants: BTreeMap<String, Value>,
    /// Replace deadlock states with a self-loop instead of failing.
    pub fix_deadlocks: bool,
    /// Maximum number of explored states.
    pub state_limit: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            constants: BTreeMap::new(),
            fix_deadlocks: false,
            state_limit: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error("constant {0:?} has no value; supply it with an override")]
    UndefinedConstant(String),
    #[error("constant {name:?}: expected {expected}, got {got}")]
    ConstantType {
        name: String,
        expected: &'static str,
        got: &'static str,
    },
    #[error("player {player:?} references unknown module {module:?}")]
    UnknownModule { player: String, module: String },
    #[error("player {player:?} references unknown action {action:?}")]
    UnknownAction { player: String, action: String },
    #[error("{what} {name:?} is owned by both {first:?} and {second:?}")]
    DoubleOwnership {
        what: &'static str,
        name: String,
        first: String,
        second: String,
    },
    #[error("{what} {name:?} has commands but no owning player")]
    Unowned { what: &'static str, name: String },
    #[error("variable {name:?} has empty range [{low}..{high}]")]
    EmptyRange { name: String, low: i64, high: i64 },
    #[error("variable {name:?} initial value {value} outside [{low}..{high}]")]
    InitOutOfBounds {
        name: String,
        value: i64,
        low: i64,
        high: i64,
    },
    #[error("line {line}: update sets {name:?} to {value}, outside [{low}..{high}] in state [{state}]")]
    UpdateOutOfBounds {
        line: usize,
        name: String,
        value: i64,
        low: i64,
        high: i64,
        state: String,
    },
    #[error("line {line}: probability sum {sum} in state [{state}]")]
    ProbabilitySum {
        line: usize,
        sum: f64,
        state: String,
    },
    #[error("line {line}: probability {value} outside (0,1] in state [{state}]")]
    ProbabilityRange {
        line: usize,
        value: f64,
        state: String,
    },
    #[error("action {action:?}: modules {first:?} and {second:?} both assign {name:?}")]
    ConflictingAssignment {
        action: String,
        name: String,
        first: String,
        second: String,
    },
    #[error("turn violation in state [{state}]: players {first:?} and {second:?} both have enabled commands")]
    TurnViolation {
        state: String,
        first: String,
        second: String,
    },
    #[error("state limit of {0} states exceeded")]
    StateLimitExceeded(usize),
    #[error("deadlock in state [{0}]")]
    Deadlock(String),
    #[error("line {line}: {message}")]
    Eval { line: usize, message: String },
    #[error("{0}")]
    Other(String),
}

/// Build the explicit game from a parsed program.
///
/// States are discovered breadth-first from the initial valuation and
/// choices are listed in textual command order, so state and action ids are
/// a deterministic function of (text, options).
pub fn build_game(ast: &ModelAst, options: &BuildOptions) -> Result<StochasticGame, BuildError> {
    let consts = eval_constants(ast, options)?;
    let vars = eval_variables(ast, &consts)?;
    let plumbing = resolve_ownership(ast)?;
    Explorer {
        ast,
        consts,
        vars,
        plumbing,
        options,
    }
    .explore()
}

fn eval_constants(
    ast: &ModelAst,
    options: &BuildOptions,
) -> Result<BTreeMap<String, Value>, BuildError> {
    let mut consts: BTreeMap<String, Value> = BTreeMap::new();
    for decl in &ast.constants {
        let raw = match options.constants.get(&decl.name) {
            Some(v) => *v,
            None => match &decl.value {
                Some(e) => e
                    .eval(&|n| consts.get(n).copied())
                    .map_err(|e| BuildError::Other(format!("constant {:?}: {e}", decl.name)))?,
                None => return Err(BuildError::UndefinedConstant(decl.name.clone())),
            },
        };
        let coerced = match (decl.ctype, raw) {
            (ConstType::Int, Value::Int(_)) => raw,
            (ConstType::Double, Value::Int(i)) => Value::Double(i as f64),
            (ConstType::Double, Value::Double(_)) => raw,
            (ConstType::Bool, Value::Bool(_)) => raw,
            (ctype, got) => {
                return Err(BuildError::ConstantType {
                    name: decl.name.clone(),
                    expected: match ctype {
                        ConstType::Int => "int",
                        ConstType::Double => "double",
                        ConstType::Bool => "bool",
                    },
                    got: got.type_name(),
                })
            }
        };
        consts.insert(decl.name.clone(), coerced);
    }
    Ok(consts)
}

struct VarInfo {
    name: String,
    low: i64,
    high: i64,
    init: i64,
}

fn eval_variables(
    ast: &ModelAst,
    consts: &BTreeMap<String, Value>,
) -> Result<Vec<VarInfo>, BuildError> {
    let lookup = |n: &str| consts.get(n).copied();
    let mut vars = Vec::new();
    for module in &ast.modules {
        for v in &module.variables {
            let eval_int = |e: &Expr| -> Result<i64, BuildError> {
                e.eval(&lookup)
                    .and_then(|v| v.as_int())
                    .map_err(|e| BuildError::Other(format!("variable {:?}: {e}", v.name)))
            };
            let (low, high, init) = (eval_int(&v.low)?, eval_int(&v.high)?, eval_int(&v.init)?);
            if low > high {
                return Err(BuildError::EmptyRange {
                    name: v.name.clone(),
                    low,
                    high,
                });
            }
            if init < low || init > high {
                return Err(BuildError::InitOutOfBounds {
                    name: v.name.clone(),
                    value: init,
                    low,
                    high,
                });
            }
            vars.push(VarInfo {
                name: v.name.clone(),
                low,
                high,
                init,
            });
        }
    }
    Ok(vars)
}

/// A command tagged with its module and the owning player; unlabeled
/// commands get a synthetic per-module action label.
struct OwnedCommand<'a> {
    command: &'a Command,
    module: usize,
    owner: PlayerId,
    label: String,
}

struct Plumbing<'a> {
    players: Vec<String>,
    /// All commands in textual order.
    commands: Vec<OwnedCommand<'a>>,
    /// Synchronization groups: for each shared action label, the modules
    /// that declare a command on it (every one must fire).
    sync_groups: HashMap<String, Vec<usize>>,
    /// Action labels in first-occurrence order.
    action_labels: Vec<String>,
}

fn resolve_ownership(ast: &ModelAst) -> Result<Plumbing<'_>, BuildError> {
    let players: Vec<String> = ast.players.iter().map(|p| p.name.clone()).collect();
    let module_names: Vec<&str> = ast.modules.iter().map(|m| m.name.as_str()).collect();

    let mut module_owner: HashMap<&str, &str> = HashMap::new();
    let mut action_owner: HashMap<&str, &str> = HashMap::new();
    for block in &ast.players {
        for m in &block.modules {
            if !module_names.contains(&m.as_str()) {
                return Err(BuildError::UnknownModule {
                    player: block.name.clone(),
                    module: m.clone(),
                });
            }
            if let Some(prev) = module_owner.insert(m, &block.name) {
                return Err(BuildError::DoubleOwnership {
                    what: "module",
                    name: m.clone(),
                    first: prev.to_string(),
                    second: block.name.clone(),
                });
            }
        }
        for a in &block.actions {
            let declared = ast
                .modules
                .iter()
                .any(|m| m.commands.iter().any(|c| c.action.as_deref() == Some(a)));
            if !declared {
                return Err(BuildError::UnknownAction {
                    player: block.name.clone(),
                    action: a.clone(),
                });
            }
            if let Some(prev) = action_owner.insert(a, &block.name) {
                return Err(BuildError::DoubleOwnership {
                    what: "action",
                    name: a.clone(),
                    first: prev.to_string(),
                    second: block.name.clone(),
                });
            }
        }
    }

    let player_id = |name: &str| players.iter().position(|p| p == name).unwrap();
    let mut commands = Vec::new();
    let mut sync_groups: HashMap<String, Vec<usize>> = HashMap::new();
    let mut action_labels: Vec<String> = Vec::new();
    let intern = |label: &str, action_labels: &mut Vec<String>| {
        if !action_labels.iter().any(|l| l == label) {
            action_labels.push(label.to_string());
        }
    };
    for (mi, module) in ast.modules.iter().enumerate() {
        for (ci, command) in module.commands.iter().enumerate() {
            let (owner, label) = match &command.action {
                Some(a) => {
                    let owner = action_owner.get(a.as_str()).ok_or(BuildError::Unowned {
                        what: "action",
                        name: a.clone(),
                    })?;
                    let group = sync_groups.entry(a.clone()).or_default();
                    if !group.contains(&mi) {
                        group.push(mi);
                    }
                    (player_id(owner), a.clone())
                }
                None => {
                    let owner = module_owner
                        .get(module.name.as_str())
                        .ok_or(BuildError::Unowned {
                            what: "module",
                            name: module.name.clone(),
                        })?;
                    (player_id(owner), format!("{}_{}", module.name, ci))
                }
            };
            intern(&label, &mut action_labels);
            commands.push(OwnedCommand {
                command,
                module: mi,
                owner,
                label,
            });
        }
    }
    Ok(Plumbing {
        players,
        commands,
        sync_groups,
        action_labels,
    })
}

struct Explorer<'a> {
    ast: &'a ModelAst,
    consts: BTreeMap<String, Value>,
    vars: Vec<VarInfo>,
    plumbing: Plumbing<'a>,
    options: &'a BuildOptions,
}

/// One exit of a (possibly synchronized) command: probability and the
/// successor valuation.
struct Branch {
    prob: f64,
    target: Vec<i64>,
}

impl<'a> Explorer<'a> {
    fn lookup<'v>(&'v self, valuation: &'v [i64]) -> impl Fn(&str) -> Option<Value> + 'v {
        move |name: &str| {
            if let Some(i) = self.vars.iter().position(|v| v.name == name) {
                return Some(Value::Int(valuation[i]));
            }
            self.consts.get(name).copied()
        }
    }

    fn describe(&self, valuation: &[i64]) -> String {
        self.vars
            .iter()
            .zip(valuation)
            .map(|(v, x)| format!("{}={}", v.name, x))
            .collect::<Vec<_>>()
            .join(" & ")
    }

    fn enabled(&self, oc: &OwnedCommand<'_>, valuation: &[i64]) -> Result<bool, BuildError> {
        oc.command
            .guard
            .eval(&self.lookup(valuation))
            .and_then(|v| v.as_bool())
            .map_err(|e| BuildError::Eval {
                line: oc.command.line,
                message: e.to_string(),
            })
    }

    /// Evaluate one command's updates in isolation, without normalization
    /// checks (synchronization multiplies probabilities first).
    fn command_branches(
        &self,
        oc: &OwnedCommand<'_>,
        valuation: &[i64],
    ) -> Result<Vec<Branch>, BuildError> {
        let lookup = self.lookup(valuation);
        let line = oc.command.line;
        let mut out = Vec::new();
        for update in &oc.command.updates {
            let prob = match &update.prob {
                None => 1.0,
                Some(e) => e
                    .eval(&lookup)
                    .and_then(|v| v.as_double())
                    .map_err(|e| BuildError::Eval {
                        line,
                        message: e.to_string(),
                    })?,
            };
            let mut target = valuation.to_vec();
            for (name, expr) in &update.assigns {
                let value = expr
                    .eval(&lookup)
                    .and_then(|v| v.as_int())
                    .map_err(|e| BuildError::Eval {
                        line,
                        message: e.to_string(),
                    })?;
                let vi = self.vars.iter().position(|v| v.name == *name).unwrap();
                let info = &self.vars[vi];
                if value < info.low || value > info.high {
                    return Err(BuildError::UpdateOutOfBounds {
                        line,
                        name: name.clone(),
                        value,
                        low: info.low,
                        high: info.high,
                        state: self.describe(valuation),
                    });
                }
                target[vi] = value;
            }
            out.push(Branch { prob, target });
        }
        Ok(out)
    }

    /// Combine the branch sets of the commands firing together: probability
    /// product, assignment union. Commands are given with their module for
    /// conflict reporting.
    fn synchronize(
        &self,
        parts: &[&OwnedCommand<'_>],
        valuation: &[i64],
        label: &str,
    ) -> Result<Vec<Branch>, BuildError> {
        let mut combined = vec![Branch {
            prob: 1.0,
            target: valuation.to_vec(),
        }];
        // which part assigned each variable, for conflict messages
        let mut assigned_by: HashMap<&str, usize> = HashMap::new();
        for (pi, oc) in parts.iter().enumerate() {
            for update in &oc.command.updates {
                for (name, _) in &update.assigns {
                    if let Some(&prev) = assigned_by.get(name.as_str()) {
                        if prev != pi {
                            return Err(BuildError::ConflictingAssignment {
                                action: label.to_string(),
                                name: name.clone(),
                                first: self.ast.modules[parts[prev].module].name.clone(),
                                second: self.ast.modules[oc.module].name.clone(),
                            });
                        }
                    } else {
                        assigned_by.insert(name, pi);
                    }
                }
            }
        }
        for oc in parts {
            let own = self.command_branches(oc, valuation)?;
            let mut next = Vec::with_capacity(combined.len() * own.len());
            for base in &combined {
                for branch in &own {
                    let mut target = base.target.clone();
                    for (vi, value) in branch.target.iter().enumerate() {
                        if *value != valuation[vi] {
                            target[vi] = *value;
                        }
                    }
                    next.push(Branch {
                        prob: base.prob * branch.prob,
                        target,
                    });
                }
            }
            combined = next;
        }
        Ok(combined)
    }

    /// All choices enabled in `valuation`, each tagged with its owner.
    fn state_choices(
        &self,
        valuation: &[i64],
    ) -> Result<Vec<(PlayerId, String, usize, Vec<Branch>)>, BuildError> {
        let mut out = Vec::new();
        let mut seen_labels: Vec<&str> = Vec::new();
        for oc in &self.plumbing.commands {
            match &oc.command.action {
                None => {
                    if self.enabled(oc, valuation)? {
                        let branches = self.command_branches(oc, valuation)?;
                        out.push((oc.owner, oc.label.clone(), oc.command.line, branches));
                    }
                }
                Some(action) => {
                    // synchronized labels are handled once, at the first
                    // textual occurrence
                    if seen_labels.contains(&action.as_str()) {
                        continue;
                    }
                    seen_labels.push(action);
                    let group = &self.plumbing.sync_groups[action.as_str()];
                    // per participating module, the enabled commands on
                    // this label; empty anywhere disables the action
                    let mut per_module: Vec<Vec<&OwnedCommand<'_>>> = Vec::new();
                    for &mi in group {
                        let enabled: Vec<&OwnedCommand<'_>> = self
                            .plumbing
                            .commands
                            .iter()
                            .filter(|c| {
                                c.module == mi && c.command.action.as_deref() == Some(action)
                            })
                            .filter_map(|c| match self.enabled(c, valuation) {
                                Ok(true) => Some(Ok(c)),
                                Ok(false) => None,
                                Err(e) => Some(Err(e)),
                            })
                            .collect::<Result<_, _>>()?;
                        per_module.push(enabled);
                    }
                    if per_module.iter().any(|v| v.is_empty()) {
                        continue;
                    }
                    // cartesian product across modules of the enabled
                    // alternatives; each combination is one choice
                    let mut combos: Vec<Vec<&OwnedCommand<'_>>> = vec![Vec::new()];
                    for alternatives in &per_module {
                        let mut next = Vec::new();
                        for combo in &combos {
                            for alt in alternatives {
                                let mut c = combo.clone();
                                c.push(*alt);
                                next.push(c);
                            }
                        }
                        combos = next;
                    }
                    for combo in &combos {
                        let branches = self.synchronize(combo, valuation, action)?;
                        let line = combo[0].command.line;
                        out.push((oc.owner, action.clone(), line, branches));
                    }
                }
            }
        }
        Ok(out)
    }

    fn explore(self) -> Result<StochasticGame, BuildError> {
        let initial: Vec<i64> = self.vars.iter().map(|v| v.init).collect();
        let mut ids: HashMap<Vec<i64>, StateId> = HashMap::new();
        let mut valuations: Vec<Vec<i64>> = Vec::new();
        let mut states: Vec<State> = Vec::new();
        let mut action_ids: HashMap<String, ActionId> = self
            .plumbing
            .action_labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let mut action_labels = self.plumbing.action_labels.clone();

        ids.insert(initial.clone(), 0);
        valuations.push(initial);
        let mut queue: VecDeque<StateId> = VecDeque::from([0]);

        while let Some(sid) = queue.pop_front() {
            let valuation = valuations[sid].clone();
            let raw = self.state_choices(&valuation)?;
            let owner = match raw.first() {
                Some((owner, ..)) => {
                    if let Some((other, ..)) = raw.iter().find(|(o, ..)| o != owner) {
                        return Err(BuildError::TurnViolation {
                            state: self.describe(&valuation),
                            first: self.plumbing.players[*owner].clone(),
                            second: self.plumbing.players[*other].clone(),
                        });
                    }
                    *owner
                }
                None if self.options.fix_deadlocks => 0,
                None => return Err(BuildError::Deadlock(self.describe(&valuation))),
            };

            let mut choices = Vec::with_capacity(raw.len().max(1));
            for (_, label, line, branches) in raw {
                let mut sum = 0.0;
                // successors deduplicated by target valuation
                let mut resolved: Vec<(StateId, f64)> = Vec::new();
                for branch in branches {
                    if branch.prob <= 0.0 || branch.prob > 1.0 + PROB_SUM_TOL {
                        return Err(BuildError::ProbabilityRange {
                            line,
                            value: branch.prob,
                            state: self.describe(&valuation),
                        });
                    }
                    sum += branch.prob;
                    let target = *ids.entry(branch.target.clone()).or_insert_with(|| {
                        valuations.push(branch.target.clone());
                        queue.push_back(valuations.len() - 1);
                        valuations.len() - 1
                    });
                    match resolved.iter_mut().find(|(t, _)| *t == target) {
                        Some((_, p)) => *p += branch.prob,
                        None => resolved.push((target, branch.prob)),
                    }
                }
                if (sum - 1.0).abs() > PROB_SUM_TOL {
                    return Err(BuildError::ProbabilitySum {
                        line,
                        sum,
                        state: self.describe(&valuation),
                    });
                }
                if valuations.len() > self.options.state_limit {
                    return Err(BuildError::StateLimitExceeded(self.options.state_limit));
                }
                let action_id = action_ids[&label];
                choices.push(Choice {
                    action_id,
                    action_label: label,
                    branches: resolved,
                });
            }
            if choices.is_empty() {
                let action_id = *action_ids
                    .entry(DEADLOCK_ACTION.to_string())
                    .or_insert_with(|| {
                        action_labels.push(DEADLOCK_ACTION.to_string());
                        action_labels.len() - 1
                    });
                choices.push(Choice {
                    action_id,
                    action_label: DEADLOCK_ACTION.to_string(),
                    branches: vec![(sid, 1.0)],
                });
            }

            debug_assert_eq!(states.len(), sid);
            states.push(State {
                owner,
                labels: Default::default(),
                valuation: self
                    .vars
                    .iter()
                    .zip(&valuation)
                    .map(|(v, x)| (v.name.clone(), *x))
                    .collect(),
                choices,
            });
        }

        self.decorate(&mut states, &valuations, &action_ids)?;
        let reward_structures = self.rewards(&states, &valuations, &action_ids)?;
        Ok(StochasticGame {
            players: self.plumbing.players.clone(),
            states,
            initial_state: 0,
            reward_structures,
            action_labels,
        })
    }

    /// Evaluate label definitions per state.
    fn decorate(
        &self,
        states: &mut [State],
        valuations: &[Vec<i64>],
        _action_ids: &HashMap<String, ActionId>,
    ) -> Result<(), BuildError> {
        for def in &self.ast.labels {
            for (sid, valuation) in valuations.iter().enumerate() {
                let holds = def
                    .value
                    .eval(&self.lookup(valuation))
                    .and_then(|v| v.as_bool())
                    .map_err(|e| BuildError::Other(format!("label {:?}: {e}", def.name)))?;
                if holds {
                    states[sid].labels.insert(def.name.clone());
                }
            }
        }
        Ok(())
    }

    /// Evaluate reward blocks per state / per (state, enabled action).
    fn rewards(
        &self,
        states: &[State],
        valuations: &[Vec<i64>],
        action_ids: &HashMap<String, ActionId>,
    ) -> Result<BTreeMap<String, RewardStructure>, BuildError> {
        let mut out = BTreeMap::new();
        for block in &self.ast.rewards {
            let mut rew = RewardStructure {
                state_rewards: vec![0.0; states.len()],
                ..Default::default()
            };
            for item in &block.items {
                for (sid, valuation) in valuations.iter().enumerate() {
                    let lookup = self.lookup(valuation);
                    let err = |e: super::expr::EvalError| {
                        BuildError::Other(format!("rewards {:?}: {e}", block.name))
                    };
                    if !item.guard.eval(&lookup).and_then(|v| v.as_bool()).map_err(err)? {
                        continue;
                    }
                    let value = item.value.eval(&lookup).and_then(|v| v.as_double()).map_err(err)?;
                    match &item.action {
                        None => rew.state_rewards[sid] += value,
                        Some(action) => {
                            let Some(&aid) = action_ids.get(action.as_str()) else {
                                continue;
                            };
                            if states[sid].choices.iter().any(|c| c.action_id == aid) {
                                *rew.action_rewards.entry((sid, aid)).or_insert(0.0) += value;
                            }
                        }
                    }
                }
            }
            out.insert(block.name.clone(), rew);
        }
        Ok(out)
    }
}
