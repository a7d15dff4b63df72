//! Guarded-command modeling language for stochastic multi-player games:
//! lexer, parser and explicit state-space construction.
//!
//! The grammar is documented in `docs/model-grammar.md`.

pub mod build;
pub mod expr;
pub mod lexer;
pub mod parser;

pub use build::{build_game, BuildError, BuildOptions};
pub use expr::{Expr, Value};
pub use lexer::SyntaxError;
pub use parser::parse_model;

/// Parsed guarded-command program before state-space exploration.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelAst {
    pub constants: Vec<ConstDecl>,
    pub modules: Vec<Module>,
    pub players: Vec<PlayerBlock>,
    pub rewards: Vec<RewardBlock>,
    pub labels: Vec<LabelDef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstType {
    Int,
    Double,
    Bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstDecl {
    pub name: String,
    pub ctype: ConstType,
    pub value: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Module {
    pub name: String,
    pub variables: Vec<VarDecl>,
    pub commands: Vec<Command>,
}

/// Bounded integer variable `x : [lo..hi] init e;`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub low: Expr,
    pub high: Expr,
    pub init: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Command {
    /// Synchronization label; `None` for unlabeled commands.
    pub action: Option<String>,
    pub guard: Expr,
    pub updates: Vec<Update>,
    /// Global textual position, used for deterministic choice ordering.
    pub position: usize,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Update {
    /// Probability expression; `None` means probability 1.
    pub prob: Option<Expr>,
    /// Simultaneous assignments `(x'=e) & (y'=e)`; empty for `true`.
    pub assigns: Vec<(String, Expr)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayerBlock {
    pub name: String,
    pub modules: Vec<String>,
    pub actions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewardBlock {
    pub name: String,
    pub items: Vec<RewardItem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewardItem {
    /// `Some(label)` for action rewards, `None` for state rewards.
    pub action: Option<String>,
    pub guard: Expr,
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelDef {
    pub name: String,
    pub value: Expr,
}
