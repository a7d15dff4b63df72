//! rPATL-style property fragment with shield annotations: parser, pretty
//! printer and binding of named entities against a concrete game.
//!
//! Concrete syntax examples:
//! `<PreSafety, gamma=0.9> <<shield>> Pmax=? [ G<=14 !crash ]`,
//! `<<defender>> R{"infections"}min=? [ S ]`,
//! `<Optimal> <<shield>> R{"cost"}min=? [ S ]`.

use std::fmt;

use crate::game::{Coalition, StochasticGame};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShieldAnnotation {
    None,
    PreSafety { gamma: f64 },
    PostSafety { lambda: f64 },
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Pmax,
    Pmin,
    Rmax,
    Rmin,
}

impl Quantifier {
    pub fn is_reward(self) -> bool {
        matches!(self, Quantifier::Rmax | Quantifier::Rmin)
    }

    pub fn is_max(self) -> bool {
        matches!(self, Quantifier::Pmax | Quantifier::Rmax)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn apply(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// Boolean combination of labels and variable comparisons.
#[derive(Debug, Clone, PartialEq)]
pub enum StateFormula {
    True,
    False,
    /// A label; quoted in canonical syntax, bare identifiers accepted.
    Label(String),
    Cmp(String, CmpOp, i64),
    Not(Box<StateFormula>),
    And(Box<StateFormula>, Box<StateFormula>),
    Or(Box<StateFormula>, Box<StateFormula>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathFormula {
    Next(StateFormula),
    Finally(StateFormula),
    FinallyBounded(StateFormula, u32),
    Until(StateFormula, StateFormula),
    GloballyBounded(StateFormula, u32),
    Globally(StateFormula),
    SteadyState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Property {
    pub shield: ShieldAnnotation,
    pub coalition_names: Vec<String>,
    pub quantifier: Quantifier,
    /// Required iff the quantifier is Rmax/Rmin.
    pub reward_name: Option<String>,
    pub path: PathFormula,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {message}")]
pub struct PropertyError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// Parse a single property string.
pub fn parse_property(text: &str) -> Result<Property, PropertyError> {
    parse_property_line(text, 1)
}

/// Parse a `.props` file: one property per line, `#` comments, blank lines
/// skipped.
pub fn parse_props_file(text: &str) -> Result<Vec<Property>, PropertyError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_property_line(line, i + 1)?);
    }
    Ok(out)
}

fn parse_property_line(text: &str, line: usize) -> Result<Property, PropertyError> {
    let mut c = Cursor {
        chars: text.chars().collect(),
        pos: 0,
        line,
    };
    let prop = c.property()?;
    c.skip_ws();
    if !c.at_end() {
        return Err(c.error("trailing input after property"));
    }
    check_invariants(&prop).map_err(|message| PropertyError {
        line,
        col: 1,
        message,
    })?;
    Ok(prop)
}

fn check_invariants(p: &Property) -> Result<(), String> {
    if p.quantifier.is_reward() != (p.path == PathFormula::SteadyState) {
        return Err(if p.quantifier.is_reward() {
            "R quantifiers support only the S operator".into()
        } else {
            "S requires an R quantifier".into()
        });
    }
    if p.quantifier.is_reward() != p.reward_name.is_some() {
        return Err("reward name is required exactly for R quantifiers".into());
    }
    match p.shield {
        ShieldAnnotation::None => {}
        ShieldAnnotation::PreSafety { gamma } => {
            if !(0.0..=1.0).contains(&gamma) {
                return Err("gamma out of range".into());
            }
            if !matches!(p.path, PathFormula::GloballyBounded(_, k) if k >= 1) {
                return Err("PreSafety requires a P quantifier with G<=k, k >= 1".into());
            }
        }
        ShieldAnnotation::PostSafety { lambda } => {
            if !(0.0..=1.0).contains(&lambda) {
                return Err("lambda out of range".into());
            }
            if !matches!(p.path, PathFormula::GloballyBounded(_, k) if k >= 1) {
                return Err("PostSafety requires a P quantifier with G<=k, k >= 1".into());
            }
        }
        ShieldAnnotation::Optimal => {
            if p.path != PathFormula::SteadyState {
                return Err("Optimal requires an R quantifier with S".into());
            }
        }
    }
    if let PathFormula::GloballyBounded(_, k) = p.path {
        if k == 0 {
            return Err("bounded G horizon must be at least 1".into());
        }
    }
    Ok(())
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn error(&self, message: impl Into<String>) -> PropertyError {
        PropertyError {
            line: self.line,
            col: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    /// Consume `lit` if it comes next (after whitespace).
    fn eat(&mut self, lit: &str) -> bool {
        self.skip_ws();
        let lit: Vec<char> = lit.chars().collect();
        if self.chars[self.pos..].starts_with(&lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    /// Like `eat`, but only when `lit` is not followed by an identifier
    /// character (for keywords).
    fn eat_word(&mut self, lit: &str) -> bool {
        self.skip_ws();
        let lit_chars: Vec<char> = lit.chars().collect();
        if self.chars[self.pos..].starts_with(&lit_chars) {
            let next = self.chars.get(self.pos + lit_chars.len());
            if !next.is_some_and(|c| c.is_alphanumeric() || *c == '_') {
                self.pos += lit_chars.len();
                return true;
            }
        }
        false
    }

    fn expect(&mut self, lit: &str) -> Result<(), PropertyError> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{lit}`")))
        }
    }

    fn ident(&mut self) -> Result<String, PropertyError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected identifier"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn string(&mut self) -> Result<String, PropertyError> {
        self.expect("\"")?;
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| *c != '"') {
            self.pos += 1;
        }
        if self.at_end() {
            return Err(self.error("unterminated string"));
        }
        let s = self.chars[start..self.pos].iter().collect();
        self.pos += 1;
        Ok(s)
    }

    fn number(&mut self) -> Result<f64, PropertyError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit() || *c == '.')
        {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse()
            .map_err(|_| self.error("expected a number"))
    }

    fn integer(&mut self) -> Result<i64, PropertyError> {
        self.skip_ws();
        let start = self.pos;
        if self.chars.get(self.pos) == Some(&'-') {
            self.pos += 1;
        }
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse()
            .map_err(|_| self.error("expected an integer"))
    }

    fn property(&mut self) -> Result<Property, PropertyError> {
        let shield = self.annotation()?;
        self.expect("<<")?;
        let mut coalition_names = vec![self.ident()?];
        while self.eat(",") {
            coalition_names.push(self.ident()?);
        }
        self.expect(">>")?;
        let (quantifier, reward_name) = self.quantifier()?;
        self.expect("=?")?;
        self.expect("[")?;
        let path = self.path()?;
        self.expect("]")?;
        Ok(Property {
            shield,
            coalition_names,
            quantifier,
            reward_name,
            path,
        })
    }

    fn annotation(&mut self) -> Result<ShieldAnnotation, PropertyError> {
        self.skip_ws();
        // `<<` starts the coalition, a single `<` starts an annotation
        if self.chars.get(self.pos) != Some(&'<') || self.chars.get(self.pos + 1) == Some(&'<') {
            return Ok(ShieldAnnotation::None);
        }
        self.pos += 1;
        let kind = self.ident()?;
        let ann = match kind.as_str() {
            "PreSafety" => {
                self.expect(",")?;
                if !self.eat_word("gamma") {
                    return Err(self.error("expected `gamma`"));
                }
                self.expect("=")?;
                ShieldAnnotation::PreSafety {
                    gamma: self.number()?,
                }
            }
            "PostSafety" => {
                self.expect(",")?;
                if !self.eat_word("lambda") {
                    return Err(self.error("expected `lambda`"));
                }
                self.expect("=")?;
                ShieldAnnotation::PostSafety {
                    lambda: self.number()?,
                }
            }
            "Optimal" => ShieldAnnotation::Optimal,
            other => return Err(self.error(format!("unknown annotation `{other}`"))),
        };
        self.expect(">")?;
        Ok(ann)
    }

    fn quantifier(&mut self) -> Result<(Quantifier, Option<String>), PropertyError> {
        if self.eat_word("Pmax") {
            return Ok((Quantifier::Pmax, None));
        }
        if self.eat_word("Pmin") {
            return Ok((Quantifier::Pmin, None));
        }
        if self.eat("R") {
            self.expect("{")?;
            let name = self.string()?;
            self.expect("}")?;
            let q = if self.eat_word("max") {
                Quantifier::Rmax
            } else if self.eat_word("min") {
                Quantifier::Rmin
            } else {
                return Err(self.error("expected `min` or `max` after R{...}"));
            };
            return Ok((q, Some(name)));
        }
        Err(self.error("expected `Pmax`, `Pmin` or `R{\"name\"}min/max`"))
    }

    fn path(&mut self) -> Result<PathFormula, PropertyError> {
        if self.eat_word("S") {
            return Ok(PathFormula::SteadyState);
        }
        if self.eat_word("X") {
            return Ok(PathFormula::Next(self.formula()?));
        }
        if self.eat_word("F") {
            return if self.eat("<=") {
                let k = self.bound()?;
                Ok(PathFormula::FinallyBounded(self.formula()?, k))
            } else {
                Ok(PathFormula::Finally(self.formula()?))
            };
        }
        if self.eat_word("G") {
            return if self.eat("<=") {
                let k = self.bound()?;
                Ok(PathFormula::GloballyBounded(self.formula()?, k))
            } else {
                Ok(PathFormula::Globally(self.formula()?))
            };
        }
        let lhs = self.formula()?;
        if !self.eat_word("U") {
            return Err(self.error("expected `U`"));
        }
        let rhs = self.formula()?;
        Ok(PathFormula::Until(lhs, rhs))
    }

    fn bound(&mut self) -> Result<u32, PropertyError> {
        let k = self.integer()?;
        u32::try_from(k).map_err(|_| self.error("bound must be non-negative"))
    }

    fn formula(&mut self) -> Result<StateFormula, PropertyError> {
        let mut lhs = self.and_formula()?;
        while self.eat("|") {
            lhs = StateFormula::Or(Box::new(lhs), Box::new(self.and_formula()?));
        }
        Ok(lhs)
    }

    fn and_formula(&mut self) -> Result<StateFormula, PropertyError> {
        let mut lhs = self.unary_formula()?;
        while self.eat("&") {
            lhs = StateFormula::And(Box::new(lhs), Box::new(self.unary_formula()?));
        }
        Ok(lhs)
    }

    fn unary_formula(&mut self) -> Result<StateFormula, PropertyError> {
        self.skip_ws();
        // `!=` belongs to a comparison, lone `!` is negation
        if self.chars.get(self.pos) == Some(&'!') && self.chars.get(self.pos + 1) != Some(&'=') {
            self.pos += 1;
            return Ok(StateFormula::Not(Box::new(self.unary_formula()?)));
        }
        self.atom_formula()
    }

    fn atom_formula(&mut self) -> Result<StateFormula, PropertyError> {
        self.skip_ws();
        match self.chars.get(self.pos) {
            Some('(') => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(")")?;
                Ok(f)
            }
            Some('"') => Ok(StateFormula::Label(self.string()?)),
            _ => {
                if self.eat_word("true") {
                    return Ok(StateFormula::True);
                }
                if self.eat_word("false") {
                    return Ok(StateFormula::False);
                }
                let save = self.pos;
                let name = self.ident()?;
                if name == "U" {
                    // reserved for the until operator
                    self.pos = save;
                    return Err(self.error("expected state formula"));
                }
                let op = if self.eat("!=") {
                    Some(CmpOp::Ne)
                } else if self.eat("<=") {
                    Some(CmpOp::Le)
                } else if self.eat(">=") {
                    Some(CmpOp::Ge)
                } else if self.eat("=") {
                    Some(CmpOp::Eq)
                } else if self.eat("<") {
                    Some(CmpOp::Lt)
                } else if self.eat(">") {
                    Some(CmpOp::Gt)
                } else {
                    None
                };
                match op {
                    Some(op) => Ok(StateFormula::Cmp(name, op, self.integer()?)),
                    None => Ok(StateFormula::Label(name)),
                }
            }
        }
    }
}

impl fmt::Display for StateFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateFormula::True => write!(f, "true"),
            StateFormula::False => write!(f, "false"),
            StateFormula::Label(name) => write!(f, "{name:?}"),
            StateFormula::Cmp(name, op, v) => write!(f, "{name}{}{v}", op.symbol()),
            StateFormula::Not(e) => write!(f, "!{e}"),
            StateFormula::And(a, b) => write!(f, "({a} & {b})"),
            StateFormula::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

impl fmt::Display for PathFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathFormula::Next(p) => write!(f, "X {p}"),
            PathFormula::Finally(p) => write!(f, "F {p}"),
            PathFormula::FinallyBounded(p, k) => write!(f, "F<={k} {p}"),
            PathFormula::Until(a, b) => write!(f, "{a} U {b}"),
            PathFormula::GloballyBounded(p, k) => write!(f, "G<={k} {p}"),
            PathFormula::Globally(p) => write!(f, "G {p}"),
            PathFormula::SteadyState => write!(f, "S"),
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.shield {
            ShieldAnnotation::None => {}
            ShieldAnnotation::PreSafety { gamma } => write!(f, "<PreSafety, gamma={gamma}> ")?,
            ShieldAnnotation::PostSafety { lambda } => {
                write!(f, "<PostSafety, lambda={lambda}> ")?
            }
            ShieldAnnotation::Optimal => write!(f, "<Optimal> ")?,
        }
        write!(f, "<<{}>> ", self.coalition_names.join(","))?;
        match (self.quantifier, &self.reward_name) {
            (Quantifier::Pmax, _) => write!(f, "Pmax")?,
            (Quantifier::Pmin, _) => write!(f, "Pmin")?,
            (q, Some(name)) => write!(
                f,
                "R{{{name:?}}}{}",
                if q == Quantifier::Rmax { "max" } else { "min" }
            )?,
            _ => unreachable!("reward quantifier without a name"),
        }
        write!(f, "=? [ {} ]", self.path)
    }
}

/// Property with names resolved against a game: coalition as player ids,
/// state formulas as per-state boolean vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundProperty {
    pub shield: ShieldAnnotation,
    pub coalition: Coalition,
    pub quantifier: Quantifier,
    pub reward_name: Option<String>,
    pub path: BoundPath,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundPath {
    Next(Vec<bool>),
    Finally(Vec<bool>),
    FinallyBounded(Vec<bool>, u32),
    Until(Vec<bool>, Vec<bool>),
    GloballyBounded(Vec<bool>, u32),
    Globally(Vec<bool>),
    SteadyState,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BindError {
    #[error("unknown player {0:?}")]
    UnknownPlayer(String),
    #[error("unknown label or variable {0:?}")]
    UnknownAtom(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("unknown reward structure {0:?}")]
    UnknownReward(String),
}

impl Property {
    pub fn bind(&self, game: &StochasticGame) -> Result<BoundProperty, BindError> {
        let coalition = game
            .coalition(&self.coalition_names)
            .map_err(BindError::UnknownPlayer)?;
        if let Some(name) = &self.reward_name {
            if !game.reward_structures.contains_key(name) {
                return Err(BindError::UnknownReward(name.clone()));
            }
        }
        let path = match &self.path {
            PathFormula::Next(p) => BoundPath::Next(eval_formula(p, game)?),
            PathFormula::Finally(p) => BoundPath::Finally(eval_formula(p, game)?),
            PathFormula::FinallyBounded(p, k) => {
                BoundPath::FinallyBounded(eval_formula(p, game)?, *k)
            }
            PathFormula::Until(a, b) => {
                BoundPath::Until(eval_formula(a, game)?, eval_formula(b, game)?)
            }
            PathFormula::GloballyBounded(p, k) => {
                BoundPath::GloballyBounded(eval_formula(p, game)?, *k)
            }
            PathFormula::Globally(p) => BoundPath::Globally(eval_formula(p, game)?),
            PathFormula::SteadyState => BoundPath::SteadyState,
        };
        Ok(BoundProperty {
            shield: self.shield,
            coalition,
            quantifier: self.quantifier,
            reward_name: self.reward_name.clone(),
            path,
        })
    }
}

/// Evaluate a state formula over every state of the game. Labels that
/// appear nowhere are legal (empty set); variable comparisons require the
/// variable to exist.
pub fn eval_formula(
    formula: &StateFormula,
    game: &StochasticGame,
) -> Result<Vec<bool>, BindError> {
    game.states
        .iter()
        .map(|s| eval_at(formula, s, game))
        .collect()
}

fn eval_at(
    formula: &StateFormula,
    state: &crate::game::State,
    game: &StochasticGame,
) -> Result<bool, BindError> {
    match formula {
        StateFormula::True => Ok(true),
        StateFormula::False => Ok(false),
        // a label used nowhere evaluates to the empty set; the explicit
        // game cannot distinguish "declared but empty" from a typo, so
        // unknown labels are legal (unknown variables are not)
        StateFormula::Label(name) => Ok(state.labels.contains(name)),
        StateFormula::Cmp(name, op, v) => {
            let value = state
                .valuation
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, x)| *x)
                .ok_or_else(|| BindError::UnknownVariable(name.clone()))?;
            Ok(op.apply(value, *v))
        }
        StateFormula::Not(e) => Ok(!eval_at(e, state, game)?),
        StateFormula::And(a, b) => Ok(eval_at(a, state, game)? && eval_at(b, state, game)?),
        StateFormula::Or(a, b) => Ok(eval_at(a, state, game)? || eval_at(b, state, game)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameBuilder;
    use proptest::prelude::*;

    #[test]
    fn parses_pre_safety_property() {
        let p = parse_property("<PreSafety, gamma=0.9> <<shield>> Pmax=? [ G<=14 !crash ]")
            .unwrap();
        assert_eq!(p.shield, ShieldAnnotation::PreSafety { gamma: 0.9 });
        assert_eq!(p.coalition_names, vec!["shield"]);
        assert_eq!(p.quantifier, Quantifier::Pmax);
        assert_eq!(
            p.path,
            PathFormula::GloballyBounded(
                StateFormula::Not(Box::new(StateFormula::Label("crash".into()))),
                14
            )
        );
    }

    #[test]
    fn parses_steady_state_reward_property() {
        let p = parse_property("<<defender>> R{\"infections\"}min=? [ S ]").unwrap();
        assert_eq!(p.shield, ShieldAnnotation::None);
        assert_eq!(p.quantifier, Quantifier::Rmin);
        assert_eq!(p.reward_name.as_deref(), Some("infections"));
        assert_eq!(p.path, PathFormula::SteadyState);
    }

    #[test]
    fn parses_coalition_list_and_until() {
        let p = parse_property("<<p1,p2>> Pmax=? [ x<3 U \"goal\" ]").unwrap();
        assert_eq!(p.coalition_names, vec!["p1", "p2"]);
        assert_eq!(
            p.path,
            PathFormula::Until(
                StateFormula::Cmp("x".into(), CmpOp::Lt, 3),
                StateFormula::Label("goal".into())
            )
        );
    }

    #[test]
    fn lambda_out_of_range_rejected() {
        let err = parse_property("<PostSafety, lambda=1.5> <<s>> Pmax=? [ G<=5 ok ]")
            .unwrap_err();
        assert!(err.message.contains("lambda out of range"), "{err}");
    }

    #[test]
    fn shield_annotations_demand_bounded_globally() {
        for path in ["F done", "X done", "G done", "done U done", "F<=3 done"] {
            let text = format!("<PreSafety, gamma=0.5> <<s>> Pmax=? [ {path} ]");
            assert!(parse_property(&text).is_err(), "accepted {path}");
        }
        assert!(
            parse_property("<Optimal> <<s>> Pmax=? [ G<=5 ok ]").is_err(),
            "Optimal must require R ... [ S ]"
        );
        assert!(parse_property("<Optimal> <<s>> R{\"r\"}min=? [ S ]").is_ok());
    }

    #[test]
    fn reward_and_path_quantifiers_do_not_mix() {
        assert!(parse_property("<<s>> Pmax=? [ S ]").is_err());
        assert!(parse_property("<<s>> R{\"r\"}max=? [ F done ]").is_err());
    }

    fn fixture() -> StochasticGame {
        let mut b = GameBuilder::new(&["p1", "p2"]);
        for i in 0..5 {
            let s = b.add_state(0, if i < 3 { &["crash"] } else { &[] });
            b.set_valuation(s, &[("x", i as i64)]);
            b.add_choice(s, "a", &[(s, 1.0)]);
        }
        b.build()
    }

    #[test]
    fn bind_evaluates_state_sets() {
        let game = fixture();
        let p = parse_property("<PreSafety, gamma=0.9> <<p1>> Pmax=? [ G<=3 !\"crash\" ]")
            .unwrap();
        let bound = p.bind(&game).unwrap();
        assert_eq!(bound.coalition, Coalition::new([0]));
        match bound.path {
            BoundPath::GloballyBounded(safe, 3) => {
                assert_eq!(safe, vec![false, false, false, true, true]);
            }
            other => panic!("unexpected path {other:?}"),
        }
    }

    #[test]
    fn bind_reports_unknown_names() {
        let game = fixture();
        let unknown_player = parse_property("<<nobody>> Pmax=? [ F \"crash\" ]").unwrap();
        assert_eq!(
            unknown_player.bind(&game),
            Err(BindError::UnknownPlayer("nobody".into()))
        );
        let unknown_var = parse_property("<<p1>> Pmax=? [ F y=1 ]").unwrap();
        assert_eq!(
            unknown_var.bind(&game),
            Err(BindError::UnknownVariable("y".into()))
        );
        let unknown_reward = parse_property("<<p1>> R{\"r\"}max=? [ S ]").unwrap();
        assert_eq!(
            unknown_reward.bind(&game),
            Err(BindError::UnknownReward("r".into()))
        );
    }

    #[test]
    fn empty_label_set_is_legal() {
        let game = fixture();
        let p = parse_property("<<p1>> Pmax=? [ F \"target\" ]").unwrap();
        match p.bind(&game).unwrap().path {
            BoundPath::Finally(target) => assert!(target.iter().all(|t| !t)),
            other => panic!("unexpected path {other:?}"),
        }
    }

    fn formula_strategy() -> impl Strategy<Value = StateFormula> {
        let leaf = prop_oneof![
            Just(StateFormula::True),
            Just(StateFormula::False),
            prop_oneof!["[a-z][a-z0-9]{0,4}".prop_map(StateFormula::Label)],
            (
                "[a-z]{1,3}",
                prop_oneof![
                    Just(CmpOp::Eq),
                    Just(CmpOp::Ne),
                    Just(CmpOp::Lt),
                    Just(CmpOp::Le),
                    Just(CmpOp::Gt),
                    Just(CmpOp::Ge)
                ],
                -5i64..5
            )
                .prop_map(|(n, op, v)| StateFormula::Cmp(n, op, v)),
        ];
        leaf.prop_recursive(3, 16, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|f| StateFormula::Not(Box::new(f))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| StateFormula::And(Box::new(a), Box::new(b))),
                (inner.clone(), inner)
                    .prop_map(|(a, b)| StateFormula::Or(Box::new(a), Box::new(b))),
            ]
        })
    }

    fn property_strategy() -> impl Strategy<Value = Property> {
        let names = proptest::collection::vec("[a-z][a-z0-9]{0,4}", 1..3);
        let p_path = prop_oneof![
            formula_strategy().prop_map(PathFormula::Next),
            formula_strategy().prop_map(PathFormula::Finally),
            (formula_strategy(), 0u32..20).prop_map(|(f, k)| PathFormula::FinallyBounded(f, k)),
            (formula_strategy(), formula_strategy())
                .prop_map(|(a, b)| PathFormula::Until(a, b)),
            (formula_strategy(), 1u32..20).prop_map(|(f, k)| PathFormula::GloballyBounded(f, k)),
            formula_strategy().prop_map(PathFormula::Globally),
        ];
        let p_prop = (names.clone(), prop::bool::ANY, p_path, prop::option::of(0.0..=1.0f64))
            .prop_map(|(coalition_names, is_max, path, shield_level)| {
                let shield = match (shield_level, &path) {
                    (Some(level), PathFormula::GloballyBounded(..)) => {
                        // exercise both annotation kinds off the same draw
                        if is_max {
                            ShieldAnnotation::PreSafety { gamma: level }
                        } else {
                            ShieldAnnotation::PostSafety { lambda: level }
                        }
                    }
                    _ => ShieldAnnotation::None,
                };
                Property {
                    shield,
                    coalition_names,
                    quantifier: if is_max { Quantifier::Pmax } else { Quantifier::Pmin },
                    reward_name: None,
                    path,
                }
            });
        let r_prop = (names, prop::bool::ANY, "[a-z]{1,6}", prop::bool::ANY).prop_map(
            |(coalition_names, is_max, reward, optimal)| Property {
                shield: if optimal {
                    ShieldAnnotation::Optimal
                } else {
                    ShieldAnnotation::None
                },
                coalition_names,
                quantifier: if is_max { Quantifier::Rmax } else { Quantifier::Rmin },
                reward_name: Some(reward),
                path: PathFormula::SteadyState,
            },
        );
        prop_oneof![p_prop, r_prop]
    }

    proptest! {
        #[test]
        fn pretty_print_round_trips(p in property_strategy()) {
            let printed = p.to_string();
            let reparsed = parse_property(&printed)
                .unwrap_or_else(|e| panic!("failed to reparse {printed:?}: {e}"));
            prop_assert_eq!(reparsed, p);
        }
    }
}
