//! Recursive-descent parser for the modeling language.

use std::collections::HashSet;

use super::expr::{BinOp, Expr};
use super::lexer::{tokenize, SyntaxError, Tok, Token};
use super::{
    Command, ConstDecl, ConstType, LabelDef, ModelAst, Module, PlayerBlock, RewardBlock,
    RewardItem, Update, VarDecl,
};

pub fn parse_model(text: &str) -> Result<ModelAst, SyntaxError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        command_counter: 0,
    };
    let ast = p.program()?;
    check_identifiers(&ast)?;
    Ok(ast)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    command_counter: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        (self.tokens[self.pos].line, self.tokens[self.pos].col)
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        let (line, col) = self.here();
        SyntaxError {
            line,
            col,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected `{tok}`, found `{}`", self.peek())))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), SyntaxError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            other => Err(self.error(format!("expected `{kw}`, found `{other}`"))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found `{other}`"))),
        }
    }

    fn string(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected quoted name, found `{other}`"))),
        }
    }

    fn program(&mut self) -> Result<ModelAst, SyntaxError> {
        self.keyword("smg")?;
        let mut ast = ModelAst {
            constants: Vec::new(),
            modules: Vec::new(),
            players: Vec::new(),
            rewards: Vec::new(),
            labels: Vec::new(),
        };
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Ident(kw) => match kw.as_str() {
                    "const" => ast.constants.push(self.const_decl()?),
                    "module" => ast.modules.push(self.module()?),
                    "player" => ast.players.push(self.player_block()?),
                    "rewards" => ast.rewards.push(self.rewards_block()?),
                    "label" => ast.labels.push(self.label_def()?),
                    other => return Err(self.error(format!("unexpected `{other}`"))),
                },
                other => return Err(self.error(format!("unexpected `{other}`"))),
            }
        }
        Ok(ast)
    }

    fn const_decl(&mut self) -> Result<ConstDecl, SyntaxError> {
        self.keyword("const")?;
        let ctype = if self.at_keyword("int") {
            self.bump();
            ConstType::Int
        } else if self.at_keyword("double") {
            self.bump();
            ConstType::Double
        } else if self.at_keyword("bool") {
            self.bump();
            ConstType::Bool
        } else {
            ConstType::Int
        };
        let name = self.ident()?;
        let value = if *self.peek() == Tok::Eq {
            self.bump();
            Some(self.expr()?)
        } else {
            None
        };
        self.expect(Tok::Semi)?;
        Ok(ConstDecl { name, ctype, value })
    }

    fn module(&mut self) -> Result<Module, SyntaxError> {
        self.keyword("module")?;
        let name = self.ident()?;
        let mut variables = Vec::new();
        let mut commands = Vec::new();
        loop {
            if self.at_keyword("endmodule") {
                self.bump();
                break;
            }
            if *self.peek() == Tok::LBracket {
                commands.push(self.command()?);
            } else {
                variables.push(self.var_decl()?);
            }
        }
        Ok(Module {
            name,
            variables,
            commands,
        })
    }

    fn var_decl(&mut self) -> Result<VarDecl, SyntaxError> {
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        self.expect(Tok::LBracket)?;
        let low = self.expr()?;
        self.expect(Tok::DotDot)?;
        let high = self.expr()?;
        self.expect(Tok::RBracket)?;
        self.keyword("init")?;
        let init = self.expr()?;
        self.expect(Tok::Semi)?;
        Ok(VarDecl {
            name,
            low,
            high,
            init,
        })
    }

    fn command(&mut self) -> Result<Command, SyntaxError> {
        let line = self.here().0;
        self.expect(Tok::LBracket)?;
        let action = if *self.peek() == Tok::RBracket {
            None
        } else {
            Some(self.ident()?)
        };
        self.expect(Tok::RBracket)?;
        let guard = self.expr()?;
        self.expect(Tok::Arrow)?;
        let mut updates = vec![self.update()?];
        while *self.peek() == Tok::Plus {
            self.bump();
            updates.push(self.update()?);
        }
        self.expect(Tok::Semi)?;
        let position = self.command_counter;
        self.command_counter += 1;
        Ok(Command {
            action,
            guard,
            updates,
            position,
            line,
        })
    }

    /// `expr : (x'=e)&(y'=e)` or just the assignment list (probability 1);
    /// `true` stands for the empty assignment list.
    fn update(&mut self) -> Result<Update, SyntaxError> {
        // an update has an explicit probability iff a `:` follows the first
        // expression; assignment lists always start with `(` or `true`
        let prob = if *self.peek() == Tok::LParen || self.at_keyword("true") {
            None
        } else {
            let e = self.expr()?;
            self.expect(Tok::Colon)?;
            Some(e)
        };
        // a parenthesized probability like `(1-p) : ...` parses as an
        // expression; disambiguate by checking for the prime inside
        if prob.is_none() && *self.peek() == Tok::LParen && !self.assignment_follows() {
            let e = self.expr()?;
            self.expect(Tok::Colon)?;
            let assigns = self.assignments()?;
            return Ok(Update {
                prob: Some(e),
                assigns,
            });
        }
        let assigns = self.assignments()?;
        Ok(Update { prob, assigns })
    }

    /// Look ahead for `(ident'` which starts an assignment.
    fn assignment_follows(&self) -> bool {
        matches!(
            (
                &self.tokens[self.pos].tok,
                self.tokens.get(self.pos + 1).map(|t| &t.tok),
                self.tokens.get(self.pos + 2).map(|t| &t.tok),
            ),
            (Tok::LParen, Some(Tok::Ident(_)), Some(Tok::Prime))
        )
    }

    fn assignments(&mut self) -> Result<Vec<(String, Expr)>, SyntaxError> {
        if self.at_keyword("true") {
            self.bump();
            return Ok(Vec::new());
        }
        let mut out = vec![self.assignment()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            out.push(self.assignment()?);
        }
        Ok(out)
    }

    fn assignment(&mut self) -> Result<(String, Expr), SyntaxError> {
        self.expect(Tok::LParen)?;
        let name = self.ident()?;
        self.expect(Tok::Prime)?;
        self.expect(Tok::Eq)?;
        let value = self.expr()?;
        self.expect(Tok::RParen)?;
        Ok((name, value))
    }

    fn player_block(&mut self) -> Result<PlayerBlock, SyntaxError> {
        self.keyword("player")?;
        let name = self.ident()?;
        let mut modules = Vec::new();
        let mut actions = Vec::new();
        loop {
            if *self.peek() == Tok::LBracket {
                self.bump();
                actions.push(self.ident()?);
                self.expect(Tok::RBracket)?;
            } else {
                modules.push(self.ident()?);
            }
            if *self.peek() == Tok::Comma {
                self.bump();
                continue;
            }
            self.keyword("endplayer")?;
            break;
        }
        Ok(PlayerBlock {
            name,
            modules,
            actions,
        })
    }

    fn rewards_block(&mut self) -> Result<RewardBlock, SyntaxError> {
        self.keyword("rewards")?;
        let name = self.string()?;
        let mut items = Vec::new();
        loop {
            if self.at_keyword("endrewards") {
                self.bump();
                break;
            }
            let action = if *self.peek() == Tok::LBracket {
                self.bump();
                let a = self.ident()?;
                self.expect(Tok::RBracket)?;
                Some(a)
            } else {
                None
            };
            let guard = self.expr()?;
            self.expect(Tok::Colon)?;
            let value = self.expr()?;
            self.expect(Tok::Semi)?;
            items.push(RewardItem {
                action,
                guard,
                value,
            });
        }
        Ok(RewardBlock { name, items })
    }

    fn label_def(&mut self) -> Result<LabelDef, SyntaxError> {
        self.keyword("label")?;
        let name = self.string()?;
        self.expect(Tok::Eq)?;
        let value = self.expr()?;
        self.expect(Tok::Semi)?;
        Ok(LabelDef { name, value })
    }

    // expression grammar, lowest precedence first:
    // or < and < comparison < additive < multiplicative < unary < atom
    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.and_expr()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.and_expr()?;
            lhs = Expr::Binary(BinOp::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.cmp_expr()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.cmp_expr()?;
            lhs = Expr::Binary(BinOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn cmp_expr(&mut self) -> Result<Expr, SyntaxError> {
        let lhs = self.add_expr()?;
        let op = match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Neq => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.add_expr()?;
        Ok(Expr::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    fn add_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.mul_expr()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn mul_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary_expr()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary_expr(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Expr::Not(Box::new(self.unary_expr()?)))
            }
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary_expr()?)))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(Expr::IntLit(i))
            }
            Tok::Double(d) => {
                self.bump();
                Ok(Expr::DoubleLit(d))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "true" => {
                    self.bump();
                    Ok(Expr::BoolLit(true))
                }
                "false" => {
                    self.bump();
                    Ok(Expr::BoolLit(false))
                }
                "min" | "max" => {
                    let is_max = name == "max";
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let mut args = vec![self.expr()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen)?;
                    if args.len() < 2 {
                        return Err(self.error("min/max need at least two arguments"));
                    }
                    Ok(Expr::MinMax(is_max, args))
                }
                _ => {
                    self.bump();
                    Ok(Expr::Ident(name))
                }
            },
            other => Err(self.error(format!("expected expression, found `{other}`"))),
        }
    }
}

/// Static identifier checks: unique constants, variable names unique across
/// modules, updates assign only declared variables.
fn check_identifiers(ast: &ModelAst) -> Result<(), SyntaxError> {
    let dup = |what: &str, name: &str| SyntaxError {
        line: 0,
        col: 0,
        message: format!("duplicate {what} {name:?}"),
    };
    let mut consts = HashSet::new();
    for c in &ast.constants {
        if !consts.insert(c.name.as_str()) {
            return Err(dup("constant", &c.name));
        }
    }
    let mut vars = HashSet::new();
    for m in &ast.modules {
        for v in &m.variables {
            if consts.contains(v.name.as_str()) || !vars.insert(v.name.as_str()) {
                return Err(dup("variable", &v.name));
            }
        }
    }
    for m in &ast.modules {
        for cmd in &m.commands {
            for u in &cmd.updates {
                for (name, _) in &u.assigns {
                    if !vars.contains(name.as_str()) {
                        return Err(SyntaxError {
                            line: cmd.line,
                            col: 0,
                            message: format!("update assigns undeclared variable {name:?}"),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}
