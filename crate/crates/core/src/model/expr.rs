//! Expression fragment shared by guards, updates, probabilities, rewards
//! and label definitions: integer arithmetic (+, -, *, min, max),
//! comparisons and boolean connectives. Double constants and division are
//! legal but meant for probability and reward positions.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    IntLit(i64),
    DoubleLit(f64),
    BoolLit(bool),
    Ident(String),
    Not(Box<Expr>),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// min(...) / max(...) with two or more arguments.
    MinMax(bool, Vec<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Int(i64),
    Double(f64),
    Bool(bool),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Double(_) => "double",
            Value::Bool(_) => "bool",
        }
    }

    pub fn as_bool(&self) -> Result<bool, EvalError> {
        match self {
            Value::Bool(b) => Ok(*b),
            other => Err(EvalError(format!("expected bool, got {}", other.type_name()))),
        }
    }

    pub fn as_int(&self) -> Result<i64, EvalError> {
        match self {
            Value::Int(i) => Ok(*i),
            other => Err(EvalError(format!("expected int, got {}", other.type_name()))),
        }
    }

    pub fn as_double(&self) -> Result<f64, EvalError> {
        match self {
            Value::Int(i) => Ok(*i as f64),
            Value::Double(d) => Ok(*d),
            other => Err(EvalError(format!(
                "expected numeric value, got {}",
                other.type_name()
            ))),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Double(d) => write!(f, "{d}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct EvalError(pub String);

impl Expr {
    pub fn eval<F>(&self, lookup: &F) -> Result<Value, EvalError>
    where
        F: Fn(&str) -> Option<Value>,
    {
        match self {
            Expr::IntLit(i) => Ok(Value::Int(*i)),
            Expr::DoubleLit(d) => Ok(Value::Double(*d)),
            Expr::BoolLit(b) => Ok(Value::Bool(*b)),
            Expr::Ident(name) => {
                lookup(name).ok_or_else(|| EvalError(format!("unknown identifier {name:?}")))
            }
            Expr::Not(e) => Ok(Value::Bool(!e.eval(lookup)?.as_bool()?)),
            Expr::Neg(e) => match e.eval(lookup)? {
                Value::Int(i) => Ok(Value::Int(-i)),
                Value::Double(d) => Ok(Value::Double(-d)),
                v => Err(EvalError(format!("cannot negate {}", v.type_name()))),
            },
            Expr::Binary(op, a, b) => eval_binary(*op, a.eval(lookup)?, b.eval(lookup)?),
            Expr::MinMax(is_max, args) => {
                let mut acc = args[0].eval(lookup)?;
                for arg in &args[1..] {
                    let v = arg.eval(lookup)?;
                    acc = match (acc, v) {
                        (Value::Int(x), Value::Int(y)) => {
                            Value::Int(if *is_max { x.max(y) } else { x.min(y) })
                        }
                        (x, y) => {
                            let (x, y) = (x.as_double()?, y.as_double()?);
                            Value::Double(if *is_max { x.max(y) } else { x.min(y) })
                        }
                    };
                }
                Ok(acc)
            }
        }
    }
}

fn eval_binary(op: BinOp, a: Value, b: Value) -> Result<Value, EvalError> {
    use BinOp::*;
    match op {
        And => Ok(Value::Bool(a.as_bool()? && b.as_bool()?)),
        Or => Ok(Value::Bool(a.as_bool()? || b.as_bool()?)),
        Add | Sub | Mul | Div => match (a, b) {
            (Value::Int(x), Value::Int(y)) if op != Div => Ok(Value::Int(match op {
                Add => x + y,
                Sub => x - y,
                Mul => x * y,
                _ => unreachable!(),
            })),
            (a, b) => {
                let (x, y) = (a.as_double()?, b.as_double()?);
                Ok(Value::Double(match op {
                    Add => x + y,
                    Sub => x - y,
                    Mul => x * y,
                    Div => x / y,
                    _ => unreachable!(),
                }))
            }
        },
        Eq | Ne | Lt | Le | Gt | Ge => {
            if let (Value::Bool(x), Value::Bool(y)) = (a, b) {
                return match op {
                    Eq => Ok(Value::Bool(x == y)),
                    Ne => Ok(Value::Bool(x != y)),
                    _ => Err(EvalError("cannot order booleans".into())),
                };
            }
            let (x, y) = (a.as_double()?, b.as_double()?);
            Ok(Value::Bool(match op {
                Eq => x == y,
                Ne => x != y,
                Lt => x < y,
                Le => x <= y,
                Gt => x > y,
                Ge => x >= y,
                _ => unreachable!(),
            }))
        }
    }
}
