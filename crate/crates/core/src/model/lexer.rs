//! Tokenizer for the modeling language. Tracks line/column for error
//! reporting; `//` comments run to end of line.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Double(f64),
    /// Double-quoted string (reward and label names).
    Str(String),
    LBracket,
    RBracket,
    LParen,
    RParen,
    Colon,
    Semi,
    Comma,
    Arrow,
    Prime,
    Amp,
    Pipe,
    Bang,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    DotDot,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Int(i) => write!(f, "{i}"),
            Tok::Double(d) => write!(f, "{d}"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::LBracket => write!(f, "["),
            Tok::RBracket => write!(f, "]"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::Colon => write!(f, ":"),
            Tok::Semi => write!(f, ";"),
            Tok::Comma => write!(f, ","),
            Tok::Arrow => write!(f, "->"),
            Tok::Prime => write!(f, "'"),
            Tok::Amp => write!(f, "&"),
            Tok::Pipe => write!(f, "|"),
            Tok::Bang => write!(f, "!"),
            Tok::Eq => write!(f, "="),
            Tok::Neq => write!(f, "!="),
            Tok::Lt => write!(f, "<"),
            Tok::Le => write!(f, "<="),
            Tok::Gt => write!(f, ">"),
            Tok::Ge => write!(f, ">="),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Star => write!(f, "*"),
            Tok::Slash => write!(f, "/"),
            Tok::DotDot => write!(f, ".."),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at {line}:{col}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let (mut line, mut col) = (1, 1);
    let err = |line: usize, col: usize, message: String| SyntaxError { line, col, message };

    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        let advance = |i: &mut usize, line: &mut usize, col: &mut usize| {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col);
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut line, &mut col);
            }
            let ident: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Ident(ident),
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col);
            }
            // `..` must not be swallowed as a fraction
            let is_double = chars.get(i) == Some(&'.') && chars.get(i + 1) != Some(&'.');
            if is_double {
                advance(&mut i, &mut line, &mut col);
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance(&mut i, &mut line, &mut col);
                }
            }
            let text: String = chars[start..i].iter().collect();
            let tok = if is_double {
                Tok::Double(
                    text.parse()
                        .map_err(|_| err(tline, tcol, format!("bad number {text:?}")))?,
                )
            } else {
                Tok::Int(
                    text.parse()
                        .map_err(|_| err(tline, tcol, format!("bad number {text:?}")))?,
                )
            };
            out.push(Token {
                tok,
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c == '"' {
            advance(&mut i, &mut line, &mut col);
            let start = i;
            while i < chars.len() && chars[i] != '"' {
                advance(&mut i, &mut line, &mut col);
            }
            if i == chars.len() {
                return Err(err(tline, tcol, "unterminated string".into()));
            }
            let s: String = chars[start..i].iter().collect();
            advance(&mut i, &mut line, &mut col);
            out.push(Token {
                tok: Tok::Str(s),
                line: tline,
                col: tcol,
            });
            continue;
        }
        let two = |a: char| chars.get(i + 1) == Some(&a);
        let (tok, len) = match c {
            '-' if two('>') => (Tok::Arrow, 2),
            '<' if two('=') => (Tok::Le, 2),
            '>' if two('=') => (Tok::Ge, 2),
            '!' if two('=') => (Tok::Neq, 2),
            '.' if two('.') => (Tok::DotDot, 2),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ':' => (Tok::Colon, 1),
            ';' => (Tok::Semi, 1),
            ',' => (Tok::Comma, 1),
            '\'' => (Tok::Prime, 1),
            '&' => (Tok::Amp, 1),
            '|' => (Tok::Pipe, 1),
            '!' => (Tok::Bang, 1),
            '=' => (Tok::Eq, 1),
            '<' => (Tok::Lt, 1),
            '>' => (Tok::Gt, 1),
            '+' => (Tok::Plus, 1),
            '-' => (Tok::Minus, 1),
            '*' => (Tok::Star, 1),
            '/' => (Tok::Slash, 1),
            other => return Err(err(tline, tcol, format!("unexpected character {other:?}"))),
        };
        for _ in 0..len {
            advance(&mut i, &mut line, &mut col);
        }
        out.push(Token {
            tok,
            line: tline,
            col: tcol,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
