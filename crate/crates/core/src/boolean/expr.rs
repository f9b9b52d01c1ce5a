//! Text expressions over named variables.
//!
//! ```text
//! expr  := iff
//! iff   := impl ("<->" impl)*
//! impl  := or ("->" impl)?          right-associative
//! or    := xor ("|" xor)*
//! xor   := and ("^" and)*
//! and   := unary ("&" unary)*
//! unary := "!" unary | atom
//! atom  := "true" | "false" | IDENT | "(" expr ")"
//! ```

use std::fmt;

use super::{BoolError, BoolFunc, Variable, VariableSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(bool),
    Var(String),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Xor(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok<'a> {
    Not,
    And,
    Xor,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    True,
    False,
    Ident(&'a str),
    End,
}

impl fmt::Display for Tok<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Not => f.write_str("'!'"),
            Tok::And => f.write_str("'&'"),
            Tok::Xor => f.write_str("'^'"),
            Tok::Or => f.write_str("'|'"),
            Tok::Implies => f.write_str("'->'"),
            Tok::Iff => f.write_str("'<->'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::True => f.write_str("'true'"),
            Tok::False => f.write_str("'false'"),
            Tok::Ident(s) => write!(f, "identifier '{s}'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok<'_>, usize)>, BoolError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, message: String| BoolError::Syntax {
        column: text[..pos].chars().count() + 1,
        message,
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Tok::Not,
            b'&' => Tok::And,
            b'^' => Tok::Xor,
            b'|' => Tok::Or,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Implies
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 2;
                Tok::Iff
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                match &text[start..=i] {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    ident => Tok::Ident(ident),
                }
            }
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return Err(err(start, format!("unexpected character '{ch}'")));
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok<'a>, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Tok<'a> {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok<'a> {
        let t = self.toks[self.pos].0;
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: String) -> BoolError {
        let offset = self.toks[self.pos].1;
        BoolError::Syntax {
            column: self.text[..offset].chars().count() + 1,
            message,
        }
    }

    fn iff(&mut self) -> Result<Expr, BoolError> {
        let mut lhs = self.implication()?;
        while self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implication()?;
            lhs = Expr::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Expr, BoolError> {
        let lhs = self.binary(0)?;
        if self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Expr::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    /// Left-associative levels: 0 = `|`, 1 = `^`, 2 = `&`.
    fn binary(&mut self, level: u8) -> Result<Expr, BoolError> {
        if level == 3 {
            return self.unary();
        }
        let op = [Tok::Or, Tok::Xor, Tok::And][level as usize];
        let mut lhs = self.binary(level + 1)?;
        while self.peek() == op {
            self.bump();
            let rhs = Box::new(self.binary(level + 1)?);
            let l = Box::new(lhs);
            lhs = match level {
                0 => Expr::Or(l, rhs),
                1 => Expr::Xor(l, rhs),
                _ => Expr::And(l, rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, BoolError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Expr::Not(Box::new(self.unary()?)))
            }
            Tok::True => {
                self.bump();
                Ok(Expr::Const(true))
            }
            Tok::False => {
                self.bump();
                Ok(Expr::Const(false))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Expr::Var(name.to_string()))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.iff()?;
                if self.peek() != Tok::RParen {
                    return Err(self.error(format!("expected ')', found {}", self.peek())));
                }
                self.bump();
                Ok(inner)
            }
            t => Err(self.error(format!("expected an operand, found {t}"))),
        }
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, BoolError> {
        let toks = tokenize(text)?;
        let mut p = Parser { text, toks, pos: 0 };
        let e = p.iff()?;
        if p.peek() != Tok::End {
            return Err(p.error(format!("unexpected {}", p.peek())));
        }
        Ok(e)
    }

    /// Identifiers in order of first occurrence.
    pub fn identifiers(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            match e {
                Expr::Const(_) => {}
                Expr::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                Expr::Not(a) => walk(a, out),
                Expr::And(a, b)
                | Expr::Xor(a, b)
                | Expr::Or(a, b)
                | Expr::Implies(a, b)
                | Expr::Iff(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Evaluates the expression to a function over `scope`.
    pub fn to_func(&self, scope: &VariableSet) -> Result<BoolFunc, BoolError> {
        Ok(match self {
            Expr::Const(b) => BoolFunc::constant(scope, *b),
            Expr::Var(name) => {
                let var = Variable::new(name.as_str())?;
                if !scope.contains(&var) {
                    return Err(BoolError::UnknownIdentifier(name.clone()));
                }
                BoolFunc::literal(scope, &var)?
            }
            Expr::Not(a) => a.to_func(scope)?.not(),
            Expr::And(a, b) => a.to_func(scope)?.and(&b.to_func(scope)?),
            Expr::Xor(a, b) => a.to_func(scope)?.xor(&b.to_func(scope)?),
            Expr::Or(a, b) => a.to_func(scope)?.or(&b.to_func(scope)?),
            Expr::Implies(a, b) => a.to_func(scope)?.implies(&b.to_func(scope)?),
            Expr::Iff(a, b) => a.to_func(scope)?.iff(&b.to_func(scope)?),
        })
    }
}

/// Parses `text` and evaluates it over `scope`. Every identifier must belong
/// to `scope`.
pub fn parse_expr(text: &str, scope: &VariableSet) -> Result<BoolFunc, BoolError> {
    Expr::parse(text)?.to_func(scope)
}
