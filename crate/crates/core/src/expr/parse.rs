use thiserror::Error;

use super::{BinaryOp, Expr, UnaryOp, Var, VarSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    UnknownIdentifier(String),
    DisallowedVariable(String),
    /// A function applied to the wrong number of arguments.
    Arity {
        function: String,
        found: usize,
    },
    /// Exponent is not a variable-free non-negative integer.
    BadExponent(String),
    BadNumber(String),
}

/// Syntax error with a 0-based byte offset into the source.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at offset {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
    message: String,
}

impl ParseError {
    fn new(kind: ParseErrorKind, offset: usize) -> Self {
        let message = match &kind {
            ParseErrorKind::UnexpectedChar(c) => format!("unexpected character '{c}'"),
            ParseErrorKind::UnexpectedToken(t) => format!("unexpected token '{t}'"),
            ParseErrorKind::UnexpectedEnd => "unexpected end of input".to_string(),
            ParseErrorKind::UnknownIdentifier(s) => format!("unknown identifier '{s}'"),
            ParseErrorKind::DisallowedVariable(s) => {
                format!("variable '{s}' is not allowed here")
            }
            ParseErrorKind::Arity { function, found } => {
                format!("function '{function}' takes 1 argument, found {found}")
            }
            ParseErrorKind::BadExponent(s) => {
                format!("exponent must be a constant non-negative integer, found '{s}'")
            }
            ParseErrorKind::BadNumber(s) => format!("malformed number '{s}'"),
        };
        Self { kind, offset, message }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Num(v) => v.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Op(c) => c.to_string(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut k = i + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    i = k;
                }
            }
            let s = &text[start..i];
            let v: f64 = s
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| ParseError::new(ParseErrorKind::BadNumber(s.into()), start))?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if b"+-*/^(),".contains(&c) {
            out.push((Tok::Op(c as char), i));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(ParseError::new(ParseErrorKind::UnexpectedChar(ch), i));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    allowed: VarSet,
    text: &'a str,
}

pub(super) fn parse(text: &str, allowed: VarSet) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        allowed,
        text,
    };
    let e = p.expr()?;
    if let Some((t, off)) = p.peek() {
        return Err(ParseError::new(ParseErrorKind::UnexpectedToken(t.text()), off));
    }
    Ok(e)
}

impl Parser<'_> {
    fn peek(&self) -> Option<(Tok, usize)> {
        self.toks.get(self.pos).cloned()
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn eat_op(&mut self, c: char) -> bool {
        if matches!(self.toks.get(self.pos), Some((Tok::Op(o), _)) if *o == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_op(c) {
            return Ok(());
        }
        Err(match self.peek() {
            Some((t, off)) => ParseError::new(ParseErrorKind::UnexpectedToken(t.text()), off),
            None => ParseError::new(ParseErrorKind::UnexpectedEnd, self.end),
        })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat_op('+') {
                BinaryOp::Add
            } else if self.eat_op('-') {
                BinaryOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat_op('*') {
                BinaryOp::Mul
            } else if self.eat_op('/') {
                BinaryOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op('-') {
            let e = self.unary()?;
            return Ok(Expr::unary(UnaryOp::Neg, e));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat_op('^') {
            return Ok(base);
        }
        let start = self.offset();
        let exp = self.unary()?;
        let stop = self.toks.get(self.pos).map_or(self.end, |t| t.1);
        let ok = exp
            .const_value()
            .is_some_and(|n| n >= 0.0 && n.fract() == 0.0 && n <= i32::MAX as f64);
        if !ok {
            let src = self.text[start..stop].trim().to_string();
            return Err(ParseError::new(ParseErrorKind::BadExponent(src), start));
        }
        Ok(Expr::binary(BinaryOp::Pow, base, exp))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let Some((tok, off)) = self.peek() else {
            return Err(ParseError::new(ParseErrorKind::UnexpectedEnd, self.end));
        };
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(v) = Var::from_name(&name) {
                    if !self.allowed.contains(v) {
                        return Err(ParseError::new(ParseErrorKind::DisallowedVariable(name), off));
                    }
                    return Ok(Expr::Var(v));
                }
                let Some(op) = UnaryOp::function(&name) else {
                    let called = matches!(self.peek(), Some((Tok::Op('('), _)));
                    let kind = if called {
                        ParseErrorKind::UnknownIdentifier(name)
                    } else {
                        ParseErrorKind::DisallowedVariable(name)
                    };
                    return Err(ParseError::new(kind, off));
                };
                if !self.eat_op('(') {
                    return Err(ParseError::new(
                        ParseErrorKind::Arity {
                            function: name,
                            found: 0,
                        },
                        off,
                    ));
                }
                if self.eat_op(')') {
                    return Err(ParseError::new(
                        ParseErrorKind::Arity {
                            function: name,
                            found: 0,
                        },
                        off,
                    ));
                }
                let arg = self.expr()?;
                let mut found = 1;
                while self.eat_op(',') {
                    self.expr()?;
                    found += 1;
                }
                if found != 1 {
                    return Err(ParseError::new(ParseErrorKind::Arity { function: name, found }, off));
                }
                self.expect_op(')')?;
                Ok(Expr::unary(op, arg))
            }
            Tok::Op(c) => Err(ParseError::new(ParseErrorKind::UnexpectedToken(c.to_string()), off)),
        }
    }
}
