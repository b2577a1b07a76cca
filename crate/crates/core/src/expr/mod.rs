//! Problem-definition expression language.
//!
//! Users supply the flux `F(x, y, u, p)` (with `p` standing for `D_x u`) and
//! the initial datum `f(x)` as expressions in a small grammar:
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = atom [ "^" unary ] ;            (* right associative *)
//! atom    = number | var | func "(" expr ")" | "(" expr ")" ;
//! var     = "x" | "y" | "u" | "p" ;
//! func    = "sin" | "cos" | "exp" | "log" | "abs" | "sqrt" ;
//! number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! ```
//!
//! Exponents must be variable-free and evaluate to a non-negative integer.
//! Errors carry 0-based byte offsets into the source text.

mod diff;
mod eval;
mod parse;
mod print;

pub use diff::DiffError;
pub use eval::{Env, EvalError};
pub use parse::{ParseError, ParseErrorKind};

use std::fmt;

/// An expression variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    Y,
    U,
    P,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::X, Var::Y, Var::U, Var::P];

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::U => "u",
            Var::P => "p",
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        match s {
            "x" => Some(Var::X),
            "y" => Some(Var::Y),
            "u" => Some(Var::U),
            "p" => Some(Var::P),
            _ => None,
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A set of variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VarSet(u8);

impl VarSet {
    /// `{x, y, u, p}`: the flux arguments.
    pub const FLUX: VarSet = VarSet(0b1111);
    /// `{x}`: the initial datum argument.
    pub const INITIAL: VarSet = VarSet(0b0001);
    /// `{x, y, u}`: coefficients of a quasilinear flux.
    pub const COEFFICIENT: VarSet = VarSet(0b0111);

    pub fn empty() -> Self {
        VarSet(0)
    }

    pub fn contains(self, v: Var) -> bool {
        self.0 & v.bit() != 0
    }

    pub fn insert(&mut self, v: Var) {
        self.0 |= v.bit();
    }

    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

impl FromIterator<Var> for VarSet {
    fn from_iter<I: IntoIterator<Item = Var>>(iter: I) -> Self {
        let mut s = VarSet::empty();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    Sqrt,
}

impl UnaryOp {
    pub(crate) fn function(name: &str) -> Option<UnaryOp> {
        match name {
            "sin" => Some(UnaryOp::Sin),
            "cos" => Some(UnaryOp::Cos),
            "exp" => Some(UnaryOp::Exp),
            "log" => Some(UnaryOp::Log),
            "abs" => Some(UnaryOp::Abs),
            "sqrt" => Some(UnaryOp::Sqrt),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Abs => "abs",
            UnaryOp::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
        }
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Parses `text`, rejecting variables outside `allowed`.
    pub fn parse(text: &str, allowed: VarSet) -> Result<Expr, ParseError> {
        parse::parse(text, allowed)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn unary(op: UnaryOp, e: Expr) -> Expr {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinaryOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    /// The variables the expression references.
    pub fn vars(&self) -> VarSet {
        let mut s = VarSet::empty();
        self.collect_vars(&mut s);
        s
    }

    fn collect_vars(&self, s: &mut VarSet) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => s.insert(*v),
            Expr::Unary(_, e) => e.collect_vars(s),
            Expr::Binary(_, l, r) => {
                l.collect_vars(s);
                r.collect_vars(s);
            }
        }
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.vars().contains(v)
    }

    /// Value of a variable-free expression.
    pub fn const_value(&self) -> Option<f64> {
        if !self.vars().is_empty() {
            return None;
        }
        self.eval::<f64>(&Env::default()).ok()
    }
}
