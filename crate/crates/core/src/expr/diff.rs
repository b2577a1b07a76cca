use thiserror::Error;

use super::{BinaryOp, Expr, UnaryOp, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("'{primitive}' is not differentiable in '{node}'")]
    NonDifferentiable { primitive: &'static str, node: String },
}

// Smart constructors doing 0/1 elimination and constant folding.

fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (Expr::Const(z), _) if *z == 0.0 => b,
        (_, Expr::Const(z)) if *z == 0.0 => a,
        _ => Expr::binary(BinaryOp::Add, a, b),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        (_, Expr::Const(z)) if *z == 0.0 => a,
        (Expr::Const(z), _) if *z == 0.0 => neg(b),
        _ => Expr::binary(BinaryOp::Sub, a, b),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (Expr::Const(z), _) | (_, Expr::Const(z)) if *z == 0.0 => Expr::Const(0.0),
        (Expr::Const(o), _) if *o == 1.0 => b,
        (_, Expr::Const(o)) if *o == 1.0 => a,
        _ => Expr::binary(BinaryOp::Mul, a, b),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) if *y != 0.0 => Expr::Const(x / y),
        (_, Expr::Const(o)) if *o == 1.0 => a,
        (Expr::Const(z), _) if *z == 0.0 => Expr::Const(0.0),
        _ => Expr::binary(BinaryOp::Div, a, b),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(x) => Expr::Const(-x),
        Expr::Unary(UnaryOp::Neg, inner) => *inner,
        _ => Expr::unary(UnaryOp::Neg, a),
    }
}

fn powi(base: Expr, n: f64) -> Expr {
    if n == 0.0 {
        Expr::Const(1.0)
    } else if n == 1.0 {
        base
    } else if let Expr::Const(c) = base {
        Expr::Const(c.powi(n as i32))
    } else {
        Expr::binary(BinaryOp::Pow, base, Expr::Const(n))
    }
}

impl Expr {
    /// Symbolic partial derivative with respect to `var`.
    ///
    /// `abs` is rejected when its argument depends on `var`.
    pub fn differentiate(&self, var: Var) -> Result<Expr, DiffError> {
        if !self.depends_on(var) {
            return Ok(Expr::Const(0.0));
        }
        Ok(match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(v) => Expr::Const(if *v == var { 1.0 } else { 0.0 }),
            Expr::Unary(op, e) => {
                let de = e.differentiate(var)?;
                let a = (**e).clone();
                match op {
                    UnaryOp::Neg => neg(de),
                    UnaryOp::Sin => mul(Expr::unary(UnaryOp::Cos, a), de),
                    UnaryOp::Cos => mul(neg(Expr::unary(UnaryOp::Sin, a)), de),
                    UnaryOp::Exp => mul(Expr::unary(UnaryOp::Exp, a), de),
                    UnaryOp::Log => div(de, a),
                    UnaryOp::Sqrt => div(de, mul(Expr::Const(2.0), Expr::unary(UnaryOp::Sqrt, a))),
                    UnaryOp::Abs => {
                        return Err(DiffError::NonDifferentiable {
                            primitive: "abs",
                            node: self.to_string(),
                        })
                    }
                }
            }
            Expr::Binary(op, l, r) => {
                let (a, b) = ((**l).clone(), (**r).clone());
                match op {
                    BinaryOp::Add => add(l.differentiate(var)?, r.differentiate(var)?),
                    BinaryOp::Sub => sub(l.differentiate(var)?, r.differentiate(var)?),
                    BinaryOp::Mul => add(mul(l.differentiate(var)?, b), mul(a, r.differentiate(var)?)),
                    BinaryOp::Div if !r.depends_on(var) => div(l.differentiate(var)?, b),
                    BinaryOp::Div => {
                        let num = sub(mul(l.differentiate(var)?, b.clone()), mul(a, r.differentiate(var)?));
                        div(num, powi(b, 2.0))
                    }
                    BinaryOp::Pow => {
                        let n = r.const_value().unwrap_or(0.0);
                        mul(mul(Expr::Const(n), powi(a, n - 1.0)), l.differentiate(var)?)
                    }
                }
            }
        })
    }
}
