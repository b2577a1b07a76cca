use thiserror::Error;

use super::{BinaryOp, Expr, UnaryOp, Var};
use crate::scalar::Scalar;

/// Variable bindings for evaluation. Unused slots are ignored.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Env<T> {
    pub x: T,
    pub y: T,
    pub u: T,
    pub p: T,
}

impl<T: Scalar> Env<T> {
    pub fn new(x: T, y: T, u: T, p: T) -> Self {
        Self { x, y, u, p }
    }

    pub fn at_x(x: T) -> Self {
        Self::new(x, T::zero(), T::zero(), T::zero())
    }

    fn get(&self, v: Var) -> T {
        match v {
            Var::X => self.x,
            Var::Y => self.y,
            Var::U => self.u,
            Var::P => self.p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero in '{node}'")]
    DivisionByZero { node: String },
    #[error("log of a non-positive argument in '{node}'")]
    LogDomain { node: String },
    #[error("sqrt of a negative argument in '{node}'")]
    SqrtDomain { node: String },
}

impl Expr {
    /// Evaluates under IEEE arithmetic of the scalar type.
    pub fn eval<T: Scalar>(&self, env: &Env<T>) -> Result<T, EvalError> {
        Ok(match self {
            Expr::Const(c) => T::lit(*c),
            Expr::Var(v) => env.get(*v),
            Expr::Unary(op, e) => {
                let a = e.eval(env)?;
                match op {
                    UnaryOp::Neg => -a,
                    UnaryOp::Sin => a.sin(),
                    UnaryOp::Cos => a.cos(),
                    UnaryOp::Exp => a.exp(),
                    UnaryOp::Abs => a.abs(),
                    UnaryOp::Log => {
                        if !(a > T::zero()) {
                            return Err(EvalError::LogDomain { node: self.to_string() });
                        }
                        a.ln()
                    }
                    UnaryOp::Sqrt => {
                        if a < T::zero() {
                            return Err(EvalError::SqrtDomain { node: self.to_string() });
                        }
                        a.sqrt()
                    }
                }
            }
            Expr::Binary(op, l, r) => {
                let a = l.eval(env)?;
                match op {
                    BinaryOp::Pow => {
                        // exponent is a validated non-negative integer constant
                        let n = r.eval::<f64>(&Env::default())?;
                        a.powi(n as i32)
                    }
                    _ => {
                        let b = r.eval(env)?;
                        match op {
                            BinaryOp::Add => a + b,
                            BinaryOp::Sub => a - b,
                            BinaryOp::Mul => a * b,
                            BinaryOp::Div => {
                                if b == T::zero() {
                                    return Err(EvalError::DivisionByZero { node: self.to_string() });
                                }
                                a / b
                            }
                            BinaryOp::Pow => unreachable!(),
                        }
                    }
                }
            }
        })
    }
}
