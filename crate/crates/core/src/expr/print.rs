use std::fmt;

use super::{BinaryOp, Expr, UnaryOp};

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Const(c) if *c < 0.0 || c.is_sign_negative() => PREC_NEG,
        Expr::Const(_) | Expr::Var(_) => PREC_ATOM,
        Expr::Unary(UnaryOp::Neg, _) => PREC_NEG,
        Expr::Unary(..) => PREC_ATOM,
        Expr::Binary(op, ..) => match op {
            BinaryOp::Add | BinaryOp::Sub => PREC_ADD,
            BinaryOp::Mul | BinaryOp::Div => PREC_MUL,
            BinaryOp::Pow => PREC_POW,
        },
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the minimal parenthesisation that re-parses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    // only produced by simplification, never by the parser
                    write!(f, "-{}", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Unary(UnaryOp::Neg, e) => {
                f.write_str("-")?;
                write_child(f, e, prec(e) < PREC_NEG)
            }
            Expr::Unary(op, e) => write!(f, "{}({e})", op.name()),
            Expr::Binary(op, l, r) => {
                let p = prec(self);
                let (lp, rp) = if *op == BinaryOp::Pow {
                    (prec(l) <= p, prec(r) < p)
                } else {
                    (prec(l) < p, prec(r) <= p)
                };
                write_child(f, l, lp)?;
                match op {
                    BinaryOp::Add | BinaryOp::Sub => write!(f, " {} ", op.symbol())?,
                    _ => f.write_str(op.symbol())?,
                }
                write_child(f, r, rp)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{Expr, VarSet};

    fn round(s: &str) -> String {
        Expr::parse(s, VarSet::FLUX).unwrap().to_string()
    }

    #[test]
    fn canonical_spacing() {
        assert_eq!(round("u*p-sin(x)"), "u*p - sin(x)");
        assert_eq!(round("x^2/4"), "x^2/4");
        assert_eq!(round("(x+y)*u"), "(x + y)*u");
        assert_eq!(round("x-(y-u)"), "x - (y - u)");
        assert_eq!(round("x+(y+u)"), "x + (y + u)");
        assert_eq!(round("(x^2)^3"), "(x^2)^3");
        assert_eq!(round("x^2^3"), "x^2^3");
        assert_eq!(round("(-x)^2"), "(-x)^2");
        assert_eq!(round("-(x*y)"), "-(x*y)");
        assert_eq!(round("x*-y"), "x*-y");
        assert_eq!(round("0.1 + 1e-7"), "0.1 + 0.0000001");
    }
}
