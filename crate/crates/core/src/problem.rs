//! The Cauchy problem `D_y u + F(x, y, u, D_x u) = 0`, `u(x, 0) = f(x)`.

use std::sync::Arc;

use crate::error::Result;
use crate::expr::{Env, Expr, Var, VarSet};
use crate::geometry::Domain;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Problem<T> {
    pub flux: Arc<Expr>,
    pub initial: Arc<Expr>,
    /// Symbolic derivative of the initial datum.
    pub initial_prime: Arc<Expr>,
    pub domain: Domain<T>,
}

impl<T: Scalar> Problem<T> {
    /// Parses `F` over `{x, y, u, p}` and `f` over `{x}`, and differentiates `f`.
    pub fn parse(flux: &str, initial: &str, domain: Domain<T>) -> Result<Self> {
        let flux = Expr::parse(flux, VarSet::FLUX)?;
        let initial = Expr::parse(initial, VarSet::INITIAL)?;
        Self::new(flux, initial, domain)
    }

    pub fn new(flux: Expr, initial: Expr, domain: Domain<T>) -> Result<Self> {
        let initial_prime = initial.differentiate(Var::X)?;
        Ok(Self {
            flux: Arc::new(flux),
            initial: Arc::new(initial),
            initial_prime: Arc::new(initial_prime),
            domain,
        })
    }

    pub fn f(&self, x: T) -> Result<T> {
        Ok(self.initial.eval(&Env::at_x(x))?)
    }

    pub fn f_prime(&self, x: T) -> Result<T> {
        Ok(self.initial_prime.eval(&Env::at_x(x))?)
    }

    pub fn flux_at(&self, x: T, y: T, u: T, p: T) -> Result<T> {
        Ok(self.flux.eval(&Env::new(x, y, u, p))?)
    }
}
