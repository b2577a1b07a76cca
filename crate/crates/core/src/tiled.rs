//! Piecewise-C1 functions on a tiling: the concrete carrier of the solver's
//! approximations.
//!
//! A [`TiledFunction`] is smooth on the interior of every tile and is made
//! single-valued on the singular set (the union of interior tile edges) by
//! the lower-envelope rule: at a point shared by several tiles its value is
//! the minimum of the adjacent pieces' one-sided limits. This is the exact
//! pointwise result of regularizing the indicator-pasted function; see
//! [`crate::baire::interface_value`].

use std::sync::Arc;

use crate::baire::interface_value;
use crate::error::{Error, Result};
use crate::expr::{Env, Expr};
use crate::ext_real::ExtendedReal;
use crate::scalar::Scalar;
use crate::tiling::Tiling;

/// Monotone-safe cubic Hermite interpolant (Fritsch-Carlson slopes).
///
/// C1 on the node range and extended by the end cubics on either side.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermite<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Scalar> Hermite<T> {
    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n || !xs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "interpolant needs >= 2 strictly increasing nodes with matching values".into(),
            ));
        }
        let h: Vec<T> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let secant: Vec<T> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
        let mut slopes = vec![T::zero(); n];
        if n == 2 {
            slopes[0] = secant[0];
            slopes[1] = secant[0];
        } else {
            let two = T::lit(2.0);
            for k in 1..n - 1 {
                let (s0, s1) = (secant[k - 1], secant[k]);
                if s0 * s1 > T::zero() {
                    let w1 = two * h[k] + h[k - 1];
                    let w2 = h[k] + two * h[k - 1];
                    slopes[k] = (w1 + w2) / (w1 / s0 + w2 / s1);
                }
            }
            slopes[0] = end_slope(h[0], h[1], secant[0], secant[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], secant[n - 2], secant[n - 3]);
        }
        Ok(Self { xs, ys, slopes })
    }

    pub fn nodes(&self) -> &[T] {
        &self.xs
    }

    pub fn values(&self) -> &[T] {
        &self.ys
    }

    fn segment(&self, x: T) -> usize {
        let k = self.xs.partition_point(|&n| n <= x);
        k.clamp(1, self.xs.len() - 1) - 1
    }

    /// Value and derivative at `x`.
    pub fn eval(&self, x: T) -> (T, T) {
        let k = self.segment(x);
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let (y0, y1) = (self.ys[k], self.ys[k + 1]);
        let (d0, d1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        // power form about the left node: exact for constant data
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let jump = y1 - y0;
        let c2 = three * jump - two * d0 - d1;
        let c3 = d0 + d1 - two * jump;
        let value = if t == T::one() {
            y1
        } else {
            y0 + t * (d0 + t * (c2 + t * c3))
        };
        let deriv = (d0 + t * (two * c2 + three * t * c3)) / h;
        (value, deriv)
    }
}

/// Shape-preserving three-point end slope.
fn end_slope<T: Scalar>(h0: T, h1: T, s0: T, s1: T) -> T {
    let two = T::lit(2.0);
    let d = ((two * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if d * s0 <= T::zero() {
        T::zero()
    } else if s0 * s1 <= T::zero() && d.abs() > (T::lit(3.0) * s0).abs() {
        T::lit(3.0) * s0
    } else {
        d
    }
}

/// A smooth function on a neighbourhood of one tile.
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothPiece<T> {
    /// `u = c0 + c1 (x - x0) + c2 (y - y0)`.
    Affine { x0: T, y0: T, c0: T, c1: T, c2: T },
    /// `u = f(x) + g(x) y` with `g` interpolated, so `u(x, 0) = f(x)` exactly.
    Initial {
        f: Arc<Expr>,
        fprime: Arc<Expr>,
        g: Hermite<T>,
    },
}

impl<T: Scalar> SmoothPiece<T> {
    pub fn affine(x0: T, y0: T, c0: T, c1: T, c2: T) -> Self {
        SmoothPiece::Affine { x0, y0, c0, c1, c2 }
    }

    pub fn value(&self, x: T, y: T) -> Result<T> {
        Ok(match self {
            SmoothPiece::Affine { x0, y0, c0, c1, c2 } => *c0 + *c1 * (x - *x0) + *c2 * (y - *y0),
            SmoothPiece::Initial { f, g, .. } => {
                let fx = f.eval(&Env::at_x(x))?;
                fx + g.eval(x).0 * y
            }
        })
    }

    /// `(D_x u, D_y u)` in closed form.
    pub fn partials(&self, x: T, y: T) -> Result<(T, T)> {
        Ok(match self {
            SmoothPiece::Affine { c1, c2, .. } => (*c1, *c2),
            SmoothPiece::Initial { fprime, g, .. } => {
                let (gx, dgx) = g.eval(x);
                (fprime.eval(&Env::at_x(x))? + dgx * y, gx)
            }
        })
    }

    /// Residual `D_y u + F(x, y, u, D_x u)` of this piece at a point.
    pub fn residual(&self, flux: &Expr, x: T, y: T) -> Result<T> {
        let u = self.value(x, y)?;
        let (ux, uy) = self.partials(x, y)?;
        Ok(uy + flux.eval(&Env::new(x, y, u, ux))?)
    }
}

/// Piecewise-C1 function on a tiling, single-valued on the singular set.
#[derive(Debug, Clone, PartialEq)]
pub struct TiledFunction<T> {
    tiling: Tiling<T>,
    pieces: Vec<SmoothPiece<T>>,
}

impl<T: Scalar> TiledFunction<T> {
    pub fn new(tiling: Tiling<T>, pieces: Vec<SmoothPiece<T>>) -> Result<Self> {
        if pieces.len() != tiling.len() {
            return Err(Error::PieceCountMismatch {
                pieces: pieces.len(),
                tiles: tiling.len(),
            });
        }
        Ok(Self { tiling, pieces })
    }

    pub fn tiling(&self) -> &Tiling<T> {
        &self.tiling
    }

    pub fn pieces(&self) -> &[SmoothPiece<T>] {
        &self.pieces
    }

    /// Tiles owning the point; more than one on the singular set.
    pub(crate) fn owners(&self, x: T, y: T) -> Result<Vec<usize>> {
        self.tiling.domain().check_closed(x, y)?;
        let owners = self.tiling.containing(x, y);
        if owners.is_empty() {
            // only reachable for tilings that fail to cover the domain
            return Err(Error::OutsideDomain {
                x: x.to_f64_lossless(),
                y: y.to_f64_lossless(),
            });
        }
        Ok(owners)
    }

    /// Value at a point of the closed domain. On the singular set this is
    /// the minimum of the adjacent pieces' limits.
    pub fn evaluate(&self, x: T, y: T) -> Result<ExtendedReal<T>> {
        let owners = self.owners(x, y)?;
        if let [only] = owners[..] {
            return ExtendedReal::new(self.pieces[only].value(x, y)?);
        }
        let limits = owners
            .iter()
            .map(|&i| self.pieces[i].value(x, y))
            .collect::<Result<Vec<_>>>()?;
        ExtendedReal::new(interface_value(&limits)?)
    }

    /// Exact partials at a point off the singular set.
    pub fn partials(&self, x: T, y: T) -> Result<(T, T)> {
        let owners = self.owners(x, y)?;
        match owners[..] {
            [only] => self.pieces[only].partials(x, y),
            _ => Err(Error::SingularPoint {
                x: x.to_f64_lossless(),
                y: y.to_f64_lossless(),
            }),
        }
    }
}
