//! Rectangular domain and sampling grids.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The open rectangle `(-a, a) x (-b, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain<T> {
    a: T,
    b: T,
}

impl<T: Scalar> Domain<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !(a > T::zero() && b > T::zero() && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "domain half-widths must be positive and finite, got a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b })
    }

    /// Half-width in x.
    pub fn a(&self) -> T {
        self.a
    }

    /// Half-width in y.
    pub fn b(&self) -> T {
        self.b
    }

    pub fn area(&self) -> T {
        T::lit(4.0) * self.a * self.b
    }

    /// Whether `(x, y)` lies in the closure, up to the snap tolerance.
    pub fn contains_closed(&self, x: T, y: T) -> bool {
        let tol = T::snap_tol();
        x.abs() <= self.a + tol && y.abs() <= self.b + tol
    }

    pub(crate) fn check_closed(&self, x: T, y: T) -> Result<()> {
        if self.contains_closed(x, y) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                x: x.to_f64_lossless(),
                y: y.to_f64_lossless(),
            })
        }
    }
}

/// `k`-th of `n + 1` equispaced points on `[-h, h]`, exact at both ends and
/// at the midpoint when `n` is even.
#[inline]
pub(crate) fn symmetric_node<T: Scalar>(half: T, k: usize, n: usize) -> T {
    let num = T::from_usize_exact(2 * k) - T::from_usize_exact(n);
    half * (num / T::from_usize_exact(n))
}

/// Uniform node lattice over the closed domain.
///
/// Nodes are `(-a + i*hx, -b + j*hy)` for `0 <= i <= nx`, `0 <= j <= ny`,
/// enumerated row-major (j outer, i inner).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid<T> {
    domain: Domain<T>,
    nx: usize,
    ny: usize,
}

impl<T: Scalar> SampleGrid<T> {
    pub fn new(domain: Domain<T>, nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 cells per axis, got {nx}x{ny}"
            )));
        }
        Ok(Self { domain, nx, ny })
    }

    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> T {
        T::lit(2.0) * self.domain.a() / T::from_usize_exact(self.nx)
    }

    pub fn hy(&self) -> T {
        T::lit(2.0) * self.domain.b() / T::from_usize_exact(self.ny)
    }

    /// Nodes per row.
    pub fn row_len(&self) -> usize {
        self.nx + 1
    }

    pub fn node_count(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn x(&self, i: usize) -> T {
        symmetric_node(self.domain.a(), i, self.nx)
    }

    pub fn y(&self, j: usize) -> T {
        symmetric_node(self.domain.b(), j, self.ny)
    }

    pub fn xs(&self) -> Vec<T> {
        (0..=self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<T> {
        (0..=self.ny).map(|j| self.y(j)).collect()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    /// `(i, j)` of a flat node index.
    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % (self.nx + 1), k / (self.nx + 1))
    }

    pub fn node(&self, k: usize) -> (T, T) {
        let (i, j) = self.ij(k);
        (self.x(i), self.y(j))
    }

    /// All nodes in enumeration order.
    pub fn nodes(&self) -> impl Iterator<Item = (T, T)> + '_ {
        (0..self.node_count()).map(move |k| self.node(k))
    }

    /// Index of the row lying on `y = 0`, if any.
    pub fn zero_row(&self) -> Option<usize> {
        self.ny.is_multiple_of(2).then_some(self.ny / 2)
    }

    /// Chebyshev distance (in cells) from node `k` to the domain edge.
    pub fn edge_distance(&self, k: usize) -> usize {
        let (i, j) = self.ij(k);
        i.min(self.nx - i).min(j).min(self.ny - j)
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self == other
    }
}
