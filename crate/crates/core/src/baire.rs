//! Lower and upper Baire envelope operators.
//!
//! On a closed sampling grid the lower operator `I` is a square-stencil
//! minimum (erosion) and the upper operator `S` a square-stencil maximum
//! (dilation), each clipped at the domain edge. The regularization
//! [`nlsc_regularize`] is the radius-1 opening of the radius-1 closing,
//! `S_1 . I_2 . S_1`. It annihilates single-node spikes (the grid image of a
//! null set), keeps step functions two-valued, and is idempotent, so its
//! fixed points play the role of normal lower semi-continuous functions.
//!
//! # The exact interface rule
//!
//! Let `v` be continuous on the open tiles, with one-sided limits
//! `l_1, ..., l_k` at a point `z` shared by `k` tiles, and arbitrary (say
//! zero) on the null set `Gamma` of tile edges. `S v(z)` is the limit of
//! suprema over shrinking balls, which sees every adjacent tile and the
//! padding: `max(0, l_1, ..., l_k)`. Off `Gamma`, `S v = v` by continuity.
//! `I` then takes the limit of infima of `S v` near `z`; every ball around
//! `z` contains off-`Gamma` points of all adjacent tiles, whose values tend
//! to the `l_i`, while the `Gamma` values `max(0, l_1, ..)` are never smaller
//! than all of them. Hence `(I . S) v (z) = min(l_1, ..., l_k)`, independent
//! of the padding. [`interface_value`] implements this rule.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ext_real::ExtendedReal;
use crate::geometry::SampleGrid;
use crate::scalar::Scalar;

/// One extended-real value per node of a sampling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    grid: SampleGrid<T>,
    values: Vec<ExtendedReal<T>>,
}

impl<T: Scalar> GridFunction<T> {
    pub fn new(grid: SampleGrid<T>, values: Vec<ExtendedReal<T>>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::InvalidArgument(format!(
                "{} values for {} grid nodes",
                values.len(),
                grid.node_count()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: SampleGrid<T>, c: T) -> Self {
        let values = vec![ExtendedReal::from(c); grid.node_count()];
        Self { grid, values }
    }

    /// Samples a closure at every node, in enumeration order.
    pub fn from_fn(grid: SampleGrid<T>, f: impl Fn(T, T) -> T) -> Self {
        let values = grid.nodes().map(|(x, y)| ExtendedReal::from(f(x, y))).collect();
        Self { grid, values }
    }

    pub fn try_from_fn(grid: SampleGrid<T>, f: impl Fn(T, T) -> Result<T>) -> Result<Self> {
        let values = grid
            .nodes()
            .map(|(x, y)| f(x, y).and_then(ExtendedReal::new))
            .collect::<Result<_>>()?;
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &SampleGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[ExtendedReal<T>] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> ExtendedReal<T> {
        self.values[self.grid.index(i, j)]
    }

    pub fn map(&self, f: impl Fn(ExtendedReal<T>) -> ExtendedReal<T>) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Nodewise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

#[derive(Clone, Copy)]
enum Envelope {
    Min,
    Max,
}

impl Envelope {
    fn pick<T: Scalar>(self, a: ExtendedReal<T>, b: ExtendedReal<T>) -> ExtendedReal<T> {
        match self {
            Envelope::Min => a.min(b),
            Envelope::Max => a.max(b),
        }
    }
}

/// Square-stencil envelope, computed separably (rows, then columns).
fn stencil<T: Scalar>(v: &GridFunction<T>, radius: usize, env: Envelope) -> GridFunction<T> {
    let g = &v.grid;
    let (w, h) = (g.nx() + 1, g.ny() + 1);
    let mut rows = vec![ExtendedReal::Finite(T::zero()); v.values.len()];
    rows.par_chunks_mut(w).enumerate().for_each(|(j, out)| {
        let src = &v.values[j * w..(j + 1) * w];
        for (i, o) in out.iter_mut().enumerate() {
            let lo = i.saturating_sub(radius);
            let hi = (i + radius).min(w - 1);
            *o = src[lo..=hi].iter().copied().reduce(|a, b| env.pick(a, b)).unwrap();
        }
    });
    let mut values = vec![ExtendedReal::Finite(T::zero()); v.values.len()];
    values.par_chunks_mut(w).enumerate().for_each(|(j, out)| {
        let lo = j.saturating_sub(radius);
        let hi = (j + radius).min(h - 1);
        for (i, o) in out.iter_mut().enumerate() {
            *o = (lo..=hi)
                .map(|r| rows[r * w + i])
                .reduce(|a, b| env.pick(a, b))
                .unwrap();
        }
    });
    GridFunction {
        grid: g.clone(),
        values,
    }
}

fn check_radius(radius: usize) -> Result<()> {
    if radius == 0 {
        Err(Error::InvalidArgument("stencil radius must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Discrete lower Baire operator: minimum over the clipped square of the given radius.
pub fn lower_baire<T: Scalar>(v: &GridFunction<T>, radius: usize) -> Result<GridFunction<T>> {
    check_radius(radius)?;
    Ok(stencil(v, radius, Envelope::Min))
}

/// Discrete upper Baire operator: maximum over the clipped square of the given radius.
pub fn upper_baire<T: Scalar>(v: &GridFunction<T>, radius: usize) -> Result<GridFunction<T>> {
    check_radius(radius)?;
    Ok(stencil(v, radius, Envelope::Max))
}

/// Grid regularization `S_1 . I_2 . S_1` (opening of the closing).
pub fn nlsc_regularize<T: Scalar>(v: &GridFunction<T>) -> GridFunction<T> {
    let closed = stencil(v, 1, Envelope::Max);
    let eroded = stencil(&closed, 2, Envelope::Min);
    stencil(&eroded, 1, Envelope::Max)
}

/// Regularized value at a point shared by several tiles: the minimum of
/// the one-sided limits (see the module docs for the derivation).
pub fn interface_value<T: Scalar>(limits: &[T]) -> Result<T> {
    let (first, rest) = limits.split_first().ok_or(Error::EmptyLimits)?;
    if limits.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidArgument("interface limits must be finite".into()));
    }
    Ok(rest.iter().fold(*first, |m, &l| m.min(l)))
}

/// Minimum distance (in cells) from the domain edge for which regularity
/// claims are checked.
pub const INTERIOR_MARGIN: usize = 2;

/// Result of [`is_normal_lsc`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NlscCheck {
    pub is_normal: bool,
    /// Flat node indices where the regularization moves the value.
    pub offending: Vec<usize>,
}

/// Whether `v` is a fixed point of [`nlsc_regularize`] at every node at
/// least [`INTERIOR_MARGIN`] cells inside the domain.
pub fn is_normal_lsc<T: Scalar>(v: &GridFunction<T>) -> NlscCheck {
    let r = nlsc_regularize(v);
    let offending: Vec<usize> = (0..v.values.len())
        .filter(|&k| v.grid.edge_distance(k) >= INTERIOR_MARGIN && r.values[k] != v.values[k])
        .collect();
    NlscCheck {
        is_normal: offending.is_empty(),
        offending,
    }
}
