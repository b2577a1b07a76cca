//! Pasting certified pieces, the regularized residual, and the trace.

use rayon::prelude::*;

use crate::baire::{interface_value, GridFunction};
use crate::error::{Error, Result};
use crate::expr::{Env, Expr};
use crate::ext_real::ExtendedReal;
use crate::geometry::SampleGrid;
use crate::local_approx::CalibratedPiece;
use crate::scalar::Scalar;
use crate::tiled::TiledFunction;
use crate::tiling::Tiling;

/// Absolute slack on the strict lower band edge `-eps < residual`.
pub const BAND_SLACK: f64 = 1e-12;

/// Tolerance of the grid-level equivalence test.
pub const EQUIVALENCE_TOL: f64 = 1e-9;

/// Pastes one certified piece per tile into a tiled function.
pub fn assemble<T: Scalar>(tiling: Tiling<T>, pieces: Vec<CalibratedPiece<T>>) -> Result<TiledFunction<T>> {
    if pieces.len() != tiling.len() {
        return Err(Error::PieceCountMismatch {
            pieces: pieces.len(),
            tiles: tiling.len(),
        });
    }
    for (index, (p, tile)) in pieces.iter().zip(tiling.tiles()).enumerate() {
        if p.certified_box != *tile {
            return Err(Error::PieceTileMismatch {
                index,
                reason: "certified on a different box".into(),
            });
        }
        if p.epsilon != pieces[0].epsilon {
            return Err(Error::PieceTileMismatch {
                index,
                reason: format!("certified at eps = {}, expected {}", p.epsilon, pieces[0].epsilon),
            });
        }
    }
    TiledFunction::new(tiling, pieces.into_iter().map(|p| p.piece).collect())
}

fn check_refinement<T: Scalar>(tiling: &Tiling<T>, grid: &SampleGrid<T>) -> Result<()> {
    let (cols, rows) = tiling.shape().unwrap_or((1, 1));
    let enough = match tiling.shape() {
        Some(_) => grid.nx() >= 2 * cols && grid.ny() >= 2 * rows,
        None => grid.node_count() >= 4 * tiling.len(),
    };
    if enough {
        Ok(())
    } else {
        Err(Error::InsufficientRefinement {
            nx: grid.nx(),
            ny: grid.ny(),
            cols,
            rows,
        })
    }
}

fn at_node<T: Scalar>(x: T, y: T) -> impl FnOnce(Error) -> Error {
    move |e| Error::AtNode {
        x: x.to_f64_lossless(),
        y: y.to_f64_lossless(),
        source: Box::new(e),
    }
}

/// Residual limits of every tile owning one node.
struct NodeResidual<T> {
    owners: Vec<usize>,
    limits: Vec<T>,
}

fn node_residuals<T: Scalar>(u: &TiledFunction<T>, flux: &Expr, grid: &SampleGrid<T>) -> Result<Vec<NodeResidual<T>>> {
    check_refinement(u.tiling(), grid)?;
    (0..grid.node_count())
        .into_par_iter()
        .map(|k| {
            let (x, y) = grid.node(k);
            let owners = u.owners(x, y).map_err(at_node(x, y))?;
            let limits = owners
                .iter()
                .map(|&i| u.pieces()[i].residual(flux, x, y))
                .collect::<Result<Vec<_>>>()
                .map_err(at_node(x, y))?;
            Ok(NodeResidual { owners, limits })
        })
        .collect()
}

/// `(I . S)(D_y u + F(x, y, u, D_x u))` sampled on the grid: exact piece
/// residuals off the singular set, the interface rule on it.
pub fn regularized_residual<T: Scalar>(
    u: &TiledFunction<T>,
    flux: &Expr,
    grid: &SampleGrid<T>,
) -> Result<GridFunction<T>> {
    let nodes = node_residuals(u, flux, grid)?;
    let values = nodes
        .iter()
        .map(|n| ExtendedReal::new(interface_value(&n.limits)?))
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(grid.clone(), values)
}

/// Regularized values `u(x, 0)`.
pub fn trace<T: Scalar>(u: &TiledFunction<T>, x_nodes: &[T]) -> Result<Vec<T>> {
    x_nodes
        .iter()
        .map(|&x| u.evaluate(x, T::zero())?.finite().ok_or(Error::InfiniteArithmetic))
        .collect()
}

/// Residual extremes over the nodes one tile owns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TileResidual<T> {
    pub tile: usize,
    pub min: T,
    pub max: T,
}

/// Grid image of `u -> (Tu, u(., 0))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport<T> {
    pub eval_grid: SampleGrid<T>,
    /// Extremes over nodes owned by a single tile.
    pub residual_min: T,
    pub residual_max: T,
    /// Extremes over nodes on the singular set; `None` if no node lies on it.
    pub gamma_residual: Option<(T, T)>,
    /// Share of nodes within one cell of the singular set.
    pub gamma_node_fraction: T,
    /// Max `|u(x, 0) - f(x)|` over the grid's x-nodes.
    pub trace_error_max: T,
    /// Tiles owning no grid node are omitted.
    pub per_tile: Vec<TileResidual<T>>,
}

impl<T: Scalar> ResidualReport<T> {
    /// Minimum over every node, singular set included.
    pub fn min(&self) -> T {
        self.gamma_residual
            .map_or(self.residual_min, |(lo, _)| lo.min(self.residual_min))
    }

    pub fn max(&self) -> T {
        self.gamma_residual
            .map_or(self.residual_max, |(_, hi)| hi.max(self.residual_max))
    }

    /// Sup of `|residual|` over nodes off the singular set.
    pub fn sup_abs_off_gamma(&self) -> T {
        self.residual_min.abs().max(self.residual_max.abs())
    }

    /// `-eps < residual <= 0` at every node, with [`BAND_SLACK`] on the lower edge.
    pub fn satisfies_band(&self, eps: T) -> bool {
        self.max() <= T::zero() && self.min() > -eps - T::lit(BAND_SLACK)
    }
}

/// Regularized residual on the grid together with its report.
pub fn residual_report<T: Scalar>(
    u: &TiledFunction<T>,
    flux: &Expr,
    initial: &Expr,
    grid: &SampleGrid<T>,
) -> Result<(GridFunction<T>, ResidualReport<T>)> {
    let nodes = node_residuals(u, flux, grid)?;
    let mut off = (T::infinity(), T::neg_infinity());
    let mut on: Option<(T, T)> = None;
    let mut per_tile: Vec<Option<(T, T)>> = vec![None; u.tiling().len()];
    let mut values = Vec::with_capacity(nodes.len());
    for n in &nodes {
        let r = interface_value(&n.limits)?;
        values.push(ExtendedReal::new(r)?);
        if n.owners.len() == 1 {
            off = (off.0.min(r), off.1.max(r));
        } else {
            on = Some(on.map_or((r, r), |(lo, hi)| (lo.min(r), hi.max(r))));
        }
        for (&i, &l) in n.owners.iter().zip(&n.limits) {
            per_tile[i] = Some(per_tile[i].map_or((l, l), |(lo, hi)| (lo.min(l), hi.max(l))));
        }
    }
    let xs = grid.xs();
    let traced = trace(u, &xs)?;
    let trace_error_max = xs
        .iter()
        .zip(&traced)
        .map(|(&x, &t)| Ok((t - initial.eval(&Env::at_x(x))?).abs()))
        .collect::<Result<Vec<T>>>()?
        .into_iter()
        .fold(T::zero(), T::max);
    let report = ResidualReport {
        eval_grid: grid.clone(),
        residual_min: off.0,
        residual_max: off.1,
        gamma_residual: on,
        gamma_node_fraction: u.tiling().gamma_fraction(grid),
        trace_error_max,
        per_tile: per_tile
            .into_iter()
            .enumerate()
            .filter_map(|(tile, mm)| mm.map(|(min, max)| TileResidual { tile, min, max }))
            .collect(),
    };
    Ok((GridFunction::new(grid.clone(), values)?, report))
}

/// Grid proxy for `T0 u = T0 v`: regularized residuals agree off both
/// singular sets and traces agree at every x-node, within [`EQUIVALENCE_TOL`].
pub fn equivalent<T: Scalar>(
    u: &TiledFunction<T>,
    v: &TiledFunction<T>,
    flux: &Expr,
    grid: &SampleGrid<T>,
) -> Result<bool> {
    if u.tiling().domain() != v.tiling().domain() {
        return Err(Error::InvalidArgument("functions live on different domains".into()));
    }
    let tol = T::lit(EQUIVALENCE_TOL);
    let (ru, rv) = (node_residuals(u, flux, grid)?, node_residuals(v, flux, grid)?);
    let residuals_agree = ru
        .iter()
        .zip(&rv)
        .all(|(a, b)| a.owners.len() > 1 || b.owners.len() > 1 || (a.limits[0] - b.limits[0]).abs() <= tol);
    if !residuals_agree {
        return Ok(false);
    }
    let xs = grid.xs();
    let (tu, tv) = (trace(u, &xs)?, trace(v, &xs)?);
    Ok(tu.iter().zip(&tv).all(|(a, b)| (*a - *b).abs() <= tol))
}
