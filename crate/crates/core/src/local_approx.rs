//! Per-tile calibrated approximants with residual pinned to `[-eps, 0]`.
//!
//! Interior tiles receive affine pieces whose `y`-slope is chosen so the
//! residual at the tile centre is exactly `-eps/2`. Tiles crossing `y = 0`
//! receive `u = f(x) + g(x) y` with `g = -eps/2 - F(x, 0, f, f')` sampled and
//! Hermite-interpolated, so the trace is exactly `f` and the residual on the
//! initial line is `-eps/2` at every sample. The `-eps/2` margin is what makes
//! shrinking the tiles eventually succeed for continuous `F`; certification
//! checks it empirically on a dense lattice.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{Env, Expr};
use crate::problem::Problem;
use crate::scalar::Scalar;
use crate::tiled::{Hermite, SmoothPiece};
use crate::tiling::{build_fiad_tiling, TileBox, Tiling};

/// Relative slack on the certification band.
pub const CERTIFY_SLACK: f64 = 1e-12;

/// Knobs for local construction and the delta search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxConfig {
    /// Certification lattice is `lattice_n x lattice_n` per tile.
    pub lattice_n: usize,
    /// Interpolation nodes for `g` across each initial tile.
    pub samples_per_tile: usize,
    pub max_halvings: usize,
    /// Starting delta; `None` means `2 max(a, b)`.
    pub initial_delta: Option<f64>,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        Self {
            lattice_n: 16,
            samples_per_tile: 8,
            max_halvings: 40,
            initial_delta: None,
        }
    }
}

/// Affine piece through `(x0, y0, c0)` with `x`-slope `c1`, calibrated so
/// that `Tu(x0, y0) = -eps/2`.
pub fn interior_piece<T: Scalar>(flux: &Expr, x0: T, y0: T, eps: T, c0: T, c1: T) -> Result<SmoothPiece<T>> {
    check_eps(eps)?;
    let c2 = -eps * T::lit(0.5) - flux.eval(&Env::new(x0, y0, c0, c1))?;
    Ok(SmoothPiece::affine(x0, y0, c0, c1, c2))
}

/// Initial-line piece `u = f(x) + g(x) y` over the tile's x-range.
pub fn initial_piece<T: Scalar>(
    flux: &Expr,
    f: &Arc<Expr>,
    fprime: &Arc<Expr>,
    tile: &TileBox<T>,
    eps: T,
    samples_per_tile: usize,
) -> Result<SmoothPiece<T>> {
    check_eps(eps)?;
    if !tile.meets_initial_line() {
        return Err(Error::InvalidArgument(
            "initial pieces need a tile whose interior meets y = 0".into(),
        ));
    }
    let n = samples_per_tile.max(2);
    let half = eps * T::lit(0.5);
    let mut xs = Vec::with_capacity(n);
    let mut gs = Vec::with_capacity(n);
    for k in 0..n {
        let t = T::from_usize_exact(k) / T::from_usize_exact(n - 1);
        let x = if k == n - 1 {
            tile.x_hi
        } else {
            tile.x_lo + t * tile.width()
        };
        let env = Env::at_x(x);
        let (fx, fpx) = (f.eval(&env)?, fprime.eval(&env)?);
        xs.push(x);
        gs.push(-half - flux.eval(&Env::new(x, T::zero(), fx, fpx))?);
    }
    Ok(SmoothPiece::Initial {
        f: Arc::clone(f),
        fprime: Arc::clone(fprime),
        g: Hermite::new(xs, gs)?,
    })
}

fn check_eps<T: Scalar>(eps: T) -> Result<()> {
    if eps > T::zero() && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")))
    }
}

/// Residual extremes over a certification lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeStats<T> {
    pub min: T,
    pub max: T,
    pub lattice_n: usize,
}

/// A piece certified to keep its residual in `[-eps, 0]` on its box.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibratedPiece<T> {
    pub piece: SmoothPiece<T>,
    pub epsilon: T,
    pub certified_box: TileBox<T>,
    pub certification: LatticeStats<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShrinkReason<T> {
    /// Residual left the band.
    OutOfBand(LatticeStats<T>),
    /// Residual was not finite at the given point.
    NonFinite { x: T, y: T },
}

/// Outcome of [`certify`].
#[derive(Debug, Clone, PartialEq)]
pub enum Certification<T> {
    Certified(CalibratedPiece<T>),
    /// The box is too large for this piece: shrink delta and retry.
    Shrink(ShrinkReason<T>),
}

impl<T> Certification<T> {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certification::Certified(_))
    }
}

fn lattice_point<T: Scalar>(lo: T, hi: T, k: usize, n: usize) -> T {
    if k + 1 == n {
        hi
    } else {
        lo + (hi - lo) * (T::from_usize_exact(k) / T::from_usize_exact(n - 1))
    }
}

/// Samples `Tu` on a `lattice_n x lattice_n` lattice spanning the closed box.
pub fn certify<T: Scalar>(
    piece: SmoothPiece<T>,
    flux: &Expr,
    eps: T,
    bx: TileBox<T>,
    lattice_n: usize,
) -> Result<Certification<T>> {
    check_eps(eps)?;
    if lattice_n < 8 {
        return Err(Error::InvalidArgument(format!(
            "certification lattice needs >= 8 points per axis, got {lattice_n}"
        )));
    }
    let mut min = T::infinity();
    let mut max = T::neg_infinity();
    for j in 0..lattice_n {
        let y = lattice_point(bx.y_lo, bx.y_hi, j, lattice_n);
        for i in 0..lattice_n {
            let x = lattice_point(bx.x_lo, bx.x_hi, i, lattice_n);
            let r = piece.residual(flux, x, y)?;
            if !r.is_finite() {
                return Ok(Certification::Shrink(ShrinkReason::NonFinite { x, y }));
            }
            min = min.min(r);
            max = max.max(r);
        }
    }
    let stats = LatticeStats { min, max, lattice_n };
    let slack = T::lit(CERTIFY_SLACK) * eps;
    if min >= -eps - slack && max <= slack {
        Ok(Certification::Certified(CalibratedPiece {
            piece,
            epsilon: eps,
            certified_box: bx,
            certification: stats,
        }))
    } else {
        Ok(Certification::Shrink(ShrinkReason::OutOfBand(stats)))
    }
}

/// Piece for one tile with the default seeds: variant B on the initial row,
/// otherwise affine through `(f(x0), f'(x0))` at the tile centre.
pub fn seeded_piece<T: Scalar>(
    problem: &Problem<T>,
    tiling: &Tiling<T>,
    index: usize,
    eps: T,
    config: &ApproxConfig,
) -> Result<SmoothPiece<T>> {
    let tile = &tiling.tiles()[index];
    if tiling.is_initial(index) {
        initial_piece(
            &problem.flux,
            &problem.initial,
            &problem.initial_prime,
            tile,
            eps,
            config.samples_per_tile,
        )
    } else {
        let (x0, y0) = tile.center();
        interior_piece(&problem.flux, x0, y0, eps, problem.f(x0)?, problem.f_prime(x0)?)
    }
}

/// Builds and certifies a piece on every tile, in parallel. Returns the
/// shrink demands (tile index, reason) if any tile fails.
pub fn calibrate_tiling<T: Scalar>(
    problem: &Problem<T>,
    tiling: &Tiling<T>,
    eps: T,
    config: &ApproxConfig,
) -> Result<std::result::Result<Vec<CalibratedPiece<T>>, Vec<(usize, ShrinkReason<T>)>>> {
    let outcomes = (0..tiling.len())
        .into_par_iter()
        .map(|i| {
            let piece = seeded_piece(problem, tiling, i, eps, config)?;
            certify(piece, &problem.flux, eps, tiling.tiles()[i], config.lattice_n)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut pieces = Vec::with_capacity(outcomes.len());
    let mut demands = Vec::new();
    for (i, c) in outcomes.into_iter().enumerate() {
        match c {
            Certification::Certified(p) => pieces.push(p),
            Certification::Shrink(r) => demands.push((i, r)),
        }
    }
    Ok(if demands.is_empty() { Ok(pieces) } else { Err(demands) })
}

/// Certified pieces for one epsilon together with the delta that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSearch<T> {
    pub delta: T,
    pub halvings: usize,
    pub tiling: Tiling<T>,
    pub pieces: Vec<CalibratedPiece<T>>,
}

pub fn starting_delta<T: Scalar>(problem: &Problem<T>, config: &ApproxConfig) -> T {
    match config.initial_delta {
        Some(d) => T::lit(d),
        None => T::lit(2.0) * problem.domain.a().max(problem.domain.b()),
    }
}

/// Halves a single global delta until every tile certifies.
pub fn search_delta<T: Scalar>(problem: &Problem<T>, eps: T, config: &ApproxConfig) -> Result<DeltaSearch<T>> {
    let mut delta = starting_delta(problem, config);
    for halvings in 0..=config.max_halvings {
        let tiling = build_fiad_tiling(problem.domain, delta)?;
        if let Ok(pieces) = calibrate_tiling(problem, &tiling, eps, config)? {
            return Ok(DeltaSearch {
                delta,
                halvings,
                tiling,
                pieces,
            });
        }
        delta = delta * T::lit(0.5);
    }
    Err(Error::DeltaExhausted {
        epsilon: eps.to_f64_lossless(),
        halvings: config.max_halvings,
    })
}
