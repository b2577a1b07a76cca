use thiserror::Error;

use crate::expr::{DiffError, EvalError, ParseError};

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({x}, {y}) lies outside the closed domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("point ({x}, {y}) lies on the singular set; use the regularized path")]
    SingularPoint { x: f64, y: f64 },

    #[error("point ({x}, {y}) is not on the tile skeleton")]
    NotOnSkeleton { x: f64, y: f64 },

    #[error("arithmetic on an infinite extended real")]
    InfiniteArithmetic,

    #[error("NaN is not an extended real")]
    NotANumber,

    #[error("interface rule needs at least one one-sided limit")]
    EmptyLimits,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{pieces} pieces supplied for {tiles} tiles")]
    PieceCountMismatch { pieces: usize, tiles: usize },

    #[error("piece {index} does not match its tile: {reason}")]
    PieceTileMismatch { index: usize, reason: String },

    #[error("grid {nx}x{ny} does not refine a {cols}x{rows} tiling")]
    InsufficientRefinement {
        nx: usize,
        ny: usize,
        cols: usize,
        rows: usize,
    },

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("flux is not of the form A(x,y,u)*p - B(x,y,u): {0}")]
    NotQuasilinear(String),

    #[error("characteristic integration failed at y = {y} (foot x0 = {x0}): {reason}")]
    Integrator { y: f64, x0: f64, reason: String },

    #[error("delta search exhausted after {halvings} halvings at eps = {epsilon}")]
    DeltaExhausted { epsilon: f64, halvings: usize },

    #[error("at ({x}, {y}): {source}")]
    AtNode { x: f64, y: f64, source: Box<Error> },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error(transparent)]
    Diff(#[from] DiffError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
