//! Order completion solver for first-order Cauchy problems
//!
//! ```text
//! D_y u + F(x, y, u, D_x u) = 0   on (-a, a) x (-b, b)
//! u(x, 0) = f(x)
//! ```
//!
//! The pipeline tiles the domain, builds per-tile approximants whose
//! residual lies in `[-eps, 0]`, pastes them with the Baire-envelope rule on
//! the tile skeleton, and checks the sequence `eps_n = 1/n` for the
//! residual band, exact trace, and almost-everywhere convergence.
//!
//! Numeric modules are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix `f64`.

pub mod assembly;
pub mod baire;
pub mod convergence;
pub mod error;
pub mod expr;
pub mod ext_real;
pub mod geometry;
pub mod local_approx;
pub mod oracles;
pub mod problem;
pub mod scalar;
pub mod tiled;
pub mod tiling;

pub use assembly::{assemble, equivalent, regularized_residual, residual_report, trace, ResidualReport};
pub use baire::{interface_value, is_normal_lsc, lower_baire, nlsc_regularize, upper_baire, GridFunction};
pub use convergence::{build_sequence, cauchy_diagnostic, check_ae_convergence, ApproxSequence, SolverConfig};
pub use error::{Error, Result};
pub use expr::{Env, Expr, Var, VarSet};
pub use ext_real::ExtendedReal;
pub use geometry::{Domain, SampleGrid};
pub use local_approx::{certify, initial_piece, interior_piece, ApproxConfig, CalibratedPiece};
pub use oracles::{characteristics_solve, consistency_check, QuasilinearForm};
pub use problem::Problem;
pub use scalar::Scalar;
pub use tiled::{SmoothPiece, TiledFunction};
pub use tiling::{build_fiad_tiling, verify_tiling, TileBox, Tiling};

pub type Real = f64;
pub type ExtReal = ExtendedReal<f64>;
pub type Grid = SampleGrid<f64>;
pub type GridFn = GridFunction<f64>;
pub type Tiles = Tiling<f64>;
pub type TiledFn = TiledFunction<f64>;
pub type Piece = SmoothPiece<f64>;
pub type Spec = Problem<f64>;
pub type Report = ResidualReport<f64>;
pub type Sequence = ApproxSequence<f64>;
