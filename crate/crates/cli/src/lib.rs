//! Command-line driver for the `ordpde` solver: problem files, CSV and SVG
//! artifacts, and the `solve` / `compare` / `check` commands.

pub mod output;
pub mod run;
pub mod spec;
pub mod svg;

pub use run::{check, compare, configure_threads, solve, SolveOptions};
pub use spec::{ProblemSpec, SpecError};
