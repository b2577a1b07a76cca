//! The sequence `eps_n = 1/n` and its convergence diagnostics.

use rayon::prelude::*;

use crate::assembly::{assemble, residual_report, ResidualReport};
use crate::baire::GridFunction;
use crate::error::{Error, Result};
use crate::ext_real::ExtendedReal;
use crate::geometry::{Domain, SampleGrid};
use crate::local_approx::{search_delta, starting_delta, ApproxConfig};
use crate::problem::Problem;
use crate::scalar::Scalar;
use crate::tiled::TiledFunction;
use crate::tiling::Tiling;

/// Traces within this distance of `f` count as exact.
pub const TRACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub approx: ApproxConfig,
    /// Evaluation grid cell counts.
    pub nx: usize,
    pub ny: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            approx: ApproxConfig::default(),
            nx: 256,
            ny: 256,
        }
    }
}

impl SolverConfig {
    pub fn eval_grid<T: Scalar>(&self, domain: Domain<T>) -> Result<SampleGrid<T>> {
        SampleGrid::new(domain, self.nx, self.ny)
    }
}

/// One approximant `u_n` with its residual on the evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceTerm<T> {
    pub n: usize,
    pub epsilon: T,
    pub delta: T,
    /// Total delta halvings from the starting delta.
    pub halvings: usize,
    pub u: TiledFunction<T>,
    pub residual: GridFunction<T>,
    pub report: ResidualReport<T>,
}

/// A term that could not be built.
#[derive(Debug, Clone, PartialEq)]
pub struct TermFailure {
    pub n: usize,
    pub error: Error,
}

/// Representative sequence of the generalized solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxSequence<T> {
    pub problem: Problem<T>,
    /// Successful terms in increasing `n`.
    pub terms: Vec<SequenceTerm<T>>,
    pub failures: Vec<TermFailure>,
}

/// Builds `u_n`. The delta search continues past lattice certification
/// until the residual band also holds on the evaluation grid.
pub fn build_term<T: Scalar>(problem: &Problem<T>, n: usize, config: &SolverConfig) -> Result<SequenceTerm<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("term index must be >= 1".into()));
    }
    let grid = config.eval_grid(problem.domain)?;
    let epsilon = T::one() / T::from_usize_exact(n);
    let cap = config.approx.max_halvings;
    let mut delta = starting_delta(problem, &config.approx);
    let mut halvings = 0;
    loop {
        let approx = ApproxConfig {
            initial_delta: Some(delta.to_f64_lossless()),
            max_halvings: cap - halvings,
            ..config.approx
        };
        let found = search_delta(problem, epsilon, &approx).map_err(|e| match e {
            Error::DeltaExhausted { epsilon, .. } => Error::DeltaExhausted { epsilon, halvings: cap },
            other => other,
        })?;
        halvings += found.halvings;
        let u = assemble(found.tiling, found.pieces)?;
        let (residual, report) = residual_report(&u, &problem.flux, &problem.initial, &grid)?;
        if report.satisfies_band(epsilon) {
            return Ok(SequenceTerm {
                n,
                epsilon,
                delta: found.delta,
                halvings,
                u,
                residual,
                report,
            });
        }
        if halvings == cap {
            return Err(Error::DeltaExhausted {
                epsilon: epsilon.to_f64_lossless(),
                halvings: cap,
            });
        }
        delta = found.delta * T::lit(0.5);
        halvings += 1;
    }
}

/// Builds `u_1, ..., u_N` concurrently. A failing term is recorded and the
/// rest of the run continues.
pub fn build_sequence<T: Scalar>(
    problem: &Problem<T>,
    terms: usize,
    config: &SolverConfig,
) -> Result<ApproxSequence<T>> {
    if terms == 0 {
        return Err(Error::InvalidArgument("sequence length N must be >= 1".into()));
    }
    config.eval_grid(problem.domain)?;
    let built: Vec<_> = (1..=terms)
        .into_par_iter()
        .map(|n| (n, build_term(problem, n, config)))
        .collect();
    let mut seq = ApproxSequence {
        problem: problem.clone(),
        terms: Vec::new(),
        failures: Vec::new(),
    };
    for (n, r) in built {
        match r {
            Ok(t) => seq.terms.push(t),
            Err(error) => seq.failures.push(TermFailure { n, error }),
        }
    }
    Ok(seq)
}

/// Operational a.e. convergence settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeConfig<T> {
    /// Bound on the last term's deviation off the exceptional set.
    pub tolerance: T,
    /// Largest admissible exceptional-node share.
    pub null_bound: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AEVerdict<T> {
    pub converges: bool,
    pub exceptional_fraction: T,
    /// Per term: max deviation from the limit off the exceptional set.
    pub max_off_exceptional_deviation: Vec<T>,
}

fn deviation<T: Scalar>(a: ExtendedReal<T>, b: ExtendedReal<T>) -> T {
    match (a.finite(), b.finite()) {
        (Some(x), Some(y)) => (x - y).abs(),
        _ if a == b => T::zero(),
        _ => T::infinity(),
    }
}

/// Checks `terms -> limit` off the exceptional node set: the last deviation
/// is within tolerance, deviations never increase over the final half of
/// the sequence, and the exceptional share is within the null-set bound.
pub fn check_ae_convergence<T: Scalar>(
    terms: &[GridFunction<T>],
    limit: &GridFunction<T>,
    exceptional: &[bool],
    config: &AeConfig<T>,
) -> Result<AEVerdict<T>> {
    let grid = limit.grid();
    if exceptional.len() != grid.node_count() || terms.iter().any(|t| !t.grid().same_shape(grid)) {
        return Err(Error::GridMismatch);
    }
    let marked = exceptional.iter().filter(|&&e| e).count();
    let exceptional_fraction = T::from_usize_exact(marked) / T::from_usize_exact(grid.node_count());
    let devs: Vec<T> = terms
        .par_iter()
        .map(|t| {
            t.values()
                .iter()
                .zip(limit.values())
                .zip(exceptional)
                .filter(|(_, &e)| !e)
                .map(|((&a, &b), _)| deviation(a, b))
                .fold(T::zero(), T::max)
        })
        .collect();
    let tail = &devs[devs.len() / 2..];
    let converges = !devs.is_empty()
        && exceptional_fraction <= config.null_bound
        && devs[devs.len() - 1] <= config.tolerance
        && tail.windows(2).all(|w| w[1] <= w[0]);
    Ok(AEVerdict {
        converges,
        exceptional_fraction,
        max_off_exceptional_deviation: devs,
    })
}

/// Null-set proxy: five times the skeleton length in cells, as a share of
/// all cells, capped at 1.
pub fn null_set_budget<T: Scalar>(tilings: &[&Tiling<T>], grid: &SampleGrid<T>) -> T {
    let cells: T = tilings.iter().map(|t| t.skeleton_cells(grid)).sum();
    let total = T::from_usize_exact(grid.nx() * grid.ny());
    (T::lit(5.0) * cells / total).min(T::one())
}

/// Union of the terms' singular-set neighbourhoods on the grid.
pub fn exceptional_union<T: Scalar>(tilings: &[&Tiling<T>], grid: &SampleGrid<T>) -> Vec<bool> {
    let mut out = vec![false; grid.node_count()];
    for t in tilings {
        for (o, m) in out.iter_mut().zip(t.gamma_marked(grid)) {
            *o |= m;
        }
    }
    out
}

impl<T: Scalar> ApproxSequence<T> {
    pub fn tilings(&self) -> Vec<&Tiling<T>> {
        self.terms.iter().map(|t| t.u.tiling()).collect()
    }

    /// a.e. check of the residual sequence against 0 with the singular sets
    /// of all terms as the exceptional set and tolerance `1/N`.
    pub fn residual_ae_verdict(&self) -> Result<AEVerdict<T>> {
        let last = self
            .terms
            .last()
            .ok_or_else(|| Error::InvalidArgument("sequence has no terms".into()))?;
        let grid = &last.report.eval_grid;
        let tilings = self.tilings();
        let residuals: Vec<GridFunction<T>> = self.terms.iter().map(|t| t.residual.clone()).collect();
        check_ae_convergence(
            &residuals,
            &GridFunction::constant(grid.clone(), T::zero()),
            &exceptional_union(&tilings, grid),
            &AeConfig {
                tolerance: last.epsilon,
                null_bound: null_set_budget(&tilings, grid),
            },
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRow<T> {
    pub n: usize,
    pub epsilon: T,
    pub delta: T,
    /// Sup of `|residual|` off the singular set.
    pub sup_residual: T,
    /// Min of the residual over all nodes.
    pub min_residual: T,
    pub trace_error: T,
    pub gamma_fraction: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CauchyReport<T> {
    pub rows: Vec<DecayRow<T>>,
    /// Terms whose residual leaves `(-eps_n, 0]`.
    pub band_failures: Vec<usize>,
    /// Terms whose trace is not `f`.
    pub trace_failures: Vec<usize>,
    /// Whether the bands `[-eps_n, 0]` are nested.
    pub bands_shrink: bool,
}

impl<T: Scalar> CauchyReport<T> {
    pub fn is_cauchy(&self) -> bool {
        self.band_failures.is_empty() && self.trace_failures.is_empty() && self.bands_shrink
    }

    pub fn to_csv(&self) -> String {
        decay_csv(&self.rows)
    }
}

/// CSV table of decay rows, one line per term.
pub fn decay_csv<T: Scalar>(rows: &[DecayRow<T>]) -> String {
    let mut s = String::from("n,epsilon,delta,sup_residual,min_residual,trace_error,gamma_fraction\n");
    for r in rows {
        s.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.n, r.epsilon, r.delta, r.sup_residual, r.min_residual, r.trace_error, r.gamma_fraction
        ));
    }
    s
}

pub fn decay_rows<T: Scalar>(terms: &[SequenceTerm<T>]) -> Vec<DecayRow<T>> {
    terms
        .iter()
        .map(|t| DecayRow {
            n: t.n,
            epsilon: t.epsilon,
            delta: t.delta,
            sup_residual: t.report.sup_abs_off_gamma(),
            min_residual: t.report.min(),
            trace_error: t.report.trace_error_max,
            gamma_fraction: t.report.gamma_node_fraction,
        })
        .collect()
}

/// Checks that the image `(residual, trace)` of the terms tends to `(0, f)`:
/// every residual in its band, bands nested, every trace exact.
pub fn cauchy_diagnostic<T: Scalar>(terms: &[SequenceTerm<T>]) -> Result<CauchyReport<T>> {
    if terms.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "the Cauchy diagnostic needs at least 2 terms, got {}",
            terms.len()
        )));
    }
    let rows = decay_rows(terms);
    Ok(CauchyReport {
        rows,
        band_failures: terms
            .iter()
            .filter(|t| !t.report.satisfies_band(t.epsilon))
            .map(|t| t.n)
            .collect(),
        trace_failures: terms
            .iter()
            .filter(|t| !(t.report.trace_error_max <= T::lit(TRACE_TOL)))
            .map(|t| t.n)
            .collect(),
        bands_shrink: terms.windows(2).all(|w| w[1].epsilon <= w[0].epsilon),
    })
}
