//! Text artifacts: grid CSVs and the human report.

use std::fmt::Write as _;

use ordpde::convergence::{DecayRow, SequenceTerm, TermFailure, TRACE_TOL};
use ordpde::oracles::{ConsistencyReport, OracleSolution};
use ordpde::{ExtReal, GridFn, Sequence};

use crate::spec::ProblemSpec;

pub fn fmt_value(v: ExtReal) -> String {
    match v {
        ExtReal::Finite(x) => format!("{x:.16e}"),
        ExtReal::PosInf => "inf".into(),
        ExtReal::NegInf => "-inf".into(),
    }
}

/// `x,y,value`, row-major (x fastest), 17 significant digits.
pub fn grid_csv(field: &GridFn) -> String {
    let grid = field.grid();
    let mut s = String::with_capacity(grid.node_count() * 72 + 16);
    s.push_str("x,y,value\n");
    for (k, (x, y)) in grid.nodes().enumerate() {
        let _ = writeln!(s, "{x:.16e},{y:.16e},{}", fmt_value(field.values()[k]));
    }
    s
}

/// Samples `u_n` at the nodes of its own residual grid.
pub fn sample_term(term: &SequenceTerm<f64>) -> ordpde::Result<GridFn> {
    GridFn::new(
        term.report.eval_grid.clone(),
        term.report
            .eval_grid
            .nodes()
            .map(|(x, y)| term.u.evaluate(x, y))
            .collect::<ordpde::Result<Vec<_>>>()?,
    )
}

fn band_line(n: usize, term: Option<&SequenceTerm<f64>>) -> String {
    match term {
        Some(t) => {
            let verdict = if t.report.satisfies_band(t.epsilon) {
                "PASS"
            } else {
                "FAIL"
            };
            format!(
                "n = {n}: -eps_n < residual <= 0 {verdict} (eps_n = {:.6e}, min = {:.6e}, max = {:.6e})",
                t.epsilon,
                t.report.min(),
                t.report.max()
            )
        }
        None => format!("n = {n}: -eps_n < residual <= 0 FAIL (no term built)"),
    }
}

pub struct SolveSummary<'a> {
    pub spec: &'a ProblemSpec,
    pub sequence: &'a Sequence,
    pub rows: &'a [DecayRow<f64>],
    pub ae: Option<&'a ordpde::convergence::AEVerdict<f64>>,
}

pub fn solve_report(s: &SolveSummary<'_>) -> String {
    let spec = s.spec;
    let mut r = String::new();
    let _ = writeln!(r, "problem: D_y u + F(x, y, u, D_x u) = 0, u(x, 0) = f(x)");
    let _ = writeln!(r, "F = {}", spec.flux_text);
    let _ = writeln!(r, "f = {}", spec.initial_text);
    let _ = writeln!(r, "f' = {}", s.sequence.problem.initial_prime);
    let _ = writeln!(r, "domain = [-{}, {}] x [-{}, {}]", spec.a, spec.a, spec.b, spec.b);
    let _ = writeln!(r, "grid = {} x {}", spec.nx, spec.ny);
    let _ = writeln!(r, "N = {}", spec.n_terms);
    let _ = writeln!(r);
    let _ = writeln!(r, "## theorem band");
    for n in 1..=spec.n_terms {
        let term = s.sequence.terms.iter().find(|t| t.n == n);
        let _ = writeln!(r, "{}", band_line(n, term));
    }
    let _ = writeln!(r);
    let _ = writeln!(r, "## terms");
    for t in &s.sequence.terms {
        let (cols, rows) = t.u.tiling().shape().unwrap_or((t.u.tiling().len(), 1));
        let trace = if t.report.trace_error_max <= TRACE_TOL {
            "PASS"
        } else {
            "FAIL"
        };
        let _ = writeln!(
            r,
            "n = {}: delta = {:.6e} ({} halvings), tiles = {cols} x {rows}, trace error = {:.3e} {trace}",
            t.n, t.delta, t.halvings, t.report.trace_error_max
        );
    }
    for TermFailure { n, error } in &s.sequence.failures {
        let _ = writeln!(r, "n = {n}: failed: {error}");
    }
    let _ = writeln!(r);
    let _ = writeln!(r, "## decay");
    for row in s.rows {
        let _ = writeln!(
            r,
            "n = {}: sup residual off gamma = {:.6e}, gamma fraction = {:.4e}",
            row.n, row.sup_residual, row.gamma_fraction
        );
    }
    if let Some(v) = s.ae {
        let _ = writeln!(r);
        let _ = writeln!(r, "## almost-everywhere convergence");
        let _ = writeln!(
            r,
            "residual -> 0 off the singular set: {} (exceptional fraction = {:.4e})",
            if v.converges { "PASS" } else { "FAIL" },
            v.exceptional_fraction
        );
    }
    r
}

pub fn oracle_report(
    spec: &ProblemSpec,
    y_max: f64,
    oracle: &OracleSolution<f64>,
    check: &ConsistencyReport<f64>,
    refused: Option<f64>,
) -> String {
    let mut r = String::new();
    let _ = writeln!(r, "## oracle: characteristics");
    let _ = writeln!(r, "F = {}", spec.flux_text);
    let _ = writeln!(r, "region = |y| <= {y_max}");
    match (oracle.shock, oracle.shock_below) {
        (None, None) => {
            let _ = writeln!(r, "no characteristic crossing in the region");
        }
        (above, below) => {
            if let Some(y) = above {
                let _ = writeln!(r, "shock at y = {y:.6e}");
            }
            if let Some(y) = below {
                let _ = writeln!(r, "shock at y = {y:.6e}");
            }
        }
    }
    if let Some(y) = refused {
        let _ = writeln!(
            r,
            "refused: no classical solution past the shock at |y| = {y:.6e}; checked only rows before it"
        );
    }
    let _ = writeln!(r, "checked nodes = {}", check.checked_nodes);
    let _ = writeln!(
        r,
        "finite-difference residual = {:.3e} (tolerance {:.3e}) {}",
        check.residual_max_abs,
        check.residual_tol,
        if check.residual_ok() { "PASS" } else { "FAIL" }
    );
    let _ = writeln!(
        r,
        "trace error = {:.3e} (tolerance {:.0e}) {}",
        check.trace_error,
        check.trace_tol,
        if check.trace_ok() { "PASS" } else { "FAIL" }
    );
    r
}
