//! The `solve`, `compare` and `check` commands. Each returns a process
//! exit code and writes diagnostics to the given stream.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ordpde::convergence::{build_sequence, decay_csv, decay_rows};
use ordpde::oracles::{characteristics_solve, consistency_check, QuasilinearForm};
use ordpde::{Error, Grid};
use rayon::prelude::*;

use crate::output::{grid_csv, oracle_report, sample_term, solve_report, SolveSummary};
use crate::spec::{ProblemSpec, SpecError};
use crate::svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_DELTA: i32 = 4;
pub const EXIT_NOT_QUASILINEAR: i32 = 5;

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub out: Option<PathBuf>,
    pub svg: bool,
    pub grid: Option<(usize, usize)>,
}

fn load(path: &Path, diag: &mut dyn Write) -> Option<ProblemSpec> {
    match ProblemSpec::read(path) {
        Ok(s) => Some(s),
        Err(e) => {
            let _ = writeln!(diag, "error: {}: {e}", path.display());
            None
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), SpecError> {
    fs::write(path, contents).map_err(|source| SpecError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn solve(spec_path: &Path, opts: &SolveOptions, diag: &mut dyn Write) -> i32 {
    let Some(mut spec) = load(spec_path, diag) else {
        return EXIT_CONFIG;
    };
    if let Some(out) = &opts.out {
        spec.out = out.clone();
    }
    if let Some((nx, ny)) = opts.grid {
        if nx < 2 || ny < 2 {
            let _ = writeln!(diag, "error: --grid needs at least 2 cells per axis");
            return EXIT_CONFIG;
        }
        spec.nx = nx;
        spec.ny = ny;
    }
    let problem = match spec.problem() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let sequence = match build_sequence(&problem, spec.n_terms, &spec.solver_config()) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            return EXIT_CONFIG;
        }
    };

    let rows = decay_rows(&sequence.terms);
    let ae = if sequence.terms.is_empty() {
        None
    } else {
        match sequence.residual_ae_verdict() {
            Ok(v) => Some(v),
            Err(e) => {
                let _ = writeln!(diag, "warning: a.e. check skipped: {e}");
                None
            }
        }
    };
    let fields: Vec<_> = sequence
        .terms
        .par_iter()
        .map(|t| sample_term(t).map(|u| (t.n, grid_csv(&u), grid_csv(&t.residual), u)))
        .collect();

    let written = (|| -> Result<(), SpecError> {
        fs::create_dir_all(&spec.out).map_err(|source| SpecError::Io {
            path: spec.out.clone(),
            source,
        })?;
        for (t, f) in sequence.terms.iter().zip(&fields) {
            let (n, u_csv, r_csv, _) = match f {
                Ok(v) => v,
                Err(e) => {
                    let _ = writeln!(diag, "error: n = {}: cannot sample u_n: {e}", t.n);
                    continue;
                }
            };
            write_file(&spec.out.join(format!("u_{n}.csv")), u_csv)?;
            write_file(&spec.out.join(format!("residual_{n}.csv")), r_csv)?;
            write_file(&spec.out.join(format!("tiling_{n}.txt")), &t.u.tiling().to_table())?;
        }
        write_file(&spec.out.join("decay.csv"), &decay_csv(&rows))?;
        let summary = SolveSummary {
            spec: &spec,
            sequence: &sequence,
            rows: &rows,
            ae: ae.as_ref(),
        };
        write_file(&spec.out.join("report.txt"), &solve_report(&summary))?;
        if opts.svg {
            if let (Some(t), Some(Ok((n, _, _, u)))) = (sequence.terms.last(), fields.last()) {
                let title = format!("u_{n}");
                write_file(
                    &spec.out.join(format!("u_{n}.svg")),
                    &svg::heat_map(u, t.u.tiling(), &title),
                )?;
            }
            write_file(&spec.out.join("decay.svg"), &svg::decay_plot(&rows))?;
        }
        Ok(())
    })();
    if let Err(e) = written {
        let _ = writeln!(diag, "error: {e}");
        return EXIT_CONFIG;
    }

    for f in &sequence.failures {
        let _ = writeln!(diag, "error: n = {}: {}", f.n, f.error);
    }
    if sequence
        .failures
        .iter()
        .any(|f| matches!(f.error, Error::DeltaExhausted { .. }))
    {
        return EXIT_DELTA;
    }
    if !sequence.failures.is_empty() || fields.iter().any(Result::is_err) {
        return EXIT_CONFIG;
    }
    let mut code = EXIT_OK;
    for t in &sequence.terms {
        if !t.report.satisfies_band(t.epsilon) {
            let _ = writeln!(diag, "error: n = {}: residual leaves (-eps_n, 0]", t.n);
            code = EXIT_FAIL;
        }
        if !(t.report.trace_error_max <= ordpde::convergence::TRACE_TOL) {
            let _ = writeln!(diag, "error: n = {}: trace error {:.3e}", t.n, t.report.trace_error_max);
            code = EXIT_FAIL;
        }
    }
    code
}

fn append(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
    if f.metadata()?.len() > 0 {
        f.write_all(b"\n")?;
    }
    f.write_all(contents.as_bytes())
}

pub fn compare(spec_path: &Path, diag: &mut dyn Write) -> i32 {
    let Some(spec) = load(spec_path, diag) else {
        return EXIT_CONFIG;
    };
    let problem = match spec.problem() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let form = match QuasilinearForm::from_flux(&problem.flux) {
        Ok(q) => q,
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            return EXIT_NOT_QUASILINEAR;
        }
    };
    if spec.ny % 2 != 0 {
        let _ = writeln!(diag, "error: compare needs an even ny so that y = 0 is a grid row");
        return EXIT_CONFIG;
    }
    let grid = match Grid::new(spec.domain(), spec.nx, spec.ny) {
        Ok(g) => g,
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let y_max = spec.y_max.unwrap_or(spec.b);
    let oracle = match characteristics_solve(&form, &problem.initial, &grid, y_max) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            return EXIT_FAIL;
        }
    };
    let check = match consistency_check(&oracle.field, &oracle.valid_rows, &problem) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            return EXIT_FAIL;
        }
    };
    let refused = [oracle.shock, oracle.shock_below.map(f64::abs)]
        .into_iter()
        .flatten()
        .filter(|y| *y <= y_max)
        .reduce(f64::min);
    let text = oracle_report(&spec, y_max, &oracle, &check, refused);
    if let Err(e) = append(&spec.out.join("report.txt"), &text) {
        let _ = writeln!(diag, "error: {}: {e}", spec.out.display());
        return EXIT_CONFIG;
    }
    if let Some(y) = refused {
        let _ = writeln!(
            diag,
            "refused: characteristics cross at |y| = {y:.6e} inside |y| <= {y_max}; set y_max below it"
        );
        return EXIT_FAIL;
    }
    if check.passes() {
        EXIT_OK
    } else {
        let _ = writeln!(
            diag,
            "error: consistency check failed (residual {:.3e} vs {:.3e}, trace {:.3e})",
            check.residual_max_abs, check.residual_tol, check.trace_error
        );
        EXIT_FAIL
    }
}

pub fn check(spec_path: &Path, out: &mut dyn Write, diag: &mut dyn Write) -> i32 {
    let Some(spec) = load(spec_path, diag) else {
        return EXIT_CONFIG;
    };
    let problem = match spec.problem() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let quasilinear = QuasilinearForm::from_flux(&problem.flux).is_ok();
    let _ = writeln!(out, "F = {}", problem.flux);
    let _ = writeln!(out, "f = {}", problem.initial);
    let _ = writeln!(out, "f' = {}", problem.initial_prime);
    let _ = writeln!(out, "domain = [-{}, {}] x [-{}, {}]", spec.a, spec.a, spec.b, spec.b);
    let _ = writeln!(out, "N = {}, grid = {} x {}", spec.n_terms, spec.nx, spec.ny);
    let _ = writeln!(out, "quasilinear = {}", if quasilinear { "yes" } else { "no" });
    EXIT_OK
}

/// Sizes the global pool from `ORDPDE_THREADS` (unset or 0: one per core).
pub fn configure_threads(value: Option<&str>) -> Result<(), String> {
    let n = match value.map(str::trim) {
        None | Some("") => 0,
        Some(v) => v
            .parse::<usize>()
            .map_err(|_| format!("ORDPDE_THREADS must be a non-negative integer, found '{v}'"))?,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}
