//! Classical reference solutions for quasilinear problems: the method of
//! characteristics and a finite-difference consistency check.
//!
//! For `D_y u + A(x, y, u) D_x u = B(x, y, u)` the characteristics solve
//! `dx/dy = A`, `du/dy = B` from `(x0, 0, f(x0))`. They are advanced with
//! classical RK4 onto every grid row and resampled onto the grid nodes by
//! cubic Lagrange interpolation over the four nearest characteristics.

use rayon::prelude::*;

use crate::baire::GridFunction;
use crate::error::{Error, Result};
use crate::expr::{Env, Expr, UnaryOp, Var};
use crate::ext_real::ExtendedReal;
use crate::geometry::SampleGrid;
use crate::problem::Problem;
use crate::scalar::Scalar;

/// `F = A(x, y, u) p - B(x, y, u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasilinearForm {
    pub a: Expr,
    pub b: Expr,
}

fn zero_p(e: &Expr) -> Expr {
    match e {
        Expr::Var(Var::P) => Expr::Const(0.0),
        Expr::Const(_) | Expr::Var(_) => e.clone(),
        Expr::Unary(op, a) => Expr::unary(*op, zero_p(a)),
        Expr::Binary(op, l, r) => Expr::binary(*op, zero_p(l), zero_p(r)),
    }
}

impl QuasilinearForm {
    /// Recognizes `F` as affine in `p`: `dF/dp` must be free of `p`.
    pub fn from_flux(flux: &Expr) -> Result<Self> {
        let a = flux
            .differentiate(Var::P)
            .map_err(|e| Error::NotQuasilinear(e.to_string()))?;
        if a.depends_on(Var::P) {
            return Err(Error::NotQuasilinear(format!("dF/dp = {a} depends on p")));
        }
        let b = Expr::unary(UnaryOp::Neg, zero_p(flux));
        Ok(Self { a, b })
    }

    pub fn new(a: Expr, b: Expr) -> Result<Self> {
        if a.depends_on(Var::P) || b.depends_on(Var::P) {
            return Err(Error::NotQuasilinear("A and B may not depend on p".into()));
        }
        Ok(Self { a, b })
    }

    pub fn flux(&self) -> Expr {
        use crate::expr::BinaryOp;
        Expr::binary(
            BinaryOp::Sub,
            Expr::binary(BinaryOp::Mul, self.a.clone(), Expr::var(Var::P)),
            self.b.clone(),
        )
    }

    fn rhs<T: Scalar>(&self, x: T, y: T, u: T) -> Result<(T, T)> {
        let env = Env::new(x, y, u, T::zero());
        Ok((self.a.eval(&env)?, self.b.eval(&env)?))
    }
}

/// Oracle field on the grid. Rows outside `|y| <= y_max`, past the shock,
/// or not spanned by the characteristics hold `-inf` and are marked invalid.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution<T> {
    pub field: GridFunction<T>,
    pub valid_rows: Vec<bool>,
    /// First `y > 0` at which neighbouring characteristics cross.
    pub shock: Option<T>,
    /// Same for `y < 0`.
    pub shock_below: Option<T>,
}

fn rk4_step<T: Scalar>(q: &QuasilinearForm, x: T, y: T, u: T, h: T) -> Result<(T, T)> {
    let half = T::lit(0.5) * h;
    let (k1x, k1u) = q.rhs(x, y, u)?;
    let (k2x, k2u) = q.rhs(x + half * k1x, y + half, u + half * k1u)?;
    let (k3x, k3u) = q.rhs(x + half * k2x, y + half, u + half * k2u)?;
    let (k4x, k4u) = q.rhs(x + h * k3x, y + h, u + h * k3u)?;
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    Ok((
        x + sixth * (k1x + two * k2x + two * k3x + k4x),
        u + sixth * (k1u + two * k2u + two * k3u + k4u),
    ))
}

/// Positions and values of one characteristic at each target `y`.
fn trace_characteristic<T: Scalar>(q: &QuasilinearForm, x0: T, u0: T, targets: &[T]) -> Result<Vec<(T, T)>> {
    let (mut x, mut u, mut y) = (x0, u0, T::zero());
    let mut out = Vec::with_capacity(targets.len());
    for &t in targets {
        let (nx, nu) = rk4_step(q, x, y, u, t - y).map_err(|e| Error::Integrator {
            y: y.to_f64_lossless(),
            x0: x0.to_f64_lossless(),
            reason: e.to_string(),
        })?;
        if !(nx.is_finite() && nu.is_finite()) {
            return Err(Error::Integrator {
                y: t.to_f64_lossless(),
                x0: x0.to_f64_lossless(),
                reason: "non-finite state".into(),
            });
        }
        (x, u, y) = (nx, nu, t);
        out.push((x, u));
    }
    Ok(out)
}

/// Cubic Lagrange interpolation at `x` over the four characteristics
/// nearest to it (positions ascending).
fn resample<T: Scalar>(xs: &[T], us: &[T], x: T) -> Option<T> {
    let n = xs.len();
    if n < 4 || x < xs[0] || x > xs[n - 1] {
        return None;
    }
    let k = xs.partition_point(|&v| v < x);
    if k < n && xs[k] == x {
        return Some(us[k]);
    }
    let lo = k.saturating_sub(2).min(n - 4);
    let (px, pu) = (&xs[lo..lo + 4], &us[lo..lo + 4]);
    let mut acc = T::zero();
    for i in 0..4 {
        let mut l = T::one();
        for m in 0..4 {
            if m != i {
                l = l * (x - px[m]) / (px[i] - px[m]);
            }
        }
        acc = acc + l * pu[i];
    }
    Some(acc)
}

/// One side (`y > 0` or `y < 0`) of the integration.
struct Sweep<T> {
    rows: Vec<usize>,
    ys: Vec<T>,
}

fn sweep<T: Scalar>(grid: &SampleGrid<T>, y_max: T, above: bool) -> Sweep<T> {
    let mut rows: Vec<usize> = (0..=grid.ny())
        .filter(|&j| {
            let y = grid.y(j);
            (if above { y > T::zero() } else { y < T::zero() }) && y.abs() <= y_max * (T::one() + T::snap_tol())
        })
        .collect();
    rows.sort_by(|&i, &j| grid.y(i).abs().partial_cmp(&grid.y(j).abs()).unwrap());
    let ys = rows.iter().map(|&j| grid.y(j)).collect();
    Sweep { rows, ys }
}

/// Crossing `y` of the first adjacent pair whose order inverts between
/// consecutive rows, by linear interpolation of the gap.
fn first_crossing<T: Scalar>(feet: &[T], paths: &[Vec<(T, T)>], ys: &[T]) -> Option<(usize, T)> {
    let mut prev: Vec<T> = feet.to_vec();
    let mut y_prev = T::zero();
    for (r, &y) in ys.iter().enumerate() {
        let cur: Vec<T> = paths.iter().map(|p| p[r].0).collect();
        let mut best: Option<T> = None;
        for k in 0..cur.len() - 1 {
            let (g0, g1) = (prev[k + 1] - prev[k], cur[k + 1] - cur[k]);
            if g1 <= T::zero() && g0 > T::zero() {
                let s = y_prev + (y - y_prev) * (g0 / (g0 - g1));
                best = Some(best.map_or(s, |b: T| if s.abs() < b.abs() { s } else { b }));
            }
        }
        if let Some(s) = best {
            return Some((r, s));
        }
        prev = cur;
        y_prev = y;
    }
    None
}

/// Integrates the characteristics from `y = 0` out to `|y| <= y_max`.
pub fn characteristics_solve<T: Scalar>(
    q: &QuasilinearForm,
    f: &Expr,
    grid: &SampleGrid<T>,
    y_max: T,
) -> Result<OracleSolution<T>> {
    let b = grid.domain().b();
    if !(y_max >= T::zero() && y_max <= b) {
        return Err(Error::InvalidArgument(format!(
            "y_max must lie in [0, {b}], got {y_max}"
        )));
    }
    let hx = grid.hx();
    // Feet span the grid's x-nodes plus a margin covering the initial drift.
    let mut drift = T::zero();
    for x in grid.xs() {
        let (a, _) = q.rhs(x, T::zero(), f.eval(&Env::at_x(x))?)?;
        drift = drift.max(a.abs());
    }
    let pad = ((drift * y_max * T::lit(1.5)) / hx).ceil().to_usize().unwrap_or(0) + 4;
    let feet: Vec<T> = (0..grid.nx() + 1 + 2 * pad)
        .map(|k| {
            if k < pad {
                grid.x(0) - T::from_usize_exact(pad - k) * hx
            } else if k - pad <= grid.nx() {
                grid.x(k - pad)
            } else {
                grid.x(grid.nx()) + T::from_usize_exact(k - pad - grid.nx()) * hx
            }
        })
        .collect();
    let u0: Vec<T> = feet
        .iter()
        .map(|&x| Ok(f.eval(&Env::at_x(x))?))
        .collect::<Result<_>>()?;

    let mut values = vec![ExtendedReal::NegInf; grid.node_count()];
    let mut valid_rows = vec![false; grid.ny() + 1];
    if let Some(j0) = (0..=grid.ny()).find(|&j| grid.y(j) == T::zero()) {
        for i in 0..=grid.nx() {
            values[grid.index(i, j0)] = ExtendedReal::new(u0[i + pad])?;
        }
        valid_rows[j0] = true;
    }

    let mut shocks = [None, None];
    for (side, above) in [true, false].into_iter().enumerate() {
        let sw = sweep(grid, y_max, above);
        if sw.rows.is_empty() {
            continue;
        }
        let paths = feet
            .par_iter()
            .zip(&u0)
            .map(|(&x0, &u)| trace_characteristic(q, x0, u, &sw.ys))
            .collect::<Result<Vec<_>>>()?;
        let crossing = first_crossing(&feet, &paths, &sw.ys);
        shocks[side] = crossing.map(|(_, y)| y);
        let good_rows = crossing.map_or(sw.rows.len(), |(r, _)| r);
        for (r, &j) in sw.rows.iter().enumerate().take(good_rows) {
            let xs: Vec<T> = paths.iter().map(|p| p[r].0).collect();
            let us: Vec<T> = paths.iter().map(|p| p[r].1).collect();
            let row: Option<Vec<T>> = (0..=grid.nx()).map(|i| resample(&xs, &us, grid.x(i))).collect();
            if let Some(row) = row {
                for (i, v) in row.into_iter().enumerate() {
                    values[grid.index(i, j)] = ExtendedReal::new(v)?;
                }
                valid_rows[j] = true;
            }
        }
    }
    Ok(OracleSolution {
        field: GridFunction::new(grid.clone(), values)?,
        valid_rows,
        shock: shocks[0],
        shock_below: shocks[1],
    })
}

/// Result of [`consistency_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyReport<T> {
    /// Max `|D_y u + F(x, y, u, D_x u)|` by central differences over interior
    /// nodes whose stencil rows are valid.
    pub residual_max_abs: T,
    pub residual_tol: T,
    /// Max `|u(x, 0) - f(x)|`.
    pub trace_error: T,
    pub trace_tol: T,
    pub checked_nodes: usize,
}

impl<T: Scalar> ConsistencyReport<T> {
    pub fn residual_ok(&self) -> bool {
        self.checked_nodes > 0 && self.residual_max_abs <= self.residual_tol
    }

    pub fn trace_ok(&self) -> bool {
        self.trace_error <= self.trace_tol
    }

    pub fn passes(&self) -> bool {
        self.residual_ok() && self.trace_ok()
    }
}

/// Default finite-difference tolerance `10 (hx + hy)`.
pub fn default_fd_tolerance<T: Scalar>(grid: &SampleGrid<T>) -> T {
    T::lit(10.0) * (grid.hx() + grid.hy())
}

/// Checks that a classical field has residual near 0 and trace `f`. Needs a
/// grid row at `y = 0` (even `ny`).
pub fn consistency_check<T: Scalar>(
    u: &GridFunction<T>,
    valid_rows: &[bool],
    problem: &Problem<T>,
) -> Result<ConsistencyReport<T>> {
    let grid = u.grid();
    if valid_rows.len() != grid.ny() + 1 {
        return Err(Error::GridMismatch);
    }
    let j0 = grid
        .zero_row()
        .ok_or_else(|| Error::InvalidArgument("consistency check needs an even ny".into()))?;
    let finite = |i: usize, j: usize| u.get(i, j).finite();
    let mut trace_error = T::zero();
    for i in 0..=grid.nx() {
        let f = problem.f(grid.x(i))?;
        trace_error = trace_error.max(finite(i, j0).map_or(T::infinity(), |v| (v - f).abs()));
    }
    let (hx2, hy2) = (T::lit(2.0) * grid.hx(), T::lit(2.0) * grid.hy());
    let rows: Vec<usize> = (1..grid.ny())
        .filter(|&j| valid_rows[j - 1] && valid_rows[j] && valid_rows[j + 1])
        .collect();
    let per_row = rows
        .par_iter()
        .map(|&j| {
            let mut worst = T::zero();
            for i in 1..grid.nx() {
                let (Some(c), Some(w), Some(e), Some(s), Some(n)) = (
                    finite(i, j),
                    finite(i - 1, j),
                    finite(i + 1, j),
                    finite(i, j - 1),
                    finite(i, j + 1),
                ) else {
                    return Ok(T::infinity());
                };
                let r = (n - s) / hy2 + problem.flux_at(grid.x(i), grid.y(j), c, (e - w) / hx2)?;
                worst = worst.max(r.abs());
            }
            Ok(worst)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(ConsistencyReport {
        residual_max_abs: per_row.into_iter().fold(T::zero(), T::max),
        residual_tol: default_fd_tolerance(grid),
        trace_error,
        trace_tol: T::lit(1e-9),
        checked_nodes: rows.len() * (grid.nx() - 1),
    })
}
