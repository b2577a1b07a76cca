//! Independent oracles shared by the integration tests. Nothing here calls
//! into the code it is used to check.

#![allow(dead_code)]

use ordpde::{ExtReal, GridFn, TiledFn, Tiles};
use rand::Rng;

/// Naive square-window min (`lower`) or max over the clipped stencil.
pub fn brute_envelope(v: &GridFn, radius: usize, lower: bool) -> Vec<ExtReal> {
    let g = v.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = Vec::with_capacity(v.values().len());
    for j in 0..=ny {
        for i in 0..=nx {
            let mut acc: Option<ExtReal> = None;
            for jj in j.saturating_sub(radius)..=(j + radius).min(ny) {
                for ii in i.saturating_sub(radius)..=(i + radius).min(nx) {
                    let w = v.get(ii, jj);
                    acc = Some(match acc {
                        None => w,
                        Some(a) if lower => {
                            if w < a {
                                w
                            } else {
                                a
                            }
                        }
                        Some(a) => {
                            if w > a {
                                w
                            } else {
                                a
                            }
                        }
                    });
                }
            }
            out.push(acc.unwrap());
        }
    }
    out
}

/// Random field: mostly finite values in [-1, 1], with the given share of
/// each infinity.
pub fn random_field(rng: &mut impl Rng, grid: ordpde::Grid, inf_rate: f64) -> GridFn {
    let values = (0..grid.node_count())
        .map(|_| {
            let r: f64 = rng.gen();
            if r < inf_rate {
                ExtReal::NegInf
            } else if r < 2.0 * inf_rate {
                ExtReal::PosInf
            } else {
                ExtReal::Finite(rng.gen_range(-1.0..1.0))
            }
        })
        .collect();
    GridFn::new(grid, values).unwrap()
}

pub type NativeFlux = fn(f64, f64, f64, f64) -> f64;

/// The acceptance fluxes: DSL text and the same function written natively.
pub const FLUXES: [(&str, NativeFlux); 4] = [
    ("p", |_, _, _, p| p),
    ("u", |_, _, u, _| u),
    ("u*p", |_, _, u, p| u * p),
    ("p^2 + u", |_, _, u, p| p * p + u),
];

pub type NativeInitial = fn(f64) -> f64;

/// The acceptance initial data, DSL text and native.
pub const INITIALS: [(&str, NativeInitial); 3] = [("0", |_| 0.0), ("sin(x)", f64::sin), ("x^2/4", |x| x * x / 4.0)];

/// Closed tiles containing the point, by direct comparison.
pub fn owners(tiling: &Tiles, x: f64, y: f64) -> Vec<usize> {
    tiling
        .tiles()
        .iter()
        .enumerate()
        .filter(|(_, t)| t.x_lo <= x && x <= t.x_hi && t.y_lo <= y && y <= t.y_hi)
        .map(|(i, _)| i)
        .collect()
}

/// Value of `u` with the minimum taken over every tile touching the point.
pub fn oracle_value(u: &TiledFn, x: f64, y: f64) -> f64 {
    owners(u.tiling(), x, y)
        .into_iter()
        .map(|i| u.pieces()[i].value(x, y).unwrap())
        .fold(f64::INFINITY, f64::min)
}

/// `min` over touching tiles of `D_y u + F(x, y, u, D_x u)` for each piece.
pub fn oracle_residual(u: &TiledFn, flux: NativeFlux, x: f64, y: f64) -> f64 {
    owners(u.tiling(), x, y)
        .into_iter()
        .map(|i| {
            let piece = &u.pieces()[i];
            let v = piece.value(x, y).unwrap();
            let (ux, uy) = piece.partials(x, y).unwrap();
            uy + flux(x, y, v, ux)
        })
        .fold(f64::INFINITY, f64::min)
}

/// `(I . S) v (p)` by brute force: a cloud of spacing `s` offset by
/// `(ox, oy)` cells so that no cloud point lies on the lines through `p`,
/// Chebyshev balls of radius 4s, 3s, 2.02s, 1.01s. `v` gives values off
/// the singular set. Returns the inf over the smallest ball after checking
/// the infima settle.
pub fn interface_brute(v: impl Fn(f64, f64) -> f64, p: (f64, f64), s: f64, offset: (f64, f64)) -> f64 {
    let reach = 5i32;
    let cloud: Vec<(f64, f64, f64)> = (-reach..reach)
        .flat_map(|j| (-reach..reach).map(move |i| (i, j)))
        .map(|(i, j)| {
            let dx = s * (f64::from(i) + offset.0);
            let dy = s * (f64::from(j) + offset.1);
            (dx, dy, v(p.0 + dx, p.1 + dy))
        })
        .collect();
    let infs: Vec<f64> = [4.0, 3.0, 2.02, 1.01]
        .iter()
        .map(|r| {
            cloud
                .iter()
                .filter(|(dx, dy, _)| dx.abs().max(dy.abs()) <= r * s)
                .map(|c| c.2)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    assert!(
        infs.windows(2).all(|w| w[0] <= w[1]),
        "infima over shrinking balls must not decrease"
    );
    *infs.last().unwrap()
}
