//! Finite initial adaptive delta-tilings of the closed domain.
//!
//! A tiling is a finite family of closed, non-degenerate axis-aligned boxes
//! with pairwise disjoint interiors covering the closed domain, such that
//! every box has per-coordinate extent strictly below `delta` and the
//! initial segment `y = 0` meets the union of tile boundaries in finitely
//! many points (no horizontal edge lies on `y = 0`).

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::{symmetric_node, Domain, SampleGrid};
use crate::scalar::Scalar;

/// A closed box `[x_lo, x_hi] x [y_lo, y_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TileBox<T> {
    pub x_lo: T,
    pub x_hi: T,
    pub y_lo: T,
    pub y_hi: T,
}

impl<T: Scalar> TileBox<T> {
    pub fn new(x_lo: T, x_hi: T, y_lo: T, y_hi: T) -> Self {
        Self { x_lo, x_hi, y_lo, y_hi }
    }

    pub fn center(&self) -> (T, T) {
        let half = T::lit(0.5);
        (half * (self.x_lo + self.x_hi), half * (self.y_lo + self.y_hi))
    }

    pub fn width(&self) -> T {
        self.x_hi - self.x_lo
    }

    pub fn height(&self) -> T {
        self.y_hi - self.y_lo
    }

    /// Closed containment, widened by `tol`.
    pub fn contains(&self, x: T, y: T, tol: T) -> bool {
        x >= self.x_lo - tol && x <= self.x_hi + tol && y >= self.y_lo - tol && y <= self.y_hi + tol
    }

    /// Whether `(x, y)` is on the box boundary (within `tol`).
    pub fn on_boundary(&self, x: T, y: T, tol: T) -> bool {
        self.contains(x, y, tol)
            && ((x - self.x_lo).abs() <= tol
                || (x - self.x_hi).abs() <= tol
                || (y - self.y_lo).abs() <= tol
                || (y - self.y_hi).abs() <= tol)
    }

    /// Whether the interior meets the line `y = 0`.
    pub fn meets_initial_line(&self) -> bool {
        self.y_lo < T::zero() && self.y_hi > T::zero()
    }
}

/// Edge coordinates of a rectilinear (product) tiling: tile `row * cols + col`
/// is `[x_edges[col], x_edges[col+1]] x [y_edges[row], y_edges[row+1]]`.
#[derive(Debug, Clone, PartialEq)]
struct Lattice<T> {
    x_edges: Vec<T>,
    y_edges: Vec<T>,
}

/// Indices `k` of intervals `[e[k], e[k+1]]` containing `v` (widened by `tol`).
fn interval_span<T: Scalar>(edges: &[T], v: T, tol: T) -> Option<(usize, usize)> {
    let n = edges.len() - 1;
    let first = edges.partition_point(|&e| e + tol < v);
    let lo = first.saturating_sub(1);
    let upto = edges.partition_point(|&e| e - tol <= v);
    if upto == 0 {
        return None;
    }
    let hi = (upto - 1).min(n - 1);
    (lo <= hi && v >= edges[0] - tol && v <= edges[n] + tol).then_some((lo, hi))
}

/// Distance from `v` to the nearest interior edge (excluding both ends).
fn interior_edge_distance<T: Scalar>(edges: &[T], v: T) -> T {
    let inner = &edges[1..edges.len() - 1];
    if inner.is_empty() {
        return T::infinity();
    }
    let k = inner.partition_point(|&e| e < v);
    let mut best = T::infinity();
    if k < inner.len() {
        best = best.min((inner[k] - v).abs());
    }
    if k > 0 {
        best = best.min((v - inner[k - 1]).abs());
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tiling<T> {
    domain: Domain<T>,
    delta: T,
    tiles: Vec<TileBox<T>>,
    initial_row: Vec<usize>,
    lattice: Option<Lattice<T>>,
}

/// Uniform FIAD tiling with tile sides at most `delta / 2`.
///
/// The number of rows is odd so the middle row is centred on `y = 0` and
/// the initial line crosses only that row's vertical edges.
pub fn build_fiad_tiling<T: Scalar>(domain: Domain<T>, delta: T) -> Result<Tiling<T>> {
    if !(delta > T::zero() && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let side = delta * T::lit(0.5);
    let count = |extent: T, odd: bool| -> Result<usize> {
        let raw = (extent / side).ceil();
        let mut n = raw
            .to_usize()
            .filter(|&n| n <= 1 << 24)
            .ok_or_else(|| Error::InvalidArgument(format!("delta {delta} too small")))?
            .max(1);
        while extent / T::from_usize_exact(n) > side {
            n += 1;
        }
        if odd && n % 2 == 0 {
            n += 1;
        }
        Ok(n)
    };
    let cols = count(T::lit(2.0) * domain.a(), false)?;
    let rows = count(T::lit(2.0) * domain.b(), true)?;
    let x_edges = (0..=cols).map(|i| symmetric_node(domain.a(), i, cols)).collect();
    let y_edges = (0..=rows).map(|j| symmetric_node(domain.b(), j, rows)).collect();
    Tiling::from_edges(domain, delta, x_edges, y_edges)
}

impl<T: Scalar> Tiling<T> {
    /// Product tiling from strictly increasing edge lists spanning the domain.
    pub fn from_edges(domain: Domain<T>, delta: T, x_edges: Vec<T>, y_edges: Vec<T>) -> Result<Self> {
        let increasing = |e: &[T]| e.len() >= 2 && e.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&x_edges) || !increasing(&y_edges) {
            return Err(Error::InvalidArgument(
                "tile edges must be strictly increasing with at least one interval".into(),
            ));
        }
        let mut tiles = Vec::with_capacity((x_edges.len() - 1) * (y_edges.len() - 1));
        for yw in y_edges.windows(2) {
            for xw in x_edges.windows(2) {
                tiles.push(TileBox::new(xw[0], xw[1], yw[0], yw[1]));
            }
        }
        let mut t = Self::from_boxes(domain, delta, tiles);
        t.lattice = Some(Lattice { x_edges, y_edges });
        Ok(t)
    }

    /// General tiling from an arbitrary box list. Validity is not checked;
    /// see [`verify_tiling`].
    pub fn from_boxes(domain: Domain<T>, delta: T, tiles: Vec<TileBox<T>>) -> Self {
        let initial_row = tiles
            .iter()
            .enumerate()
            .filter(|(_, t)| t.meets_initial_line())
            .map(|(i, _)| i)
            .collect();
        Self {
            domain,
            delta,
            tiles,
            initial_row,
            lattice: None,
        }
    }

    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn tiles(&self) -> &[TileBox<T>] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// Indices of tiles whose interior meets `y = 0`.
    pub fn initial_row(&self) -> &[usize] {
        &self.initial_row
    }

    pub fn is_initial(&self, index: usize) -> bool {
        self.initial_row.binary_search(&index).is_ok()
    }

    /// `(columns, rows)` for product tilings.
    pub fn shape(&self) -> Option<(usize, usize)> {
        self.lattice
            .as_ref()
            .map(|l| (l.x_edges.len() - 1, l.y_edges.len() - 1))
    }

    /// All tiles whose closed box contains the point, up to the snap tolerance.
    pub fn containing(&self, x: T, y: T) -> Vec<usize> {
        let tol = T::snap_tol();
        match &self.lattice {
            Some(l) => {
                let (Some((c0, c1)), Some((r0, r1))) =
                    (interval_span(&l.x_edges, x, tol), interval_span(&l.y_edges, y, tol))
                else {
                    return Vec::new();
                };
                let cols = l.x_edges.len() - 1;
                let mut out = Vec::with_capacity(4);
                for r in r0..=r1 {
                    for c in c0..=c1 {
                        out.push(r * cols + c);
                    }
                }
                out
            }
            None => self
                .tiles
                .iter()
                .enumerate()
                .filter(|(_, t)| t.contains(x, y, tol))
                .map(|(i, _)| i)
                .collect(),
        }
    }

    /// Tiles touching a point of the boundary skeleton `U dK_i`: two along
    /// an edge, up to four at a corner, one on the domain boundary.
    pub fn adjacency(&self, x: T, y: T) -> Result<Vec<usize>> {
        let hits = self.containing(x, y);
        let tol = T::snap_tol();
        if hits.iter().any(|&i| self.tiles[i].on_boundary(x, y, tol)) {
            Ok(hits)
        } else {
            Err(Error::NotOnSkeleton {
                x: x.to_f64_lossless(),
                y: y.to_f64_lossless(),
            })
        }
    }

    /// Whether the point lies on the singular set: shared by two or more tiles.
    pub fn on_gamma(&self, x: T, y: T) -> bool {
        self.containing(x, y).len() >= 2
    }

    /// Flags grid nodes lying within one cell (strictly) of an interior tile edge.
    pub fn gamma_marked(&self, grid: &SampleGrid<T>) -> Vec<bool> {
        let (hx, hy) = (grid.hx(), grid.hy());
        match &self.lattice {
            Some(l) => {
                let col_hit: Vec<bool> = grid
                    .xs()
                    .into_iter()
                    .map(|x| interior_edge_distance(&l.x_edges, x) < hx)
                    .collect();
                let row_hit: Vec<bool> = grid
                    .ys()
                    .into_iter()
                    .map(|y| interior_edge_distance(&l.y_edges, y) < hy)
                    .collect();
                (0..grid.node_count())
                    .map(|k| {
                        let (i, j) = grid.ij(k);
                        col_hit[i] || row_hit[j]
                    })
                    .collect()
            }
            None => {
                let segs = self.interior_segments();
                grid.nodes()
                    .map(|(x, y)| {
                        segs.iter().any(|s| match *s {
                            Segment::Vertical { x: e, lo, hi } => (x - e).abs() < hx && y > lo - hy && y < hi + hy,
                            Segment::Horizontal { y: e, lo, hi } => (y - e).abs() < hy && x > lo - hx && x < hi + hx,
                        })
                    })
                    .collect()
            }
        }
    }

    /// Fraction of grid nodes within one cell of the singular set.
    pub fn gamma_fraction(&self, grid: &SampleGrid<T>) -> T {
        let marked = self.gamma_marked(grid).iter().filter(|&&m| m).count();
        T::from_usize_exact(marked) / T::from_usize_exact(grid.node_count())
    }

    /// Number of grid cells the interior skeleton passes along (its length in cells).
    pub fn skeleton_cells(&self, grid: &SampleGrid<T>) -> T {
        let (hx, hy) = (grid.hx(), grid.hy());
        self.interior_segments()
            .iter()
            .map(|s| match *s {
                Segment::Vertical { lo, hi, .. } => (hi - lo) / hy,
                Segment::Horizontal { lo, hi, .. } => (hi - lo) / hx,
            })
            .sum()
    }

    /// Tile sides not on the domain boundary, deduplicated for product tilings.
    fn interior_segments(&self) -> Vec<Segment<T>> {
        let tol = T::snap_tol();
        let (a, b) = (self.domain.a(), self.domain.b());
        if let Some(l) = &self.lattice {
            let (y0, y1) = (l.y_edges[0], *l.y_edges.last().unwrap());
            let (x0, x1) = (l.x_edges[0], *l.x_edges.last().unwrap());
            let mut out: Vec<Segment<T>> = l.x_edges[1..l.x_edges.len() - 1]
                .iter()
                .map(|&x| Segment::Vertical { x, lo: y0, hi: y1 })
                .collect();
            out.extend(
                l.y_edges[1..l.y_edges.len() - 1]
                    .iter()
                    .map(|&y| Segment::Horizontal { y, lo: x0, hi: x1 }),
            );
            return out;
        }
        let mut out = Vec::new();
        for t in &self.tiles {
            for x in [t.x_lo, t.x_hi] {
                if (x.abs() - a).abs() > tol {
                    out.push(Segment::Vertical {
                        x,
                        lo: t.y_lo,
                        hi: t.y_hi,
                    });
                }
            }
            for y in [t.y_lo, t.y_hi] {
                if (y.abs() - b).abs() > tol {
                    out.push(Segment::Horizontal {
                        y,
                        lo: t.x_lo,
                        hi: t.x_hi,
                    });
                }
            }
        }
        out
    }

    /// Points where `y = 0` meets the tile boundaries, sorted.
    pub fn initial_line_crossings(&self) -> Vec<T> {
        let mut xs: Vec<T> = self
            .tiles
            .iter()
            .filter(|t| t.y_lo <= T::zero() && t.y_hi >= T::zero())
            .flat_map(|t| [t.x_lo, t.x_hi])
            .collect();
        xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
        xs.dedup();
        xs
    }

    /// Plain-text table: `index x_lo x_hi y_lo y_hi`, one tile per line.
    pub fn to_table(&self) -> String {
        let mut s = String::from("# tile x_lo x_hi y_lo y_hi\n");
        for (i, t) in self.tiles.iter().enumerate() {
            let _ = writeln!(
                s,
                "{i} {:.17e} {:.17e} {:.17e} {:.17e}",
                t.x_lo.to_f64_lossless(),
                t.x_hi.to_f64_lossless(),
                t.y_lo.to_f64_lossless(),
                t.y_hi.to_f64_lossless()
            );
        }
        s
    }
}

#[derive(Debug, Clone, Copy)]
enum Segment<T> {
    Vertical { x: T, lo: T, hi: T },
    Horizontal { y: T, lo: T, hi: T },
}

/// A violated tiling condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Box with empty interior.
    Degenerate {
        tile: usize,
    },
    /// Extent in x (axis 0) or y (axis 1) is not strictly below delta.
    ExtentNotBelowDelta {
        tile: usize,
        axis: u8,
    },
    OverlappingInteriors {
        first: usize,
        second: usize,
    },
    OutsideDomain {
        tile: usize,
    },
    /// Boxes inside the domain with disjoint interiors fail to cover it.
    IncompleteCover,
    /// A horizontal edge lies on `y = 0`, so the initial line meets the
    /// skeleton in a segment.
    InitialLineOnEdge {
        tile: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Degenerate { tile } => write!(f, "tile {tile} is degenerate"),
            Violation::ExtentNotBelowDelta { tile, axis } => {
                let a = if *axis == 0 { 'x' } else { 'y' };
                write!(f, "tile {tile}: {a}-extent is not < delta")
            }
            Violation::OverlappingInteriors { first, second } => {
                write!(f, "tiles {first} and {second} have overlapping interiors")
            }
            Violation::OutsideDomain { tile } => write!(f, "tile {tile} leaves the domain"),
            Violation::IncompleteCover => f.write_str("tiles do not cover the domain"),
            Violation::InitialLineOnEdge { tile } => {
                write!(f, "tile {tile} has a horizontal edge on y = 0")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TilingCheck {
    pub violations: Vec<Violation>,
}

impl TilingCheck {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn exact<T: Scalar>(v: T) -> BigRational {
    BigRational::from_float(v.to_f64_lossless()).expect("finite coordinate")
}

struct ExactBox {
    x_lo: BigRational,
    x_hi: BigRational,
    y_lo: BigRational,
    y_hi: BigRational,
}

/// Checks every tiling condition in exact rational arithmetic.
pub fn verify_tiling<T: Scalar>(t: &Tiling<T>) -> TilingCheck {
    let mut violations = Vec::new();
    let delta = exact(t.delta);
    let (a, b) = (exact(t.domain.a()), exact(t.domain.b()));
    let zero = BigRational::zero();
    let boxes: Vec<ExactBox> = t
        .tiles
        .iter()
        .map(|b| ExactBox {
            x_lo: exact(b.x_lo),
            x_hi: exact(b.x_hi),
            y_lo: exact(b.y_lo),
            y_hi: exact(b.y_hi),
        })
        .collect();

    let mut area = BigRational::zero();
    for (i, bx) in boxes.iter().enumerate() {
        if bx.x_lo >= bx.x_hi || bx.y_lo >= bx.y_hi {
            violations.push(Violation::Degenerate { tile: i });
            continue;
        }
        let (w, h) = (&bx.x_hi - &bx.x_lo, &bx.y_hi - &bx.y_lo);
        if w >= delta {
            violations.push(Violation::ExtentNotBelowDelta { tile: i, axis: 0 });
        }
        if h >= delta {
            violations.push(Violation::ExtentNotBelowDelta { tile: i, axis: 1 });
        }
        if bx.x_lo < -a.clone() || bx.x_hi > a || bx.y_lo < -b.clone() || bx.y_hi > b {
            violations.push(Violation::OutsideDomain { tile: i });
        }
        if bx.y_lo == zero || bx.y_hi == zero {
            violations.push(Violation::InitialLineOnEdge { tile: i });
        }
        area += w * h;
    }

    // Sweep in x so only boxes with overlapping x-ranges are compared.
    let mut order: Vec<usize> = (0..boxes.len())
        .filter(|&i| boxes[i].x_lo < boxes[i].x_hi && boxes[i].y_lo < boxes[i].y_hi)
        .collect();
    order.sort_by(|&p, &q| boxes[p].x_lo.cmp(&boxes[q].x_lo));
    let mut overlapping = false;
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if boxes[j].x_lo >= boxes[i].x_hi {
                break;
            }
            if boxes[j].y_lo < boxes[i].y_hi && boxes[i].y_lo < boxes[j].y_hi {
                overlapping = true;
                violations.push(Violation::OverlappingInteriors {
                    first: i.min(j),
                    second: i.max(j),
                });
            }
        }
    }

    // Closed boxes inside the closed domain with disjoint interiors cover it
    // exactly when their areas add up to the domain's.
    let full = BigRational::from_integer(BigInt::from(4)) * &a * &b;
    if !overlapping && area != full {
        violations.push(Violation::IncompleteCover);
    }
    TilingCheck { violations }
}

/// Exact area sum of the tiles.
pub fn exact_area<T: Scalar>(t: &Tiling<T>) -> BigRational {
    t.tiles
        .iter()
        .map(|b| (exact(b.x_hi) - exact(b.x_lo)) * (exact(b.y_hi) - exact(b.y_lo)))
        .sum()
}

/// Exact domain area `4ab`.
pub fn exact_domain_area<T: Scalar>(d: &Domain<T>) -> BigRational {
    BigRational::from_integer(BigInt::from(4)) * exact(d.a()) * exact(d.b())
}
