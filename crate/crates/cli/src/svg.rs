//! Static SVG plots: heat map of a grid field with the tile skeleton on
//! top, and a log-log plot of the residual decay.

use std::fmt::Write as _;

use ordpde::convergence::DecayRow;
use ordpde::{ExtReal, GridFn, Tiles};

const VIRIDIS: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

fn colour(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (VIRIDIS.len() - 1) as f64;
    let i = (t.floor() as usize).min(VIRIDIS.len() - 2);
    let s = t - i as f64;
    let (a, b) = (VIRIDIS[i], VIRIDIS[i + 1]);
    let mix = |p: f64, q: f64| (p + s * (q - p)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Cells are drawn at most `MAX_CELLS` per axis; finer grids are subsampled.
const MAX_CELLS: usize = 128;

pub fn heat_map(field: &GridFn, tiling: &Tiles, title: &str) -> String {
    let grid = field.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let stride_x = nx.div_ceil(MAX_CELLS).max(1);
    let stride_y = ny.div_ceil(MAX_CELLS).max(1);
    let is: Vec<usize> = (0..=nx).step_by(stride_x).collect();
    let js: Vec<usize> = (0..=ny).step_by(stride_y).collect();

    let finite: Vec<f64> = field.values().iter().filter_map(ExtReal::finite).collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };

    let (w, h, margin) = (512.0, 512.0, 48.0);
    let (a, b) = (grid.domain().a(), grid.domain().b());
    let px = |x: f64| margin + (x + a) / (2.0 * a) * w;
    let py = |y: f64| margin + (b - y) / (2.0 * b) * h;
    let cw = w / is.len() as f64;
    let ch = h / js.len() as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        w + 2.0 * margin + 80.0,
        h + 2.0 * margin,
        w + 2.0 * margin + 80.0,
        h + 2.0 * margin
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">{title}</text>"#,
        margin + w / 2.0,
        margin / 2.0
    );
    s.push_str("<g shape-rendering=\"crispEdges\">\n");
    for (cj, &j) in js.iter().enumerate() {
        for (ci, &i) in is.iter().enumerate() {
            let fill = match field.get(i, j) {
                ExtReal::Finite(v) => colour((v - lo) / span),
                ExtReal::NegInf => "#000000".into(),
                ExtReal::PosInf => "#ffffff".into(),
            };
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                margin + ci as f64 * cw,
                margin + h - (cj + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    s.push_str("</g>\n<g stroke=\"white\" stroke-width=\"0.6\" stroke-opacity=\"0.8\" fill=\"none\">\n");
    for t in tiling.tiles() {
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
            px(t.x_lo),
            py(t.y_hi),
            px(t.x_hi) - px(t.x_lo),
            py(t.y_lo) - py(t.y_hi)
        );
    }
    s.push_str("</g>\n");
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="red" stroke-width="1.2"/>"#,
        px(-a),
        py(0.0),
        px(a),
        py(0.0)
    );
    for k in 0..=10 {
        let t = k as f64 / 10.0;
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="16" height="{:.2}" fill="{}"/>"#,
            margin + w + 16.0,
            margin + h * (1.0 - t) - h / 11.0,
            h / 11.0 + 0.5,
            colour(t)
        );
    }
    let label = |s: &mut String, y: f64, v: f64| {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="10">{v:.3e}</text>"#,
            margin + w + 36.0,
            y
        );
    };
    label(&mut s, margin + 10.0, hi);
    label(&mut s, margin + h, lo);
    s.push_str("</svg>\n");
    s
}

pub fn decay_plot(rows: &[DecayRow<f64>]) -> String {
    let (w, h, margin) = (480.0, 360.0, 56.0);
    let n_max = rows.iter().map(|r| r.n).max().unwrap_or(1).max(2) as f64;
    let values: Vec<f64> = rows
        .iter()
        .flat_map(|r| [r.sup_residual, r.epsilon, 0.5 * r.epsilon])
        .filter(|v| *v > 0.0 && v.is_finite())
        .collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (dlo, dhi) = if lo.is_finite() {
        (lo.log10().floor(), hi.log10().ceil().max(lo.log10().floor() + 1.0))
    } else {
        (-1.0, 0.0)
    };
    let px = |n: f64| margin + n.log10() / n_max.log10() * w;
    let py = |v: f64| margin + (dhi - v.log10()) / (dhi - dlo) * h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}">"#,
        w + 2.0 * margin + 120.0,
        h + 2.0 * margin
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{margin}" y="{margin}" width="{w}" height="{h}" fill="none" stroke="black"/>"#
    );
    let mut d = dlo;
    while d <= dhi {
        let y = py(10f64.powf(d));
        let _ = writeln!(
            s,
            r##"<line x1="{margin}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##,
            margin + w
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">1e{d}</text>"#,
            margin - 4.0,
            y + 3.0
        );
        d += 1.0;
    }
    for n in rows.iter().map(|r| r.n) {
        let x = px(n as f64);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">{n}</text>"#,
            margin + h + 14.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">n</text>"#,
        margin + w / 2.0,
        margin + h + 32.0
    );
    let series: [(&str, &str, fn(&DecayRow<f64>) -> f64); 3] = [
        ("sup |residual|", "#1f77b4", |r| r.sup_residual),
        ("eps_n", "#d62728", |r| r.epsilon),
        ("eps_n / 2", "#7f7f7f", |r| 0.5 * r.epsilon),
    ];
    for (k, (name, stroke, get)) in series.iter().enumerate() {
        let pts: Vec<String> = rows
            .iter()
            .filter(|r| get(r) > 0.0)
            .map(|r| format!("{:.2},{:.2}", px(r.n as f64), py(get(r))))
            .collect();
        let dash = if k == 0 { "" } else { r#" stroke-dasharray="4 3""# };
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"{dash}/>"#,
            pts.join(" ")
        );
        if k == 0 {
            for p in &pts {
                let (x, y) = p.split_once(',').unwrap();
                let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{stroke}"/>"#);
            }
        }
        let ly = margin + 14.0 + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{0:.2}" y1="{ly:.2}" x2="{1:.2}" y2="{ly:.2}" stroke="{stroke}" stroke-width="1.5"{dash}/><text x="{2:.2}" y="{3:.2}" font-family="sans-serif" font-size="11">{name}</text>"#,
            margin + w + 10.0,
            margin + w + 30.0,
            margin + w + 34.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}
