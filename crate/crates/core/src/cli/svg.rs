//! Minimal native SVG output: line/scatter plots and nodal heat maps.

use std::fmt::Write;

use crate::geometry::ScalarField;

const W: f64 = 640.0;
const H: f64 = 440.0;
const MARGIN: [f64; 4] = [60.0, 20.0, 30.0, 50.0]; // left, right, top, bottom
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Line,
    Dots,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub mark: Mark,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Axes {
    pub log_x: bool,
    pub log_y: bool,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Plot of one or more series; points that cannot be drawn on a log axis
/// are dropped.
pub fn plot(title: &str, x_label: &str, y_label: &str, axes: Axes, series: &[Series]) -> String {
    let tx = |v: f64| if axes.log_x { v.log10() } else { v };
    let ty = |v: f64| if axes.log_y { v.log10() } else { v };
    let visible = |&(x, y): &(f64, f64)| {
        x.is_finite() && y.is_finite() && (!axes.log_x || x > 0.0) && (!axes.log_y || y > 0.0)
    };
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in series.iter().flat_map(|s| s.points.iter()).filter(|p| visible(p)) {
        x0 = x0.min(tx(p.0));
        x1 = x1.max(tx(p.0));
        y0 = y0.min(ty(p.1));
        y1 = y1.max(ty(p.1));
    }
    if !(x0 < x1) {
        (x0, x1) = (x0 - 0.5, x0 + 0.5);
    }
    if !(y0 < y1) {
        (y0, y1) = (y0 - 0.5, y0 + 0.5);
    }
    if !x0.is_finite() || !y0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let [ml, mr, mt, mb] = MARGIN;
    let px = |v: f64| ml + (v - x0) / (x1 - x0) * (W - ml - mr);
    let py = |v: f64| H - mb - (v - y0) / (y1 - y0) * (H - mt - mb);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{ml}" y="{mt}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - ml - mr,
        H - mt - mb
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (vx, vy) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let lx = if axes.log_x { format!("1e{vx:.1}") } else { format!("{vx:.3}") };
        let ly = if axes.log_y { format!("1e{vy:.1}") } else { format!("{vy:.3}") };
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{lx}</text>"#, px(vx), H - mb + 16.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{ly}</text>"#, ml - 4.0, py(vy) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64)> = ser.points.iter().filter(|p| visible(p)).map(|p| (px(tx(p.0)), py(ty(p.1)))).collect();
        match ser.mark {
            Mark::Line => {
                let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
            }
            Mark::Dots => {
                for (x, y) in &pts {
                    let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1.5" fill="{color}"/>"#);
                }
            }
        }
        let ly = mt + 16.0 + 16.0 * i as f64;
        let _ = writeln!(s, r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/>"#, W - mr - 150.0, ly - 9.0);
        let _ = writeln!(s, r#"<text x="{}" y="{ly}">{}</text>"#, W - mr - 135.0, escape(&ser.label));
    }
    s.push_str("</svg>\n");
    s
}

/// Heat map of the defined values of `field`, one square per node.
pub fn heat_map(title: &str, field: &ScalarField) -> String {
    let grid = field.grid();
    let (lo, hi) = field
        .iter_defined()
        .filter(|(_, v)| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (_, v)| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let cell = (560.0 / grid.nx.max(grid.ny) as f64).max(1.0);
    let (w, h) = (cell * grid.nx as f64, cell * grid.ny as f64 + 30.0);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w:.0}" height="{h:.0}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="4" y="16">{} [{lo:.4}, {hi:.4}]</text>"#, escape(title));
    for (k, v) in field.iter_defined() {
        if !v.is_finite() {
            continue;
        }
        let (i, j) = grid.ij(k);
        let t = ((v - lo) / span).clamp(0.0, 1.0);
        // Blue to yellow through green.
        let (r, g, b) = ((255.0 * t) as u8, (80.0 + 150.0 * t) as u8, (200.0 * (1.0 - t)) as u8);
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({r},{g},{b})"/>"#,
            i as f64 * cell,
            30.0 + (grid.ny - 1 - j) as f64 * cell,
            cell,
            cell
        );
    }
    s.push_str("</svg>\n");
    s
}
