//! Minimal SVG line plots: polylines, axes with end labels and a legend.

use std::fmt::Write;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN: f64 = 48.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series { label: label.into(), points, dashed: false }
    }

    pub fn dashed(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series { label: label.into(), points, dashed: true }
    }
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !(lo <= hi) {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn label(v: f64) -> String {
    format!("{v:.3}")
}

fn draw_panel(out: &mut String, panel: &Panel, ox: f64, oy: f64) {
    let (x0, x1) = range(panel.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = range(panel.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let (w, h) = (PANEL_W - 2.0 * MARGIN, PANEL_H - 2.0 * MARGIN);
    let sx = |x: f64| ox + MARGIN + (x - x0) / (x1 - x0) * w;
    let sy = |y: f64| oy + MARGIN + (y1 - y) / (y1 - y0) * h;

    let _ = writeln!(
        out,
        r##"<rect x="{:.2}" y="{:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="#444"/>"##,
        ox + MARGIN,
        oy + MARGIN
    );
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#bbb"/>"##,
            sx(x0),
            sy(0.0),
            sx(x1),
            sy(0.0)
        );
    }
    let text = |out: &mut String, x: f64, y: f64, anchor: &str, s: &str| {
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{y:.2}" font-size="11" text-anchor="{anchor}">{}</text>"#, escape(s));
    };
    text(out, ox + PANEL_W / 2.0, oy + MARGIN - 14.0, "middle", &panel.title);
    text(out, ox + MARGIN, oy + PANEL_H - MARGIN + 14.0, "start", &label(x0));
    text(out, ox + PANEL_W - MARGIN, oy + PANEL_H - MARGIN + 14.0, "end", &label(x1));
    text(out, ox + PANEL_W / 2.0, oy + PANEL_H - MARGIN + 30.0, "middle", &panel.x_label);
    text(out, ox + MARGIN - 4.0, oy + MARGIN + 4.0, "end", &label(y1));
    text(out, ox + MARGIN - 4.0, oy + PANEL_H - MARGIN, "end", &label(y0));
    text(out, ox + 12.0, oy + PANEL_H / 2.0, "middle", &panel.y_label);

    for (i, s) in panel.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let dash = if s.dashed { r#" stroke-dasharray="5,3""# } else { "" };
        // NaN breaks a curve into separate polylines
        for run in s.points.split(|p| !(p.0.is_finite() && p.1.is_finite())) {
            if run.is_empty() {
                continue;
            }
            let pts: Vec<String> = run.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.3"{dash} points="{}"/>"#,
                pts.join(" ")
            );
        }
        let ly = oy + MARGIN + 12.0 + 14.0 * i as f64;
        let lx = ox + PANEL_W - MARGIN - 110.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.3"{dash}/>"#,
            ly - 4.0,
            lx + 18.0,
            ly - 4.0
        );
        text(out, lx + 22.0, ly, "start", &s.label);
    }
}

/// Lays panels out on a grid with `columns` columns. `metadata` is embedded
/// verbatim (escaped) for provenance of the data.
pub fn render(title: &str, panels: &[Panel], columns: usize, metadata: &str) -> String {
    let columns = columns.clamp(1, panels.len().max(1));
    let rows = panels.len().div_ceil(columns).max(1);
    let (width, height) = (PANEL_W * columns as f64, PANEL_H * rows as f64 + 24.0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, "<metadata>{}</metadata>", escape(metadata));
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{:.2}" y="16" font-size="13" text-anchor="middle">{}</text>"#, width / 2.0, escape(title));
    for (i, p) in panels.iter().enumerate() {
        let (r, c) = (i / columns, i % columns);
        draw_panel(&mut out, p, PANEL_W * c as f64, 24.0 + PANEL_H * r as f64);
    }
    out.push_str("</svg>\n");
    out
}
