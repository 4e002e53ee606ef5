//! Minimal deterministic SVG charts.

use std::fmt::Write;

use crate::features::FeatureRecord;
use crate::sweep::SweepResult;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

/// Linear map from a data range onto pixel span `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
struct Axis {
    min: f64,
    max: f64,
    lo: f64,
    hi: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, lo: f64, hi: f64) -> Self {
        let (mut min, mut max) = values.fold((0.0f64, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !max.is_finite() || max <= min {
            max = min + 1.0;
        }
        let pad = 0.05 * (max - min);
        if min < 0.0 {
            min -= pad;
        }
        Self { min, max: max + pad, lo, hi }
    }

    fn fixed(min: f64, max: f64, lo: f64, hi: f64) -> Self {
        Self { min, max, lo, hi }
    }

    fn map(&self, v: f64) -> f64 {
        self.lo + (v - self.min) / (self.max - self.min) * (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<f64> {
        (0..=4).map(|i| self.min + (self.max - self.min) * f64::from(i) / 4.0).collect()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Canvas {
    svg: String,
    x: Axis,
    y: Axis,
}

impl Canvas {
    fn new(title: &str, x: Axis, y: Axis, x_label: &str, y_label: &str) -> Self {
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        let (x0, x1, y0, y1) = (x.lo, x.hi, y.lo, y.hi);
        let _ = writeln!(svg, r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#);
        for t in x.ticks() {
            let px = x.map(t);
            let _ = writeln!(
                svg,
                r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                y0 + 16.0,
                tick_label(t)
            );
        }
        for t in y.ticks() {
            let py = y.map(t);
            let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 6.0, py + 4.0, tick_label(t));
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 16.0,
            escape(x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(y_label)
        );
        Self { svg, x, y }
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Scatter of `(m1_birth, m1)` per record. Selectors in `flagged` are drawn
/// in red and labeled with their name.
pub fn feature_scatter(records: &[FeatureRecord], flagged: &[String]) -> String {
    let x = Axis::new(records.iter().map(|r| r.m1_birth), MARGIN, WIDTH - MARGIN);
    let y = Axis::new(records.iter().map(|r| r.m1), HEIGHT - MARGIN, MARGIN);
    let mut c = Canvas::new("Longest H1 lifespan vs. birth", x, y, "birth (km)", "lifespan m1 (km)");
    for r in records {
        let (px, py) = (c.x.map(r.m1_birth), c.y.map(r.m1));
        if flagged.contains(&r.selector) {
            let _ = writeln!(
                c.svg,
                r#"<circle class="mark flagged" cx="{px:.2}" cy="{py:.2}" r="5" fill="crimson"><title>{0}</title></circle>"#,
                escape(&r.selector)
            );
            let _ = writeln!(c.svg, r#"<text x="{:.2}" y="{:.2}" fill="crimson">{}</text>"#, px + 7.0, py - 7.0, escape(&r.selector));
        } else {
            let _ = writeln!(
                c.svg,
                r#"<circle class="mark" cx="{px:.2}" cy="{py:.2}" r="3" fill="steelblue" fill-opacity="0.7"><title>{}</title></circle>"#,
                escape(&r.selector)
            );
        }
    }
    c.finish()
}

/// AUC against `k`, with the chosen `k` marked.
pub fn auc_curve(result: &SweepResult) -> String {
    let x = Axis::new(result.per_k.iter().map(|e| e.k), MARGIN, WIDTH - MARGIN);
    let y = Axis::fixed(0.0, 1.0, HEIGHT - MARGIN, MARGIN);
    let mut c = Canvas::new("Separation of augmented tracks by velocity parameter", x, y, "k (km/hr)", "AUC of m1");
    let path: Vec<String> = result
        .per_k
        .iter()
        .filter(|e| e.auc.is_finite())
        .map(|e| format!("{:.2},{:.2}", c.x.map(e.k), c.y.map(e.auc)))
        .collect();
    if !path.is_empty() {
        let _ = writeln!(c.svg, r#"<polyline points="{}" fill="none" stroke="steelblue"/>"#, path.join(" "));
    }
    for e in result.per_k.iter().filter(|e| e.auc.is_finite()) {
        let chosen = e.k == result.chosen_k;
        let _ = writeln!(
            c.svg,
            r#"<circle class="mark" cx="{:.2}" cy="{:.2}" r="{}" fill="{}"><title>k={} AUC={:.4}</title></circle>"#,
            c.x.map(e.k),
            c.y.map(e.auc),
            if chosen { 5 } else { 3 },
            if chosen { "crimson" } else { "steelblue" },
            e.k,
            e.auc
        );
    }
    c.finish()
}
