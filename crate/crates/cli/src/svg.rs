//! Minimal SVG line plot: axes, ticks and one polyline per curve.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 8] = [
    "#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

pub struct Curve<'a> {
    pub label: &'a str,
    pub ys: &'a [f64],
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

pub fn render(xs: &[f64], curves: &[Curve<'_>]) -> String {
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let y1 = curves
        .iter()
        .flat_map(|c| c.ys.iter().copied())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let y0 = curves
        .iter()
        .flat_map(|c| c.ys.iter().copied())
        .fold(0.0_f64, f64::min);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (bx, by) = (sx(x0), sy(y0));
    let _ = writeln!(
        s,
        r#"<path d="M{bx:.2},{:.2} L{bx:.2},{by:.2} L{:.2},{by:.2}" stroke="black" fill="none"/>"#,
        sy(y1),
        sx(x1)
    );
    for t in ticks(x0, x1) {
        let px = sx(t);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{by:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
            by + 4.0,
            by + 16.0
        );
    }
    for t in ticks(y0, y1) {
        let py = sy(t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{bx:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            bx - 4.0,
            bx - 6.0,
            py + 4.0,
            format_tick(t)
        );
    }
    for (k, c) in curves.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let points: Vec<String> = xs
            .iter()
            .zip(c.ys)
            .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="{}"/>"#,
            points.join(" "),
            if k == 0 { 2.0 } else { 1.0 }
        );
        let ly = MARGIN + 14.0 * k as f64;
        let lx = WIDTH - MARGIN - 90.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(c.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn format_tick(t: f64) -> String {
    let s = format!("{t:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
