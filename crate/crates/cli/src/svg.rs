//! Minimal self-contained SVG line charts.

use std::fmt::Write;

use crate::output::fmt_num;

const WIDTH: f64 = 640.0;
const PANEL_HEIGHT: f64 = 240.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 40.0;
const TICKS: usize = 5;

/// One panel: a single series sharing the x axis with the others.
pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Stacks one panel per series, all against the same x label.
pub fn line_chart(x_label: &str, series: &[Series]) -> String {
    let height = PANEL_HEIGHT * series.len() as f64;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();

    let (x_lo, x_hi) = extent(series.iter().flat_map(|p| p.points.iter().map(|q| q.0)));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;

    for (i, p) in series.iter().enumerate() {
        let top = i as f64 * PANEL_HEIGHT + MARGIN_TOP;
        let bottom = top + plot_h;
        let (y_lo, y_hi) = extent(p.points.iter().map(|q| q.1));
        let sy = |y: f64| bottom - (y - y_lo) / (y_hi - y_lo) * plot_h;

        writeln!(
            s,
            r#"<rect x="{MARGIN_LEFT}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
        )
        .unwrap();
        for k in 0..=TICKS {
            let f = k as f64 / TICKS as f64;
            let (xv, yv) = (x_lo + f * (x_hi - x_lo), y_lo + f * (y_hi - y_lo));
            let (px, py) = (fmt_num(sx(xv)), fmt_num(sy(yv)));
            writeln!(
                s,
                r#"<line x1="{px}" y1="{bottom}" x2="{px}" y2="{}" stroke="black"/><text x="{px}" y="{}" text-anchor="middle">{}</text>"#,
                bottom + 4.0,
                bottom + 16.0,
                fmt_num(xv)
            )
            .unwrap();
            writeln!(
                s,
                r#"<line x1="{}" y1="{py}" x2="{MARGIN_LEFT}" y2="{py}" stroke="black"/><text x="{}" y="{py}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
                MARGIN_LEFT - 4.0,
                MARGIN_LEFT - 6.0,
                fmt_num(yv)
            )
            .unwrap();
        }
        if y_lo < 0.0 && y_hi > 0.0 {
            let z = fmt_num(sy(0.0));
            writeln!(
                s,
                r##"<line x1="{MARGIN_LEFT}" y1="{z}" x2="{}" y2="{z}" stroke="#999" stroke-dasharray="4 3"/>"##,
                MARGIN_LEFT + plot_w
            )
            .unwrap();
        }
        let pts: Vec<String> = p
            .points
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt_num(sx(x)), fmt_num(sy(y))))
            .collect();
        writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            p.color,
            pts.join(" ")
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{MARGIN_LEFT}" y="{}">{}</text>"#,
            top - 8.0,
            escape(p.label)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            bottom + 32.0,
            escape(x_label)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
