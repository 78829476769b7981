//! Minimal self-contained SVG line plots. No external assets, inline styles
//! only, fully deterministic output so repeated runs diff clean.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 48.0;
const MARGIN_B: f64 = 56.0;
const N_TICKS: usize = 5;

const COLORS: [&str; 6] = [
    "#1f6fb2", "#d1495b", "#3e8e5a", "#9458a2", "#c98a1c", "#5a6472",
];

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

fn fmt_tick(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (0.01..1e4).contains(&a) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

/// Expands a degenerate axis range so the scale never divides by zero.
fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        let pad = lo.abs().max(1.0) * 0.1;
        (lo - pad, hi + pad)
    }
}

/// Renders a line plot. With `log_x` the x positions use log10 while the
/// tick labels still show the actual values.
pub fn line_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    log_x: bool,
    series: &[Series<'_>],
) -> String {
    let xform = |x: f64| if log_x { x.log10() } else { x };
    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            let x = xform(x);
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            y_lo = y_lo.min(y);
            y_hi = y_hi.max(y);
        }
    }
    if !x_lo.is_finite() {
        x_lo = 0.0;
        x_hi = 1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    let (x_lo, x_hi) = padded(x_lo, x_hi);
    let (y_lo, y_hi) = padded(y_lo, y_hi);

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |x: f64| MARGIN_L + (xform(x) - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| MARGIN_T + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        out,
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>"
    );
    let _ = writeln!(
        out,
        "  <text x=\"{:.2}\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\" fill=\"#222222\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );

    for i in 0..N_TICKS {
        let frac = i as f64 / (N_TICKS - 1) as f64;
        let xv = x_lo + frac * (x_hi - x_lo);
        let xp = MARGIN_L + frac * plot_w;
        let yv = y_lo + frac * (y_hi - y_lo);
        let yp = MARGIN_T + plot_h - frac * plot_h;
        let x_shown = if log_x { 10f64.powf(xv) } else { xv };
        let _ = writeln!(
            out,
            "  <line x1=\"{xp:.2}\" y1=\"{MARGIN_T}\" x2=\"{xp:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>",
            MARGIN_T + plot_h
        );
        let _ = writeln!(
            out,
            "  <line x1=\"{MARGIN_L}\" y1=\"{yp:.2}\" x2=\"{:.2}\" y2=\"{yp:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>",
            MARGIN_L + plot_w
        );
        let _ = writeln!(
            out,
            "  <text x=\"{xp:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#444444\">{}</text>",
            MARGIN_T + plot_h + 18.0,
            fmt_tick(x_shown)
        );
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#444444\">{}</text>",
            MARGIN_L - 8.0,
            yp + 4.0,
            fmt_tick(yv)
        );
    }

    let _ = writeln!(
        out,
        "  <rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>"
    );
    let _ = writeln!(
        out,
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#222222\">{}</text>",
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        "  <text x=\"18\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#222222\" transform=\"rotate(-90 18 {:.2})\">{}</text>",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        escape(y_label)
    );

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut path = String::new();
        for &(x, y) in &s.points {
            let _ = write!(path, "{:.2},{:.2} ", px(x), py(y));
        }
        let _ = writeln!(
            out,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            path.trim_end()
        );
        let ly = MARGIN_T + 14.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"14\" height=\"4\" fill=\"{color}\"/>",
            MARGIN_L + 10.0,
            ly - 4.0
        );
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{ly:.2}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">{}</text>",
            MARGIN_L + 30.0,
            escape(s.label)
        );
    }

    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_points_and_is_deterministic() {
        let series = [Series {
            label: "noise",
            points: vec![(1e3, -3.0), (1e6, 0.0), (1e9, 6.0)],
        }];
        let a = line_plot("title", "f (Hz)", "dB", true, &series);
        let b = line_plot("title", "f (Hz)", "dB", true, &series);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("polyline"));
        assert!(a.contains("noise"));
    }

    #[test]
    fn degenerate_ranges_still_render() {
        let series = [Series {
            label: "flat",
            points: vec![(5.0, 1.0), (5.0, 1.0)],
        }];
        let svg = line_plot("t", "x", "y", false, &series);
        assert!(svg.contains("polyline"));
        assert!(!svg.contains("NaN"));
        let empty = line_plot("t", "x", "y", false, &[]);
        assert!(empty.starts_with("<svg"));
    }
}
