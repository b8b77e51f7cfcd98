//! Log-log rank-frequency plot as a standalone SVG document.

use std::fmt::Write as _;

use crate::zipf::{RankFrequencyCurve, ZipfFit};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 48.0;

/// Scatter of `(log10 rank, log10 frequency)` with the fitted line.
pub fn loglog_svg(curve: &RankFrequencyCurve, fit: Option<&ZipfFit>, title: &str) -> String {
    let pts: Vec<(f64, f64)> = curve
        .points()
        .iter()
        .map(|p| ((p.rank as f64).log10(), (p.frequency as f64).log10()))
        .collect();
    let x_max = pts.iter().map(|p| p.0).fold(0.0, f64::max).ceil().max(1.0);
    let y_max = pts.iter().map(|p| p.1).fold(0.0, f64::max).ceil().max(1.0);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + x / x_max * plot_w;
    let sy = |y: f64| MARGIN_TOP + plot_h - y / y_max * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    // Axes with one tick per power of ten.
    let (x0, y0) = (sx(0.0), sy(0.0));
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.1},{:.1} V{y0:.1} H{:.1}" fill="none" stroke="black"/>"#,
        MARGIN_TOP,
        WIDTH - MARGIN_RIGHT
    );
    for k in 0..=x_max as i32 {
        let x = sx(k as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.1}" y1="{y0:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">10^{k}</text>"#,
            y0 + 5.0,
            y0 + 18.0
        );
    }
    for k in 0..=y_max as i32 {
        let y = sy(k as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{x0:.1}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">10^{k}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">rank</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 8.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">frequency</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    // Tail points crowd onto the same pixels; draw each pixel once.
    let _ = writeln!(svg, r##"<g fill="#1f77b4" fill-opacity="0.7">"##);
    let mut last = (f64::NAN, f64::NAN);
    for &(x, y) in &pts {
        let (px, py) = (sx(x).round(), sy(y).round());
        if (px, py) == last {
            continue;
        }
        last = (px, py);
        let _ = writeln!(svg, r#"<circle cx="{px}" cy="{py}" r="1.6"/>"#);
    }
    svg.push_str("</g>\n");

    if let Some(fit) = fit.filter(|f| !f.degenerate) {
        let ln10 = std::f64::consts::LN_10;
        let line_y = |x: f64| (fit.intercept + fit.slope * x * ln10) / ln10;
        let x_end = pts.last().map_or(x_max, |p| p.0);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#d62728" stroke-width="1.5"/>"##,
            sx(0.0),
            sy(line_y(0.0)),
            sx(x_end),
            sy(line_y(x_end))
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.1}" y="{:.1}" text-anchor="end" fill="#d62728">slope {:.3}, R² {:.4}</text>"##,
            WIDTH - MARGIN_RIGHT - 4.0,
            MARGIN_TOP + 14.0,
            fit.slope,
            fit.r_squared
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zipf::{fit_power_law, rank_frequency, TokenFrequencyTable};

    #[test]
    fn renders_points_and_fit() {
        let table =
            TokenFrequencyTable::from_counts((1..=50u64).map(|r| (format!("t{r}"), 1000 / r)));
        let curve = rank_frequency(&table).unwrap();
        let fit = fit_power_law(&curve).unwrap();
        let svg = loglog_svg(&curve, Some(&fit), "a < b");
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("a &lt; b"));
        assert!(svg.contains("<circle"));
        assert!(svg.contains("stroke=\"#d62728\""));
        assert!(svg.contains(">10^3<"));
    }
}
