//! SVG line chart of a selection trace.

use std::fmt::Write as _;

use zipfbpe::CheckpointRecord;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 320.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 40.0;

/// Score per checkpoint against vocabulary size, with the stopping and
/// best checkpoints marked.
pub fn trace_svg(trace: &[CheckpointRecord], stop: usize, best: usize) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if trace.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }

    let x_min = trace[0].vocab_size as f64;
    let x_max = (trace[trace.len() - 1].vocab_size as f64).max(x_min + 1.0);
    let lo = trace.iter().map(|r| r.zipf_t).fold(f64::INFINITY, f64::min);
    let hi = trace
        .iter()
        .map(|r| r.zipf_t)
        .fold(f64::NEG_INFINITY, f64::max);
    let pad = ((hi - lo) * 0.1).max(1e-3);
    let (y_min, y_max) = (lo - pad, hi + pad);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| TOP + plot_h - (y - y_min) / (y_max - y_min) * plot_h;

    let _ = writeln!(
        svg,
        r#"<path d="M{LEFT},{TOP} V{:.1} H{:.1}" fill="none" stroke="black"/>"#,
        TOP + plot_h,
        LEFT + plot_w
    );
    for i in 0..=4 {
        let y = y_min + (y_max - y_min) * i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{y:.3}</text>"#,
            LEFT - 6.0,
            sy(y) + 4.0
        );
        let x = x_min + (x_max - x_min) * i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            sx(x),
            TOP + plot_h + 16.0,
            x.round()
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">vocabulary size</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 6.0
    );

    let mut path = String::new();
    for (i, r) in trace.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(
            path,
            "{cmd}{:.1},{:.1} ",
            sx(r.vocab_size as f64),
            sy(r.zipf_t)
        );
    }
    let _ = writeln!(
        svg,
        r##"<path d="{}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##,
        path.trim_end()
    );
    for (index, color, label) in [(best, "#2ca02c", "best"), (stop, "#d62728", "stop")] {
        if let Some(r) = trace.get(index) {
            let (x, y) = (sx(r.vocab_size as f64), sy(r.zipf_t));
            let _ = writeln!(
                svg,
                r#"<circle cx="{x:.1}" cy="{y:.1}" r="4" fill="{color}"/><text x="{x:.1}" y="{:.1}" text-anchor="middle" fill="{color}">{label}</text>"#,
                y - 8.0
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}
