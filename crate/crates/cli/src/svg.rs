use std::fmt::Write as _;
use std::path::Path;

use crate::{CliError, Result};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;

/// One scatter series. Colours are assigned by position.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<[f64; 2]>,
    /// Marker radius in pixels.
    pub radius: f64,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<[f64; 2]>) -> Self {
        Self {
            label: label.into(),
            points,
            radius: 2.5,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders a self-contained 800x800 SVG scatter plot. `hulls` are drawn as
/// closed dashed outlines.
pub fn render_svg_scatter(title: &str, series: &[Series], hulls: &[Vec<[f64; 2]>]) -> String {
    let all = series
        .iter()
        .flat_map(|s| s.points.iter())
        .chain(hulls.iter().flatten())
        .filter(|p| p[0].is_finite() && p[1].is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in all {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    // one scale for both axes keeps shapes undistorted
    let span = (x1 - x0).max(y1 - y0).max(1e-12);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let px = |x: f64| SIZE / 2.0 + (x - cx) * scale;
    let py = |y: f64| SIZE / 2.0 - (y - cy) * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" viewBox="0 0 800 800">
<rect x="0" y="0" width="800" height="800" fill="white"/>
<text x="400" y="22" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        escape(title)
    );
    for (i, hull) in hulls.iter().enumerate() {
        if hull.is_empty() {
            continue;
        }
        let pts: Vec<String> = hull.iter().map(|p| format!("{:.2},{:.2}", px(p[0]), py(p[1]))).collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="none" stroke="{}" stroke-width="1.5" stroke-dasharray="6,4"/>"#,
            pts.join(" "),
            PALETTE[i % PALETTE.len()]
        );
    }
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(s, r#"<g fill="{color}" fill-opacity="0.6">"#);
        for p in ser.points.iter().filter(|p| p[0].is_finite() && p[1].is_finite()) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="{}"/>"#,
                px(p[0]),
                py(p[1]),
                ser.radius
            );
        }
        let _ = writeln!(s, "</g>");
        let ly = 44.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<circle cx="56" cy="{:.1}" r="5" fill="{color}"/><text x="66" y="{:.1}" font-family="sans-serif" font-size="13">{}</text>"#,
            ly,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_svg_scatter(path: &Path, title: &str, series: &[Series], hulls: &[Vec<[f64; 2]>]) -> Result<()> {
    std::fs::write(path, render_svg_scatter(title, series, hulls)).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_labels() {
        let svg = render_svg_scatter("a<b & c", &[Series::new("\"x\"", vec![[0.0, 0.0]])], &[]);
        assert!(svg.contains("a&lt;b &amp; c"));
        assert!(svg.contains("&quot;x&quot;"));
    }

    #[test]
    fn empty_plot_renders() {
        let svg = render_svg_scatter("empty", &[], &[]);
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn hull_is_dashed_polygon() {
        let svg = render_svg_scatter("h", &[], &[vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]]);
        assert!(svg.contains("<polygon") && svg.contains("stroke-dasharray"));
    }
}
