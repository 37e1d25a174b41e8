//! SVG step plots and breakpoint tables for membership curves.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::curve::MembershipCurve;
use crate::error::Result;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 48.0;

/// Vertices of the curve outline, from `(min, 0)` to `(max, 0)`. Vertical
/// moves share an x coordinate, so a spike shows up as an up-and-down pair.
pub fn outline(curve: &MembershipCurve) -> Vec<(f64, f64)> {
    let (lo, hi) = curve.support();
    let mut pts = vec![(lo, 0.0)];
    for r in curve.regions() {
        pts.push((r.left, r.height));
        pts.push((r.right, r.height));
    }
    pts.push((hi, 0.0));
    pts.dedup();
    pts
}

pub fn write_breakpoints<W: Write>(curve: &MembershipCurve, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "membership"])?;
    for (x, y) in outline(curve) {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Standalone SVG 1.1 document plotting the curve on a unit-height axis.
pub fn render_svg(curve: &MembershipCurve) -> String {
    let (lo, hi) = curve.support();
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
    let (x0, x1) = (lo - pad, hi + pad);
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| HEIGHT - MARGIN - y * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"  <title>{}</title>"#, escape(curve.label()));
    let _ = writeln!(s, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"  <g stroke="black" stroke-width="1"><line x1="{l}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{l}" y1="{b}" x2="{l}" y2="{t}"/></g>"#,
        l = MARGIN,
        r = WIDTH - MARGIN,
        b = sy(0.0),
        t = sy(1.0),
    );
    let _ = writeln!(
        s,
        r#"  <g font-family="sans-serif" font-size="11" fill="black">"#
    );
    for k in 0..=4 {
        let y = k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"    <text x="{:.2}" y="{:.2}" text-anchor="end">{y}</text>"#,
            MARGIN - 6.0,
            sy(y) + 4.0
        );
    }
    for x in [lo, hi] {
        let _ = writeln!(
            s,
            r#"    <text x="{:.2}" y="{:.2}" text-anchor="middle">{x}</text>"#,
            sx(x),
            sy(0.0) + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"    <text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        MARGIN / 2.0,
        escape(curve.label())
    );
    let _ = writeln!(s, "  </g>");
    let points: Vec<String> = outline(curve)
        .into_iter()
        .map(|(x, y)| format!("{:.3},{:.3}", sx(x), sy(y)))
        .collect();
    let _ = writeln!(
        s,
        r#"  <polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
        points.join(" ")
    );
    s.push_str("</svg>\n");
    s
}

/// File stem for a curve label: alphanumerics kept, everything else `_`.
pub fn file_stem(label: &str) -> String {
    let stem: String = label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if stem.is_empty() {
        "curve".into()
    } else {
        stem
    }
}

/// Writes `<stem>.svg` and `<stem>.csv` for every curve into `dir`,
/// creating it if needed. Returns the written paths.
pub fn export_curves(curves: &[MembershipCurve], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(2 * curves.len());
    for (k, curve) in curves.iter().enumerate() {
        let mut stem = file_stem(curve.label());
        if curves[..k].iter().any(|c| file_stem(c.label()) == stem) {
            stem = format!("{stem}_{}", k + 1);
        }
        let svg = dir.join(format!("{stem}.svg"));
        fs::write(&svg, render_svg(curve))?;
        let csv = dir.join(format!("{stem}.csv"));
        write_breakpoints(curve, fs::File::create(&csv)?)?;
        written.push(svg);
        written.push(csv);
    }
    Ok(written)
}
