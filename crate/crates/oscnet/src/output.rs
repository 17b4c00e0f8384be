//! CSV and SVG artifact emitters.
//!
//! CSV schemas are part of the tool's contract; numbers are written with
//! Rust's shortest round-trip formatting so byte-level reproducibility is
//! well defined. The SVG plot is a convenience: axes, one polyline, labels.

use std::io::{self, Write};

use crate::floquet::MsfCurve;
use crate::graph::SpectrumReport;
use crate::integrate::Trajectory;

/// `index,eigenvalue`
pub fn write_spectrum_csv<W: Write>(w: &mut W, report: &SpectrumReport) -> io::Result<()> {
    writeln!(w, "index,eigenvalue")?;
    for (i, lambda) in report.eigenvalues.iter().enumerate() {
        writeln!(w, "{i},{lambda}")?;
    }
    Ok(())
}

/// `t,x1_1,x1_2,...,xn_1,xn_2` in node-major order, one row per record.
pub fn write_trajectory_csv<W: Write>(w: &mut W, traj: &Trajectory) -> io::Result<()> {
    let nodes = traj.dim() / 2;
    let mut header = String::from("t");
    for i in 1..=nodes {
        header.push_str(&format!(",x{i}_1,x{i}_2"));
    }
    writeln!(w, "{header}")?;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let mut row = format!("{t}");
        for v in state {
            row.push(',');
            row.push_str(&format!("{v}"));
        }
        writeln!(w, "{row}")?;
    }
    Ok(())
}

/// `kappa,alpha,max_multiplier,max_exponent`
pub fn write_msf_csv<W: Write>(w: &mut W, curve: &MsfCurve) -> io::Result<()> {
    writeln!(w, "kappa,alpha,max_multiplier,max_exponent")?;
    for p in &curve.points {
        writeln!(w, "{},{},{},{}", p.kappa, p.alpha, p.max_multiplier, p.max_exponent)?;
    }
    Ok(())
}

/// `t,error`
pub fn write_sync_csv<W: Write>(w: &mut W, series: &[(f64, f64)]) -> io::Result<()> {
    writeln!(w, "t,error")?;
    for (t, e) in series {
        writeln!(w, "{t},{e}")?;
    }
    Ok(())
}

const SVG_WIDTH: f64 = 800.0;
const SVG_HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 44.0;
const MARGIN_BOTTOM: f64 = 56.0;

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Standalone single-curve SVG plot of (x, y) points.
pub fn write_svg_polyline<W: Write>(
    w: &mut W,
    title: &str,
    x_label: &str,
    y_label: &str,
    points: &[(f64, f64)],
) -> io::Result<()> {
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if points.is_empty() {
        x_min = 0.0;
        x_max = 1.0;
        y_min = 0.0;
        y_max = 1.0;
    }
    if x_max - x_min < f64::MIN_POSITIVE {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if y_max - y_min < f64::MIN_POSITIVE {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let map_x = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let map_y = |y: f64| MARGIN_TOP + plot_h - (y - y_min) / (y_max - y_min) * plot_h;

    writeln!(
        w,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_WIDTH}\" height=\"{SVG_HEIGHT}\" \
         viewBox=\"0 0 {SVG_WIDTH} {SVG_HEIGHT}\">"
    )?;
    writeln!(w, "  <rect width=\"{SVG_WIDTH}\" height=\"{SVG_HEIGHT}\" fill=\"white\"/>")?;
    writeln!(
        w,
        "  <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"16\">{}</text>",
        SVG_WIDTH / 2.0,
        escape_xml(title)
    )?;
    // axes
    writeln!(
        w,
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{MARGIN_TOP}\" x2=\"{MARGIN_LEFT}\" y2=\"{}\" \
         stroke=\"black\"/>",
        MARGIN_TOP + plot_h
    )?;
    writeln!(
        w,
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        MARGIN_TOP + plot_h,
        MARGIN_LEFT + plot_w,
        MARGIN_TOP + plot_h
    )?;
    // ticks: ends and midpoint of each axis
    for i in 0..=2 {
        let fx = i as f64 / 2.0;
        let xv = x_min + fx * (x_max - x_min);
        let px = map_x(xv);
        writeln!(
            w,
            "  <line x1=\"{px}\" y1=\"{}\" x2=\"{px}\" y2=\"{}\" stroke=\"black\"/>",
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 5.0
        )?;
        writeln!(
            w,
            "  <text x=\"{px}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"12\">{:.4}</text>",
            MARGIN_TOP + plot_h + 20.0,
            xv
        )?;
        let yv = y_min + fx * (y_max - y_min);
        let py = map_y(yv);
        writeln!(
            w,
            "  <line x1=\"{}\" y1=\"{py}\" x2=\"{MARGIN_LEFT}\" y2=\"{py}\" stroke=\"black\"/>",
            MARGIN_LEFT - 5.0
        )?;
        writeln!(
            w,
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" \
             font-size=\"12\">{:.4}</text>",
            MARGIN_LEFT - 9.0,
            py + 4.0,
            yv
        )?;
    }
    writeln!(
        w,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\">{}</text>",
        MARGIN_LEFT + plot_w / 2.0,
        SVG_HEIGHT - 12.0,
        escape_xml(x_label)
    )?;
    writeln!(
        w,
        "  <text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\" transform=\"rotate(-90 16 {})\">{}</text>",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape_xml(y_label)
    )?;
    if !points.is_empty() {
        let mut path = String::with_capacity(points.len() * 16);
        for &(x, y) in points {
            path.push_str(&format!("{:.2},{:.2} ", map_x(x), map_y(y)));
        }
        writeln!(
            w,
            "  <polyline fill=\"none\" stroke=\"#1f6fb4\" stroke-width=\"1.5\" points=\"{}\"/>",
            path.trim_end()
        )?;
    }
    writeln!(w, "</svg>")?;
    Ok(())
}
