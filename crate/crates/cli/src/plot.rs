//! Line-plot rendering of a reconstruction slice as a standalone SVG.
//!
//! A slice fixes two axis indices and varies the third, plotting the real
//! part of the reconstruction against the cell-center coordinate, with the
//! ground truth overlaid when the report carries one. Cells whose
//! reconstruction was flagged unreliable are drawn as red markers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

use crate::report::CellReport;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 48.0;

/// Coordinate axis along which a slice varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// First axis.
    X,
    /// Second axis.
    Y,
    /// Third axis.
    Z,
}

impl Axis {
    fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl FromStr for Axis {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => bail!("axis must be one of x, y, z; got `{other}`"),
        }
    }
}

struct SlicePoint {
    coord: f64,
    re_q_star: f64,
    q_true: Option<f64>,
    reliable: bool,
}

fn cells_per_axis(report: &CellReport) -> Result<usize> {
    if let Some(raw) = report.meta.get("grid.n_per_axis") {
        return raw
            .parse()
            .map_err(|_| anyhow!("header grid.n_per_axis is not an integer: `{raw}`"));
    }
    let total = report.rows.len();
    let n = (total as f64).cbrt().round() as usize;
    if n * n * n != total {
        bail!("report has {total} rows, which is not a cube; cannot infer the grid");
    }
    Ok(n)
}

fn extract_slice(report: &CellReport, axis: Axis, index: usize) -> Result<Vec<SlicePoint>> {
    let n = cells_per_axis(report)?;
    if index >= n {
        bail!("slice index {index} is out of range for {n} cells per axis");
    }
    let mut slice = Vec::with_capacity(n);
    for row in &report.rows {
        let p = row.cell;
        if p >= n * n * n {
            bail!("cell index {p} is out of range for an n = {n} grid");
        }
        let (i, j, l) = (p / (n * n), (p / n) % n, p % n);
        let (fixed_a, fixed_b, coord) = match axis {
            Axis::X => (j, l, row.point.x),
            Axis::Y => (i, l, row.point.y),
            Axis::Z => (i, j, row.point.z),
        };
        if fixed_a == index && fixed_b == index {
            slice.push(SlicePoint {
                coord,
                re_q_star: row.re_q_star,
                q_true: row.q_true,
                reliable: row.reliable,
            });
        }
    }
    if slice.len() != n {
        bail!("slice selected {} cells, expected {n}; the table is incomplete", slice.len());
    }
    slice.sort_by(|a, b| a.coord.total_cmp(&b.coord));
    Ok(slice)
}

fn nice_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.2e}")
    }
}

/// Renders one slice of a parsed report as an SVG document.
pub fn render_slice_svg(report: &CellReport, axis: Axis, index: usize) -> Result<String> {
    let slice = extract_slice(report, axis, index)?;
    let has_truth = slice.iter().all(|p| p.q_true.is_some());

    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &slice {
        x_lo = x_lo.min(p.coord);
        x_hi = x_hi.max(p.coord);
        y_lo = y_lo.min(p.re_q_star);
        y_hi = y_hi.max(p.re_q_star);
        if let Some(q) = p.q_true {
            y_lo = y_lo.min(q);
            y_hi = y_hi.max(q);
        }
    }
    if x_hi <= x_lo {
        let pad = x_lo.abs().max(1.0) * 0.5;
        x_lo -= pad;
        x_hi += pad;
    }
    let y_pad = ((y_hi - y_lo) * 0.08).max(y_hi.abs().max(y_lo.abs()).max(1.0) * 1e-3);
    y_lo -= y_pad;
    y_hi += y_pad;

    let px = |c: f64| MARGIN_LEFT + (c - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
    let py =
        |v: f64| HEIGHT - MARGIN_BOTTOM - (v - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(s, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");

    // Title: chosen wavenumber and noise level from the table header.
    let k = report.meta.get("chosen_k").map(String::as_str).unwrap_or("?");
    let noise = report
        .meta
        .get("delta_star")
        .filter(|v| v.as_str() != "-")
        .map_or_else(|| "noise-free".to_string(), |v| format!("noise level {v}"));
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">Reconstruction slice along {} (index {index}), k = {k}, {noise}</text>",
        WIDTH / 2.0,
        axis.name()
    );

    // Frame and tick labels.
    let _ = writeln!(
        s,
        "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    );
    for t in 0..=4 {
        let fx = x_lo + (x_hi - x_lo) * t as f64 / 4.0;
        let fy = y_lo + (y_hi - y_lo) * t as f64 / 4.0;
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            px(fx),
            HEIGHT - MARGIN_BOTTOM + 16.0,
            nice_number(fx)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            MARGIN_LEFT - 6.0,
            py(fy) + 4.0,
            nice_number(fy)
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        HEIGHT - 10.0,
        axis.name()
    );

    // Ground-truth series first so the reconstruction draws on top of it.
    if has_truth {
        let pts: Vec<String> = slice
            .iter()
            .map(|p| format!("{},{}", px(p.coord), py(p.q_true.unwrap())))
            .collect();
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#2a9d2a\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\"/>",
            pts.join(" ")
        );
    }

    // Reconstruction series.
    let pts: Vec<String> =
        slice.iter().map(|p| format!("{},{}", px(p.coord), py(p.re_q_star))).collect();
    let _ = writeln!(
        s,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\"/>",
        pts.join(" ")
    );
    for p in &slice {
        let fill = if p.reliable { "#1f5fbf" } else { "#d62728" };
        let _ = writeln!(
            s,
            "<circle cx=\"{}\" cy=\"{}\" r=\"3.2\" fill=\"{fill}\"/>",
            px(p.coord),
            py(p.re_q_star)
        );
    }

    // Legend.
    let lx = MARGIN_LEFT + 10.0;
    let ly = MARGIN_TOP + 14.0;
    let _ = writeln!(
        s,
        "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"#1f5fbf\" stroke-width=\"1.5\"/><circle cx=\"{}\" cy=\"{ly}\" r=\"3.2\" fill=\"#1f5fbf\"/><text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">Re q*</text>",
        lx + 28.0,
        lx + 14.0,
        lx + 36.0,
        ly + 4.0
    );
    if has_truth {
        let ly2 = ly + 18.0;
        let _ = writeln!(
            s,
            "<line x1=\"{lx}\" y1=\"{ly2}\" x2=\"{}\" y2=\"{ly2}\" stroke=\"#2a9d2a\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\"/><text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">true q</text>",
            lx + 28.0,
            lx + 36.0,
            ly2 + 4.0
        );
    }
    if slice.iter().any(|p| !p.reliable) {
        let ly3 = ly + if has_truth { 36.0 } else { 18.0 };
        let _ = writeln!(
            s,
            "<circle cx=\"{}\" cy=\"{ly3}\" r=\"3.2\" fill=\"#d62728\"/><text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">unreliable cell</text>",
            lx + 14.0,
            lx + 36.0,
            ly3 + 4.0
        );
    }

    let _ = writeln!(s, "</svg>");
    Ok(s)
}

/// Renders one slice of a report file and writes it as an SVG file.
pub fn write_slice_svg(report: &CellReport, axis: Axis, index: usize, path: &Path) -> Result<()> {
    let svg = render_slice_svg(report, axis, index)?;
    fs::write(path, svg).with_context(|| format!("writing plot to {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::parse_cell_table;

    fn sample_table(n: usize, with_truth: bool, unreliable: &[usize]) -> CellReport {
        let mut text = String::new();
        text.push_str("# scatrec report v1\n");
        text.push_str(&format!("# grid.n_per_axis = {n}\n"));
        text.push_str("# chosen_k = 93.18\n");
        text.push_str("# delta_star = 0.02\n");
        for p in 0..n * n * n {
            let (i, j, l) = (p / (n * n), (p / n) % n, p % n);
            let (x, y, z) = (i as f64 * 0.1, j as f64 * 0.1, l as f64 * 0.1);
            let q = if with_truth { "10".to_string() } else { "-".to_string() };
            let flag = if unreliable.contains(&p) { 0 } else { 1 };
            text.push_str(&format!(
                "{p}\t{x}\t{y}\t{z}\t{q}\t{}\t0.01\t{flag}\n",
                10.0 + p as f64 * 0.01
            ));
        }
        parse_cell_table(&text).unwrap()
    }

    #[test]
    fn slice_plot_contains_series_markers_and_metadata() {
        let n = 4;
        // Flag one cell that lies on the plotted slice: j = l = 1, i = 2.
        let flagged = (2 * n + 1) * n + 1;
        let report = sample_table(n, true, &[flagged]);
        let svg = render_slice_svg(&report, Axis::X, 1).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("k = 93.18"));
        assert!(svg.contains("noise level 0.02"));
        // One marker per slice cell plus the two legend dots.
        assert_eq!(svg.matches("<circle").count(), n + 2);
        assert_eq!(svg.matches("#d62728").count(), 2, "red slice marker + red legend dot");
        assert!(svg.contains("unreliable cell"));
        // Reconstruction and truth series.
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("true q"));
    }

    #[test]
    fn truth_free_tables_plot_a_single_series() {
        let report = sample_table(3, false, &[]);
        let svg = render_slice_svg(&report, Axis::Z, 0).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(!svg.contains("true q"));
        assert!(!svg.contains("unreliable"));
    }

    #[test]
    fn out_of_range_slices_are_rejected() {
        let report = sample_table(3, true, &[]);
        assert!(render_slice_svg(&report, Axis::Y, 3).is_err());
        assert!("w".parse::<Axis>().is_err());
        assert_eq!("Z".parse::<Axis>().unwrap(), Axis::Z);
    }
}
