//! Inversion report files: a per-cell tab-delimited table and a key-value
//! summary.
//!
//! The table is self-contained — its `#` header repeats the grid geometry
//! and run metadata, so the error metric can be recomputed from the file
//! alone.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use scatrec_core::geometry::{Grid, Point3};
use scatrec_core::inversion::InversionReport;
use scatrec_core::potential::RealField;

/// One row of the per-cell table.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRow {
    /// Flat cell index.
    pub cell: usize,
    /// Cell center.
    pub point: Point3,
    /// True potential value, when the run had a ground truth.
    pub q_true: Option<f64>,
    /// Real part of the reconstruction.
    pub re_q_star: f64,
    /// Imaginary part of the reconstruction.
    pub im_q_star: f64,
    /// False when the reconstruction denominator fell below the floor.
    pub reliable: bool,
}

/// A parsed per-cell report: metadata plus rows.
#[derive(Debug, Clone)]
pub struct CellReport {
    /// Key-value metadata from the `#` header.
    pub meta: BTreeMap<String, String>,
    /// All rows, in cell order.
    pub rows: Vec<CellRow>,
}

/// Metadata shared by the table header and the summary document.
#[derive(Debug, Clone)]
pub struct RunMeta {
    /// Noise level of the dataset, when present.
    pub delta_star: Option<f64>,
    /// Absolute noise norm of the dataset, when present.
    pub delta: Option<f64>,
    /// Spread between reconstructions at different wavenumbers, when run.
    pub compatibility_spread: Option<f64>,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

/// Renders the per-cell table.
pub fn render_cell_table(
    report: &InversionReport,
    grid: &Grid,
    truth: Option<&RealField>,
    meta: &RunMeta,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# scatrec report v1");
    let _ = writeln!(
        s,
        "# grid.center = {} {} {}",
        grid.center().x,
        grid.center().y,
        grid.center().z
    );
    let _ = writeln!(s, "# grid.side = {}", grid.side());
    let _ = writeln!(s, "# grid.n_per_axis = {}", grid.n_per_axis());
    let _ = writeln!(s, "# chosen_k = {}", report.chosen_k);
    let _ = writeln!(s, "# delta_star = {}", opt(meta.delta_star));
    let _ = writeln!(s, "# delta = {}", opt(meta.delta));
    let _ = writeln!(s, "# relative_error = {}", opt(report.relative_error));
    let _ = writeln!(s, "# cell\ty_x\ty_y\ty_z\tq_true\tre_q_star\tim_q_star\treliable");
    let unreliable: &[usize] = &report.unreliable_cells;
    for (p, (&y, v)) in grid.points().iter().zip(report.q_star.values()).enumerate() {
        let q_true = truth.map(|t| t.values()[p].to_string()).unwrap_or_else(|| "-".into());
        let reliable = if unreliable.binary_search(&p).is_ok() { 0 } else { 1 };
        let _ = writeln!(
            s,
            "{p}\t{}\t{}\t{}\t{q_true}\t{}\t{}\t{reliable}",
            y.x, y.y, y.z, v.re, v.im
        );
    }
    s
}

/// Writes the per-cell table.
pub fn write_cell_table(
    path: &Path,
    report: &InversionReport,
    grid: &Grid,
    truth: Option<&RealField>,
    meta: &RunMeta,
) -> Result<()> {
    fs::write(path, render_cell_table(report, grid, truth, meta))
        .with_context(|| format!("writing report to {}", path.display()))
}

/// Parses a per-cell table.
pub fn parse_cell_table(text: &str) -> Result<CellReport> {
    let mut meta = BTreeMap::new();
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((key, value)) = rest.split_once('=') {
                meta.insert(key.trim().to_string(), value.trim().to_string());
            }
            continue;
        }
        let t: Vec<&str> = line.split('\t').collect();
        if t.len() != 8 {
            bail!("line {}: expected 8 tab-separated fields", lineno + 1);
        }
        let ctx = |what: &'static str| move || format!("line {}: {what}", lineno + 1);
        let cell: usize = t[0].parse().with_context(ctx("cell index"))?;
        let x: f64 = t[1].parse().with_context(ctx("y_x"))?;
        let y: f64 = t[2].parse().with_context(ctx("y_y"))?;
        let z: f64 = t[3].parse().with_context(ctx("y_z"))?;
        let q_true = if t[4] == "-" {
            None
        } else {
            Some(t[4].parse().with_context(ctx("q_true"))?)
        };
        let re: f64 = t[5].parse().with_context(ctx("re_q_star"))?;
        let im: f64 = t[6].parse().with_context(ctx("im_q_star"))?;
        let reliable = match t[7] {
            "1" => true,
            "0" => false,
            other => bail!("line {}: reliability flag must be 0 or 1, got `{other}`", lineno + 1),
        };
        rows.push(CellRow {
            cell,
            point: Point3::new(x, y, z),
            q_true,
            re_q_star: re,
            im_q_star: im,
            reliable,
        });
    }
    if rows.is_empty() {
        bail!("report contains no cell rows");
    }
    Ok(CellReport { meta, rows })
}

/// Reads a per-cell table from disk.
pub fn read_cell_table(path: &Path) -> Result<CellReport> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_cell_table(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Renders the run summary as a key-value document.
pub fn render_summary(report: &InversionReport, meta: &RunMeta) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "chosen_k = {}", report.chosen_k);
    let _ = writeln!(s, "condition_proxy = {}", report.diagnostics.condition_proxy);
    let _ = writeln!(s, "dsm_steps = {}", report.diagnostics.steps_taken);
    let _ = writeln!(s, "delta_star = {}", opt(meta.delta_star));
    let _ = writeln!(s, "delta = {}", opt(meta.delta));
    let _ = writeln!(s, "relative_error = {}", opt(report.relative_error));
    let _ = writeln!(s, "imag_norm_ratio = {}", report.imag_norm_ratio);
    let _ = writeln!(s, "compatibility_spread = {}", opt(meta.compatibility_spread));
    let _ = writeln!(s, "unreliable_cells = {}", report.unreliable_cells.len());
    s
}

/// Writes the run summary.
pub fn write_summary(path: &Path, report: &InversionReport, meta: &RunMeta) -> Result<()> {
    fs::write(path, render_summary(report, meta))
        .with_context(|| format!("writing summary to {}", path.display()))
}

/// Reads a key-value summary document into a map ("-" values are kept
/// verbatim).
pub fn read_summary(path: &Path) -> Result<BTreeMap<String, String>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected `key = value`", lineno + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Recomputes the volume-weighted relative error from a parsed table; the
/// grid is uniform, so the weights cancel.
pub fn table_relative_error(report: &CellReport) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for row in &report.rows {
        let q = row
            .q_true
            .ok_or_else(|| anyhow!("cell {}: table carries no ground truth", row.cell))?;
        let dr = row.re_q_star - q;
        num += dr * dr + row.im_q_star * row.im_q_star;
        den += q * q;
    }
    if den == 0.0 {
        bail!("ground truth is identically zero");
    }
    Ok((num / den).sqrt())
}
