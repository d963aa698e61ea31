//! The dataset file format: a self-describing text document with a metadata
//! header and one amplitude record per (direction, wavenumber) pair.
//!
//! ```text
//! # scatrec dataset v1
//! grid.center = 0 0 0
//! grid.side = 1
//! grid.n_per_axis = 10
//! alpha0 = 1 0 0
//! wavenumbers = 52.27 56.81 ...
//! delta_star = 0.01            (present only for noisy data)
//! delta = 0.1087...            (present only for noisy data)
//! beta = 0.999 0.02 0.03       (one line per scattered direction, in order)
//! ...
//! amplitudes:
//! j m Re(A) Im(A) Re(A*) Im(A*)
//! ...
//! ```
//!
//! `A` is the working (possibly noisy) amplitude and `A*` the exact
//! reference; for noise-free data the two columns coincide. All numbers are
//! written in Rust's shortest round-trip decimal form, so write-then-read
//! reproduces every f64 bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use scatrec_core::forward::ScatteringDataset;
use scatrec_core::geometry::{partition_cube, DirectionSet, Grid, Point3};
use scatrec_core::linalg::CMatrix;

/// A dataset together with the grid it was generated on.
pub struct DatasetFile {
    /// The scattering data.
    pub dataset: ScatteringDataset,
    /// The generating grid, rebuilt from the header.
    pub grid: Arc<Grid>,
}

fn fmt_point(p: Point3) -> String {
    format!("{} {} {}", p.x, p.y, p.z)
}

/// Renders a dataset to the text format.
pub fn render_dataset(dataset: &ScatteringDataset, grid: &Grid) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# scatrec dataset v1");
    let _ = writeln!(s, "grid.center = {}", fmt_point(grid.center()));
    let _ = writeln!(s, "grid.side = {}", grid.side());
    let _ = writeln!(s, "grid.n_per_axis = {}", grid.n_per_axis());
    let _ = writeln!(s, "alpha0 = {}", fmt_point(dataset.directions().alpha0()));
    let ks: Vec<String> = dataset.wavenumbers().iter().map(|k| k.to_string()).collect();
    let _ = writeln!(s, "wavenumbers = {}", ks.join(" "));
    if let Some(ds) = dataset.delta_star() {
        let _ = writeln!(s, "delta_star = {ds}");
    }
    if let Some(d) = dataset.delta() {
        let _ = writeln!(s, "delta = {d}");
    }
    for &beta in dataset.directions().betas() {
        let _ = writeln!(s, "beta = {}", fmt_point(beta));
    }
    let _ = writeln!(s, "amplitudes:");
    let working = dataset.amplitudes();
    let exact = dataset.exact_amplitudes().unwrap_or(working);
    for j in 0..working.rows() {
        for m in 0..working.cols() {
            let a = working[(j, m)];
            let e = exact[(j, m)];
            let _ = writeln!(s, "{j} {m} {} {} {} {}", a.re, a.im, e.re, e.im);
        }
    }
    s
}

/// Writes a dataset file.
pub fn write_dataset(path: &Path, dataset: &ScatteringDataset, grid: &Grid) -> Result<()> {
    fs::write(path, render_dataset(dataset, grid))
        .with_context(|| format!("writing dataset to {}", path.display()))
}

fn parse_f64(what: &str, tok: &str) -> Result<f64> {
    tok.parse().with_context(|| format!("{what}: malformed number `{tok}`"))
}

fn parse_point(what: &str, value: &str) -> Result<Point3> {
    let t: Vec<&str> = value.split_whitespace().collect();
    if t.len() != 3 {
        bail!("{what}: expected three numbers, got `{value}`");
    }
    Ok(Point3::new(parse_f64(what, t[0])?, parse_f64(what, t[1])?, parse_f64(what, t[2])?))
}

/// Parses the text format back into a dataset and its grid.
pub fn parse_dataset(text: &str) -> Result<DatasetFile> {
    let mut center: Option<Point3> = None;
    let mut side: Option<f64> = None;
    let mut n_per_axis: Option<usize> = None;
    let mut alpha0: Option<Point3> = None;
    let mut wavenumbers: Option<Vec<f64>> = None;
    let mut delta_star: Option<f64> = None;
    let mut delta: Option<f64> = None;
    let mut betas: Vec<Point3> = Vec::new();
    let mut in_records = false;
    let mut records: Vec<(usize, usize, Complex64, Complex64)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !in_records {
            if line == "amplitudes:" {
                in_records = true;
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "grid.center" => center = Some(parse_point(key, value)?),
                "grid.side" => side = Some(parse_f64(key, value)?),
                "grid.n_per_axis" => {
                    n_per_axis =
                        Some(value.parse().with_context(|| format!("{key}: `{value}`"))?)
                }
                "alpha0" => alpha0 = Some(parse_point(key, value)?),
                "wavenumbers" => {
                    wavenumbers = Some(
                        value
                            .split_whitespace()
                            .map(|t| parse_f64(key, t))
                            .collect::<Result<_>>()?,
                    )
                }
                "delta_star" => delta_star = Some(parse_f64(key, value)?),
                "delta" => delta = Some(parse_f64(key, value)?),
                "beta" => betas.push(parse_point(key, value)?),
                _ => bail!("line {}: unknown dataset key `{key}`", lineno + 1),
            }
        } else {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 6 {
                bail!("line {}: amplitude records have six fields", lineno + 1);
            }
            let j: usize = t[0].parse().with_context(|| format!("line {}: j", lineno + 1))?;
            let m: usize = t[1].parse().with_context(|| format!("line {}: m", lineno + 1))?;
            let a = Complex64::new(parse_f64("Re(A)", t[2])?, parse_f64("Im(A)", t[3])?);
            let e = Complex64::new(parse_f64("Re(A*)", t[4])?, parse_f64("Im(A*)", t[5])?);
            records.push((j, m, a, e));
        }
    }

    let center = center.ok_or_else(|| anyhow!("dataset header misses grid.center"))?;
    let side = side.ok_or_else(|| anyhow!("dataset header misses grid.side"))?;
    let n = n_per_axis.ok_or_else(|| anyhow!("dataset header misses grid.n_per_axis"))?;
    let alpha0 = alpha0.ok_or_else(|| anyhow!("dataset header misses alpha0"))?;
    let ks = wavenumbers.ok_or_else(|| anyhow!("dataset header misses wavenumbers"))?;
    if betas.is_empty() {
        bail!("dataset header lists no scattered directions");
    }

    let grid = Arc::new(partition_cube(center, side, n).map_err(|e| anyhow!("grid: {e}"))?);
    let directions = DirectionSet::new(betas, alpha0).map_err(|e| anyhow!("directions: {e}"))?;

    let rows = directions.len();
    let cols = ks.len();
    if records.len() != rows * cols {
        bail!("expected {} amplitude records, found {}", rows * cols, records.len());
    }
    let mut working = CMatrix::zeros(rows, cols);
    let mut exact = CMatrix::zeros(rows, cols);
    let mut seen = vec![false; rows * cols];
    for (j, m, a, e) in records {
        if j >= rows || m >= cols {
            bail!("amplitude record ({j}, {m}) is out of range");
        }
        if std::mem::replace(&mut seen[j * cols + m], true) {
            bail!("duplicate amplitude record ({j}, {m})");
        }
        working[(j, m)] = a;
        exact[(j, m)] = e;
    }

    let noisy = delta_star.is_some() || delta.is_some();
    let dataset = if noisy {
        ScatteringDataset::from_parts(directions, ks, working, Some(exact), delta_star, delta)
            .map_err(|e| anyhow!("dataset: {e}"))?
    } else {
        if working.data() != exact.data() {
            bail!("exact column differs from the working column, but no noise level is recorded");
        }
        ScatteringDataset::exact(directions, ks, working).map_err(|e| anyhow!("dataset: {e}"))?
    };
    Ok(DatasetFile { dataset, grid })
}

/// Reads a dataset file.
pub fn read_dataset(path: &Path) -> Result<DatasetFile> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_dataset(&text).with_context(|| format!("parsing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use scatrec_core::forward::generate_dataset;
    use scatrec_core::noise::{apply_noise, NoiseMode};
    use scatrec_core::potential::{sample_potential, PotentialSpec};

    fn sample() -> (ScatteringDataset, Arc<Grid>) {
        let grid = Arc::new(partition_cube(Point3::ZERO, 1.0, 2).unwrap());
        let q = sample_potential(&PotentialSpec::Constant(10.0), &grid).unwrap();
        let dirs = DirectionSet::fibonacci(8, Point3::new(1.0, 0.0, 0.0)).unwrap();
        let ds = generate_dataset(&grid, &q, &dirs, &[50.0, 75.0]).unwrap();
        (ds, grid)
    }

    #[test]
    fn noise_free_dataset_round_trips_bit_exactly() {
        let (ds, grid) = sample();
        let text = render_dataset(&ds, &grid);
        let file = parse_dataset(&text).unwrap();
        assert_eq!(file.grid.as_ref(), grid.as_ref());
        assert_eq!(file.dataset.amplitudes().data(), ds.amplitudes().data());
        assert_eq!(file.dataset.wavenumbers(), ds.wavenumbers());
        assert_eq!(file.dataset.directions().betas(), ds.directions().betas());
        assert_eq!(file.dataset.delta_star(), None);
        assert_eq!(file.dataset.delta(), None);
        // A second render is byte-identical.
        assert_eq!(render_dataset(&file.dataset, &file.grid), text);
    }

    #[test]
    fn noisy_dataset_round_trips_bit_exactly() {
        let (ds, grid) = sample();
        let noisy = apply_noise(&ds, 0.03, NoiseMode::Seeded(5)).unwrap();
        let text = render_dataset(&noisy, &grid);
        let file = parse_dataset(&text).unwrap();
        assert_eq!(file.dataset.amplitudes().data(), noisy.amplitudes().data());
        assert_eq!(
            file.dataset.exact_amplitudes().unwrap().data(),
            noisy.exact_amplitudes().unwrap().data()
        );
        assert_eq!(file.dataset.delta_star(), noisy.delta_star());
        assert_eq!(file.dataset.delta(), noisy.delta());
        assert_eq!(render_dataset(&file.dataset, &file.grid), text);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let (ds, grid) = sample();
        let good = render_dataset(&ds, &grid);

        // Missing header key.
        let broken = good.replace("alpha0 = 1 0 0\n", "");
        assert!(parse_dataset(&broken).is_err());

        // Wrong record count.
        let mut lines: Vec<&str> = good.lines().collect();
        lines.pop();
        assert!(parse_dataset(&lines.join("\n")).is_err());

        // Divergent exact column without a recorded noise level.
        let tampered = {
            let mut l: Vec<String> = good.lines().map(|s| s.to_string()).collect();
            let last = l.last_mut().unwrap();
            let mut parts: Vec<String> =
                last.split_whitespace().map(|s| s.to_string()).collect();
            parts[4] = "123.0".to_string();
            *last = parts.join(" ");
            l.join("\n")
        };
        assert!(parse_dataset(&tampered).is_err());

        // Unknown key.
        let unknown = format!("bogus = 1\n{good}");
        assert!(parse_dataset(&unknown).is_err());
    }
}
