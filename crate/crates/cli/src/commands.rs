//! The experiment commands behind the CLI subcommands: generate data,
//! invert it, sweep noise levels, and plot a reconstruction slice.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use scatrec_core::forward::{generate_dataset, ScatteringDataset};
use scatrec_core::geometry::{partition_cube, DirectionSet, Grid, WavenumberGrid};
use scatrec_core::inversion::{
    assemble_amplitude_matrix, compatibility_spread, invert, InversionReport,
};
use scatrec_core::noise::apply_noise;
use scatrec_core::potential::{sample_potential, RealField};
use scatrec_core::solver::condition_proxy;

use crate::config::ExperimentConfig;
use crate::dataset_io::{read_dataset, write_dataset};
use crate::plot::{write_slice_svg, Axis};
use crate::report::{read_cell_table, write_cell_table, write_summary, RunMeta};

/// Paths and the in-memory result of one inversion run.
#[derive(Debug)]
pub struct InvertArtifacts {
    /// Per-cell table location.
    pub report_path: PathBuf,
    /// Summary document location.
    pub summary_path: PathBuf,
    /// The inversion result itself.
    pub report: InversionReport,
}

fn build_grid(config: &ExperimentConfig) -> Result<Arc<Grid>> {
    Ok(Arc::new(partition_cube(
        config.grid_center,
        config.grid_side,
        config.grid_n_per_axis,
    )?))
}

fn build_problem(config: &ExperimentConfig) -> Result<(Arc<Grid>, RealField, DirectionSet, Vec<f64>)> {
    let grid = build_grid(config)?;
    let q = sample_potential(&config.potential, &grid)?;
    let directions = DirectionSet::fibonacci(grid.len(), config.alpha0)?;
    let ks = WavenumberGrid::uniform(config.k_min, config.k_max, config.k_count)?;
    Ok((grid, q, directions, ks.candidates().to_vec()))
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating directory {}", parent.display()))?;
        }
    }
    Ok(())
}

/// Generates scattering data per the configuration and writes it to `out`.
///
/// When the configuration lists noise levels, the first one is applied; an
/// empty list produces noise-free data.
pub fn cmd_forward(config: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    config.validate()?;
    let (grid, q, directions, ks) = build_problem(config)?;
    let exact = generate_dataset(&grid, &q, &directions, &ks)?;
    let dataset = match config.delta_star.first() {
        Some(&ds) if ds > 0.0 => apply_noise(&exact, ds, config.noise_mode)?,
        _ => exact,
    };
    ensure_parent(out)?;
    write_dataset(out, &dataset, &grid)?;
    Ok(out.to_path_buf())
}

fn grids_match(a: &Grid, b: &Grid) -> bool {
    a.center() == b.center() && a.side() == b.side() && a.n_per_axis() == b.n_per_axis()
}

/// The two wavenumbers whose amplitude matrices are best conditioned, when
/// at least two are admissible.
fn best_conditioned_pair(
    grid: &Arc<Grid>,
    dataset: &ScatteringDataset,
) -> Result<Option<[f64; 2]>> {
    let mut scored: Vec<(f64, f64)> = Vec::new();
    for &k in dataset.wavenumbers() {
        let matrix = assemble_amplitude_matrix(grid, dataset.directions().betas(), k)?;
        let proxy = condition_proxy(&matrix);
        if proxy.is_finite() {
            scored.push((proxy, k));
        }
    }
    if scored.len() < 2 {
        return Ok(None);
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Some([scored[0].1, scored[1].1]))
}

/// Inverts a stored dataset against the configuration's grid and potential,
/// writing the per-cell table, the summary, and returning both paths.
///
/// `check_compatibility` additionally reconstructs at the two
/// best-conditioned wavenumbers and records their disagreement.
pub fn cmd_invert(
    config: &ExperimentConfig,
    dataset_path: &Path,
    out_dir: &Path,
    check_compatibility: bool,
) -> Result<InvertArtifacts> {
    config.validate()?;
    let file = read_dataset(dataset_path)?;
    let config_grid = build_grid(config)?;
    if !grids_match(&file.grid, &config_grid) {
        bail!(
            "dataset grid (center {:?}, side {}, {} cells per axis) does not match the configuration",
            file.grid.center(),
            file.grid.side(),
            file.grid.n_per_axis()
        );
    }
    let grid = file.grid;
    let truth = sample_potential(&config.potential, &grid)?;
    // A zero truth admits no relative error; run the inversion without it.
    let truth_ref = if truth.values().iter().all(|&v| v == 0.0) { None } else { Some(&truth) };

    let mut report = invert(&file.dataset, &grid, &config.regularization, truth_ref)?;
    if check_compatibility {
        if let Some(pair) = best_conditioned_pair(&grid, &file.dataset)? {
            report.compatibility_spread =
                Some(compatibility_spread(&file.dataset, &grid, &config.regularization, &pair)?);
        }
    }

    let meta = RunMeta {
        delta_star: file.dataset.delta_star(),
        delta: file.dataset.delta(),
        compatibility_spread: report.compatibility_spread,
    };
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating directory {}", out_dir.display()))?;
    let report_path = out_dir.join("report.tsv");
    let summary_path = out_dir.join("summary.txt");
    write_cell_table(&report_path, &report, &grid, truth_ref, &meta)?;
    write_summary(&summary_path, &report, &meta)?;
    Ok(InvertArtifacts { report_path, summary_path, report })
}

/// Runs the full noise sweep: exact data once, then one inversion per noise
/// level, each in its own subdirectory, merged into `sweep.tsv` with one
/// `(delta_star, delta, err)` row per level in the configured order.
///
/// A failing level contributes an error-marker row instead of aborting the
/// sweep.
pub fn cmd_sweep(config: &ExperimentConfig, out_dir: &Path) -> Result<PathBuf> {
    config.validate()?;
    if config.delta_star.is_empty() {
        bail!("the sweep needs at least one noise level");
    }
    let (grid, q, directions, ks) = build_problem(config)?;
    let exact = generate_dataset(&grid, &q, &directions, &ks)?;
    let truth_ref = if q.values().iter().all(|&v| v == 0.0) { None } else { Some(&q) };

    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating directory {}", out_dir.display()))?;
    let mut table = String::from("# delta_star\tdelta\trelative_error\n");
    for &ds in &config.delta_star {
        let row = run_sweep_level(config, &grid, truth_ref, &exact, ds, out_dir);
        match row {
            Ok((delta, err)) => {
                let err = err.map_or_else(|| "-".to_string(), |e| e.to_string());
                table.push_str(&format!("{ds}\t{delta}\t{err}\n"));
            }
            Err(e) => {
                table.push_str(&format!("{ds}\t-\terror: {e:#}\n"));
            }
        }
    }
    let path = out_dir.join("sweep.tsv");
    fs::write(&path, table).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn run_sweep_level(
    config: &ExperimentConfig,
    grid: &Arc<Grid>,
    truth: Option<&RealField>,
    exact: &ScatteringDataset,
    delta_star: f64,
    out_dir: &Path,
) -> Result<(f64, Option<f64>)> {
    let dataset =
        if delta_star > 0.0 { apply_noise(exact, delta_star, config.noise_mode)? } else { exact.clone() };
    let level_dir = out_dir.join(format!("delta_{delta_star}"));
    fs::create_dir_all(&level_dir)
        .with_context(|| format!("creating directory {}", level_dir.display()))?;
    write_dataset(&level_dir.join("dataset.txt"), &dataset, grid)?;

    let report = invert(&dataset, grid, &config.regularization, truth)?;
    let meta = RunMeta {
        delta_star: dataset.delta_star(),
        delta: dataset.delta(),
        compatibility_spread: None,
    };
    write_cell_table(&level_dir.join("report.tsv"), &report, grid, truth, &meta)?;
    write_summary(&level_dir.join("summary.txt"), &report, &meta)?;
    Ok((dataset.delta().unwrap_or(0.0), report.relative_error))
}

/// Renders a slice of a stored per-cell table as an SVG plot.
pub fn cmd_plot(report_path: &Path, axis: Axis, index: usize, out: &Path) -> Result<PathBuf> {
    let report = read_cell_table(report_path)?;
    ensure_parent(out)?;
    write_slice_svg(&report, axis, index, out)?;
    Ok(out.to_path_buf())
}
