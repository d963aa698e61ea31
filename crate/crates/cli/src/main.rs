//! `scatrec` — reconstruct a compactly supported potential from scattering
//! amplitudes measured at one incident direction, many scattered directions,
//! and an interval of wavenumbers.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use scatrec_cli::commands;
use scatrec_cli::config::ExperimentConfig;
use scatrec_cli::plot::Axis;

#[derive(Parser)]
#[command(
    name = "scatrec",
    version,
    about = "Potential reconstruction from non-over-determined scattering data"
)]
struct Cli {
    /// Experiment configuration file (key = value lines); defaults apply
    /// when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for randomized noise; switches the noise mode to seeded.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate scattering data and write it as a dataset file.
    Forward {
        /// Output dataset path; defaults to <output.dir>/dataset.txt.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct the potential from a dataset file.
    Invert {
        /// Input dataset path.
        #[arg(long)]
        dataset: PathBuf,
        /// Output directory; defaults to the configured output.dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip the cross-wavenumber compatibility check (saves two solves).
        #[arg(long)]
        no_compatibility: bool,
    },
    /// Run the full noise-level sweep and merge the results into one table.
    Sweep {
        /// Output directory; defaults to the configured output.dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a slice of a reconstruction report as an SVG plot.
    Plot {
        /// Per-cell report table written by `invert` or `sweep`.
        #[arg(long)]
        report: PathBuf,
        /// Axis along which the slice varies.
        #[arg(long, default_value = "x")]
        axis: Axis,
        /// Fixed index on the two remaining axes.
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Output SVG path; defaults to the report path with extension .svg.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&PathBuf>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut config = match path {
        Some(p) => {
            let text =
                fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ExperimentConfig::parse(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = seed {
        config = config.with_seed(seed);
    }
    config.validate()?;
    Ok(config)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let config = load_config(cli.config.as_ref(), cli.seed)?;
    match cli.command {
        Command::Forward { out } => {
            let out = out.unwrap_or_else(|| config.out_dir.join("dataset.txt"));
            let path = commands::cmd_forward(&config, &out)?;
            println!("wrote dataset to {}", path.display());
        }
        Command::Invert { dataset, out, no_compatibility } => {
            let out = out.unwrap_or_else(|| config.out_dir.clone());
            let arts = commands::cmd_invert(&config, &dataset, &out, !no_compatibility)?;
            println!("wrote report to {}", arts.report_path.display());
            println!("wrote summary to {}", arts.summary_path.display());
            println!("chosen k = {}", arts.report.chosen_k);
            if let Some(err) = arts.report.relative_error {
                println!("relative error = {err}");
            }
        }
        Command::Sweep { out } => {
            let out = out.unwrap_or_else(|| config.out_dir.clone());
            let path = commands::cmd_sweep(&config, &out)?;
            println!("wrote sweep table to {}", path.display());
        }
        Command::Plot { report, axis, index, out } => {
            let out = out.unwrap_or_else(|| report.with_extension("svg"));
            let path = commands::cmd_plot(&report, axis, index, &out)?;
            println!("wrote plot to {}", path.display());
        }
    }
    Ok(())
}
