//! Experiment configuration: a flat key-value text format with dotted keys.
//!
//! ```text
//! # comment
//! grid.center = 0 0 0
//! grid.side = 1
//! grid.n_per_axis = 10
//! alpha0 = 1 0 0
//! potential = constant 10          # or: yukawa | zero
//! wavenumbers.min = 50
//! wavenumbers.max = 100
//! wavenumbers.count = 11
//! noise.delta_star = 0.04 0.02 0.01
//! noise.mode = alternating         # or: seeded
//! noise.seed = 7
//! regularization.eps0 = 1e-2
//! regularization.decay = 0.5
//! regularization.discrepancy_constant = 1.01
//! regularization.max_steps = 60
//! regularization.min_eps = 1e-14
//! output.dir = out
//! ```
//!
//! Every key is optional — omitted keys keep the defaults above, which are
//! the flagship constant-potential experiment. Unknown keys are rejected.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use scatrec_core::geometry::Point3;
use scatrec_core::noise::NoiseMode;
use scatrec_core::potential::PotentialSpec;
use scatrec_core::solver::RegularizationConfig;

/// Everything an experiment run needs.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Center of the cubic domain.
    pub grid_center: Point3,
    /// Side length of the cubic domain.
    pub grid_side: f64,
    /// Cells per axis (the grid has the cube of this many cells).
    pub grid_n_per_axis: usize,
    /// Incident direction.
    pub alpha0: Point3,
    /// The true potential.
    pub potential: PotentialSpec,
    /// Lower end of the wavenumber interval.
    pub k_min: f64,
    /// Upper end of the wavenumber interval.
    pub k_max: f64,
    /// Number of uniform wavenumber candidates inside the interval.
    pub k_count: usize,
    /// Relative noise levels, one sweep row each.
    pub delta_star: Vec<f64>,
    /// Sign pattern of the multiplicative noise.
    pub noise_mode: NoiseMode,
    /// Regularized-solver parameters.
    pub regularization: RegularizationConfig,
    /// Output directory.
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid_center: Point3::ZERO,
            grid_side: 1.0,
            grid_n_per_axis: 10,
            alpha0: Point3::new(1.0, 0.0, 0.0),
            potential: PotentialSpec::Constant(10.0),
            k_min: 50.0,
            k_max: 100.0,
            k_count: 11,
            delta_star: vec![0.04, 0.02, 0.01],
            noise_mode: NoiseMode::Alternating,
            regularization: RegularizationConfig::default(),
            out_dir: PathBuf::from("out"),
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value.parse().with_context(|| format!("{key}: expected a number, got `{value}`"))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value.parse().with_context(|| format!("{key}: expected an integer, got `{value}`"))
}

fn parse_point(key: &str, value: &str) -> Result<Point3> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() != 3 {
        bail!("{key}: expected three numbers, got `{value}`");
    }
    Ok(Point3::new(
        parse_f64(key, parts[0])?,
        parse_f64(key, parts[1])?,
        parse_f64(key, parts[2])?,
    ))
}

fn parse_potential(value: &str) -> Result<PotentialSpec> {
    let mut parts = value.split_whitespace();
    match parts.next() {
        Some("constant") => {
            let level = parts
                .next()
                .ok_or_else(|| anyhow!("potential: `constant` needs a value, e.g. `constant 10`"))?;
            Ok(PotentialSpec::Constant(parse_f64("potential", level)?))
        }
        Some("yukawa") => Ok(PotentialSpec::Yukawa),
        Some("zero") => Ok(PotentialSpec::Constant(0.0)),
        other => bail!("potential: unknown kind `{}`", other.unwrap_or("")),
    }
}

impl ExperimentConfig {
    /// Parses the key-value text, starting from the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = ExperimentConfig::default();
        let mut seed: Option<u64> = None;
        let mut mode_name: Option<String> = None;
        let mut seen = BTreeSet::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", lineno + 1))?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                bail!("line {}: duplicate key `{key}`", lineno + 1);
            }
            match key {
                "grid.center" => config.grid_center = parse_point(key, value)?,
                "grid.side" => config.grid_side = parse_f64(key, value)?,
                "grid.n_per_axis" => config.grid_n_per_axis = parse_usize(key, value)?,
                "alpha0" => config.alpha0 = parse_point(key, value)?,
                "potential" => config.potential = parse_potential(value)?,
                "wavenumbers.min" => config.k_min = parse_f64(key, value)?,
                "wavenumbers.max" => config.k_max = parse_f64(key, value)?,
                "wavenumbers.count" => config.k_count = parse_usize(key, value)?,
                "noise.delta_star" => {
                    config.delta_star = value
                        .split_whitespace()
                        .map(|v| parse_f64(key, v))
                        .collect::<Result<_>>()?;
                }
                "noise.mode" => mode_name = Some(value.to_string()),
                "noise.seed" => seed = Some(parse_usize(key, value)? as u64),
                "regularization.eps0" => config.regularization.eps0 = parse_f64(key, value)?,
                "regularization.decay" => config.regularization.decay = parse_f64(key, value)?,
                "regularization.discrepancy_constant" => {
                    config.regularization.discrepancy_constant = parse_f64(key, value)?;
                }
                "regularization.max_steps" => {
                    config.regularization.max_steps = parse_usize(key, value)?;
                }
                "regularization.min_eps" => {
                    config.regularization.min_eps = parse_f64(key, value)?;
                }
                "output.dir" => config.out_dir = PathBuf::from(value),
                _ => bail!("line {}: unknown key `{key}`", lineno + 1),
            }
        }

        config.noise_mode = match mode_name.as_deref() {
            None | Some("alternating") => NoiseMode::Alternating,
            Some("seeded") => NoiseMode::Seeded(seed.unwrap_or(0)),
            Some(other) => bail!("noise.mode: expected `alternating` or `seeded`, got `{other}`"),
        };
        config.validate()?;
        Ok(config)
    }

    /// Range checks beyond what the underlying constructors enforce.
    pub fn validate(&self) -> Result<()> {
        if self.delta_star.iter().any(|&d| !(d.is_finite() && d >= 0.0)) {
            bail!("noise.delta_star: levels must be finite and nonnegative");
        }
        self.regularization
            .validate()
            .map_err(|e| anyhow!("regularization: {e}"))?;
        Ok(())
    }

    /// Overrides the noise mode with an explicitly seeded one.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.noise_mode = NoiseMode::Seeded(seed);
        self
    }

    /// Renders the configuration back as parseable key-value text.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let p = |v: Point3| format!("{} {} {}", v.x, v.y, v.z);
        let _ = writeln!(s, "grid.center = {}", p(self.grid_center));
        let _ = writeln!(s, "grid.side = {}", self.grid_side);
        let _ = writeln!(s, "grid.n_per_axis = {}", self.grid_n_per_axis);
        let _ = writeln!(s, "alpha0 = {}", p(self.alpha0));
        match &self.potential {
            PotentialSpec::Constant(v) => {
                let _ = writeln!(s, "potential = constant {v}");
            }
            PotentialSpec::Yukawa => {
                let _ = writeln!(s, "potential = yukawa");
            }
            PotentialSpec::Tabulated(_) => {
                // Tabulated potentials are an in-memory construct; a config
                // file cannot express one.
                let _ = writeln!(s, "# potential = <tabulated, not expressible>");
            }
        }
        let _ = writeln!(s, "wavenumbers.min = {}", self.k_min);
        let _ = writeln!(s, "wavenumbers.max = {}", self.k_max);
        let _ = writeln!(s, "wavenumbers.count = {}", self.k_count);
        let levels: Vec<String> = self.delta_star.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(s, "noise.delta_star = {}", levels.join(" "));
        match self.noise_mode {
            NoiseMode::Alternating => {
                let _ = writeln!(s, "noise.mode = alternating");
            }
            NoiseMode::Seeded(seed) => {
                let _ = writeln!(s, "noise.mode = seeded");
                let _ = writeln!(s, "noise.seed = {seed}");
            }
        }
        let r = &self.regularization;
        let _ = writeln!(s, "regularization.eps0 = {}", r.eps0);
        let _ = writeln!(s, "regularization.decay = {}", r.decay);
        let _ = writeln!(s, "regularization.discrepancy_constant = {}", r.discrepancy_constant);
        let _ = writeln!(s, "regularization.max_steps = {}", r.max_steps);
        let _ = writeln!(s, "regularization.min_eps = {}", r.min_eps);
        let _ = writeln!(s, "output.dir = {}", self.out_dir.display());
        s
    }
}
