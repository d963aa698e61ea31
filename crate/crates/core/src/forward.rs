//! The discrete forward scattering problem: assembly of the collocation
//! system for the total field, synthesis of scattering amplitudes, and the
//! dataset container consumed by the inverse pipeline.
//!
//! On a partition of the scatterer into cells with centers `y_p` and volumes
//! `vol_p`, the total field `u` solves
//!
//! ```text
//! u_p + sum_{j != p} g(y_p, y_j, k) q_j vol_j u_j = exp(i k alpha0 . y_p)
//! ```
//!
//! (the self-cell term is excluded: the kernel is weakly singular and its
//! self-integral vanishes with the cell size). With `h = q u`, the scattering
//! amplitude in direction `beta` is
//!
//! ```text
//! A(beta, k) = -(1/4 pi) sum_p exp(-i k beta . y_p) h_p vol_p .
//! ```
//!
//! The same quadrature is used verbatim by the inverse path, so inverting
//! noise-free synthetic data reproduces `h` up to roundoff.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Error;
use crate::geometry::{greens_function, incident_wave, DirectionSet, Grid, Point3, UNIT_NORM_TOL};
use crate::linalg::{CMatrix, LuFactors};
use crate::potential::RealField;

/// A complex scalar field given by one value per grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl ComplexField {
    /// Wraps per-cell values, validating the length against the grid.
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Self, Error> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument("field length must equal the number of grid cells"));
        }
        Ok(ComplexField { grid, values })
    }

    /// The underlying partition.
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Per-cell values in grid order.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Consumes the field and returns its values.
    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// The volume-weighted L2 norm `sqrt(sum_p |v_p|^2 vol_p)`.
    pub fn weighted_l2_norm(&self) -> f64 {
        self.values
            .iter()
            .zip(self.grid.volumes())
            .map(|(v, vol)| v.norm_sqr() * vol)
            .sum::<f64>()
            .sqrt()
    }

    /// Share of the field living in the imaginary part: the ratio of the
    /// weighted norms `||Im v|| / ||v||`, in `[0, 1]`, with the zero field
    /// reported as 0.
    pub fn imag_norm_ratio(&self) -> f64 {
        let mut full = 0.0;
        let mut im = 0.0;
        for (v, vol) in self.values.iter().zip(self.grid.volumes()) {
            full += v.norm_sqr() * vol;
            im += v.im * v.im * vol;
        }
        if im == 0.0 {
            0.0
        } else {
            im.sqrt() / full.sqrt()
        }
    }
}

/// A square complex linear system `matrix x = rhs`.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    /// The system matrix.
    pub matrix: CMatrix,
    /// The right-hand side; its length equals the matrix dimension.
    pub rhs: Vec<Complex64>,
}

impl LinearSystem {
    /// Validates squareness and the rhs length.
    pub fn new(matrix: CMatrix, rhs: Vec<Complex64>) -> Result<Self, Error> {
        if !matrix.is_square() {
            return Err(Error::InvalidArgument("system matrix must be square"));
        }
        if rhs.len() != matrix.rows() {
            return Err(Error::InvalidArgument("rhs length must match the matrix dimension"));
        }
        Ok(LinearSystem { matrix, rhs })
    }

    /// Dimension of the system.
    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    /// True for the empty system.
    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }
}

fn check_wavenumber(k: f64) -> Result<(), Error> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidArgument("wavenumber must be finite and positive"));
    }
    Ok(())
}

fn check_direction(d: Point3) -> Result<(), Error> {
    if !(d.is_finite() && (d.norm() - 1.0).abs() <= UNIT_NORM_TOL) {
        return Err(Error::InvalidArgument("direction must be a unit vector"));
    }
    Ok(())
}

/// Assembles the collocation system for the total field at wavenumber `k`
/// and incident direction `alpha0`:
/// `M[p][p] = 1`, `M[p][j] = g(y_p, y_j, k) q_j vol_j` for `j != p`, and
/// `rhs[p] = exp(i k alpha0 . y_p)`.
pub fn assemble_forward_system(
    grid: &Arc<Grid>,
    q: &RealField,
    k: f64,
    alpha0: Point3,
) -> Result<LinearSystem, Error> {
    if q.grid().as_ref() != grid.as_ref() {
        return Err(Error::InvalidArgument("potential is sampled on a different grid"));
    }
    check_wavenumber(k)?;
    check_direction(alpha0)?;

    let n = grid.len();
    let points = grid.points();
    let q_vol: Vec<f64> =
        q.values().iter().zip(grid.volumes()).map(|(qv, vol)| qv * vol).collect();

    let mut matrix = CMatrix::zeros(n, n);
    for p in 0..n {
        let xp = points[p];
        let row = matrix.row_mut(p);
        for (j, entry) in row.iter_mut().enumerate() {
            if j == p {
                *entry = Complex64::new(1.0, 0.0);
            } else if q_vol[j] != 0.0 {
                *entry = greens_function(xp, points[j], k)? * q_vol[j];
            }
        }
    }
    let rhs = points.iter().map(|&x| incident_wave(x, k, alpha0)).collect();
    LinearSystem::new(matrix, rhs)
}

/// Solves the forward system for the total field on `grid`.
pub fn solve_forward(system: &LinearSystem, grid: &Arc<Grid>) -> Result<ComplexField, Error> {
    if system.len() != grid.len() {
        return Err(Error::InvalidArgument("system dimension must equal the number of grid cells"));
    }
    let lu = LuFactors::factor(system.matrix.clone())?;
    ComplexField::new(Arc::clone(grid), lu.solve(&system.rhs))
}

/// The auxiliary field `h = q u`, defined cellwise.
pub fn h_field(q: &RealField, u: &ComplexField) -> Result<ComplexField, Error> {
    if q.grid().as_ref() != u.grid().as_ref() {
        return Err(Error::InvalidArgument("fields are sampled on different grids"));
    }
    let values = q.values().iter().zip(u.values()).map(|(qv, uv)| uv * *qv).collect();
    ComplexField::new(Arc::clone(u.grid()), values)
}

/// Scattering amplitudes `A(beta_j, k)` synthesized from the auxiliary
/// field `h` by the discrete far-field quadrature.
pub fn exact_amplitudes(
    h: &ComplexField,
    betas: &[Point3],
    k: f64,
) -> Result<Vec<Complex64>, Error> {
    check_wavenumber(k)?;
    if betas.is_empty() {
        return Err(Error::InvalidArgument("at least one scattered direction is required"));
    }
    for &b in betas {
        check_direction(b)?;
    }
    let grid = h.grid();
    let points = grid.points();
    let volumes = grid.volumes();
    let scale = -1.0 / (4.0 * PI);
    let mut out = Vec::with_capacity(betas.len());
    for &beta in betas {
        let mut s = Complex64::new(0.0, 0.0);
        for ((&y, &vol), &hv) in points.iter().zip(volumes).zip(h.values()) {
            s += Complex64::cis(-k * beta.dot(y)) * hv * vol;
        }
        out.push(s * scale);
    }
    Ok(out)
}

/// Scattering data for one incident direction: amplitudes for every
/// `(scattered direction, wavenumber)` pair, optionally with the exact
/// (noise-free) reference and the noise bookkeeping.
#[derive(Debug, Clone)]
pub struct ScatteringDataset {
    directions: DirectionSet,
    wavenumbers: Vec<f64>,
    /// Row `j`, column `m`: amplitude for direction `beta_j` at `k_m`.
    amplitudes: CMatrix,
    exact_amplitudes: Option<CMatrix>,
    delta_star: Option<f64>,
    delta: Option<f64>,
}

impl ScatteringDataset {
    /// A noise-free dataset.
    pub fn exact(
        directions: DirectionSet,
        wavenumbers: Vec<f64>,
        amplitudes: CMatrix,
    ) -> Result<Self, Error> {
        ScatteringDataset::from_parts(directions, wavenumbers, amplitudes, None, None, None)
    }

    /// Assembles a dataset from parts, validating every invariant: matching
    /// shapes, finite entries, positive strictly increasing wavenumbers, and
    /// consistency of `delta` with the recorded matrices when both noisy and
    /// exact amplitudes are present.
    pub fn from_parts(
        directions: DirectionSet,
        wavenumbers: Vec<f64>,
        amplitudes: CMatrix,
        exact_amplitudes: Option<CMatrix>,
        delta_star: Option<f64>,
        delta: Option<f64>,
    ) -> Result<Self, Error> {
        if wavenumbers.is_empty() {
            return Err(Error::InvalidArgument("dataset needs at least one wavenumber"));
        }
        for &k in &wavenumbers {
            check_wavenumber(k)?;
        }
        if wavenumbers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("wavenumbers must be strictly increasing"));
        }
        let rows = directions.len();
        let cols = wavenumbers.len();
        let shape_ok = |m: &CMatrix| m.rows() == rows && m.cols() == cols;
        if !shape_ok(&amplitudes) {
            return Err(Error::InvalidArgument(
                "amplitude matrix shape must be directions x wavenumbers",
            ));
        }
        if !amplitudes.data().iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::InvalidArgument("amplitudes must be finite"));
        }
        if let Some(exact) = &exact_amplitudes {
            if !shape_ok(exact) {
                return Err(Error::InvalidArgument(
                    "exact amplitude matrix shape must be directions x wavenumbers",
                ));
            }
        }
        if let Some(ds) = delta_star {
            if !(ds.is_finite() && ds >= 0.0) {
                return Err(Error::InvalidArgument("delta_star must be finite and nonnegative"));
            }
        }
        if let Some(d) = delta {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::InvalidArgument("delta must be finite and nonnegative"));
            }
            let exact = exact_amplitudes.as_ref().ok_or(Error::InvalidArgument(
                "a recorded noise norm requires the exact amplitudes",
            ))?;
            let recomputed = crate::noise::noise_norm(&amplitudes, exact)?;
            let scale = exact.frobenius_norm().max(1.0);
            if (recomputed - d).abs() > 1e-10 * scale {
                return Err(Error::InvalidArgument(
                    "recorded noise norm is inconsistent with the amplitude matrices",
                ));
            }
        }
        Ok(ScatteringDataset {
            directions,
            wavenumbers,
            amplitudes,
            exact_amplitudes,
            delta_star,
            delta,
        })
    }

    /// Directions (scattered and incident).
    pub fn directions(&self) -> &DirectionSet {
        &self.directions
    }

    /// Probed wavenumbers, strictly increasing.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// The working amplitudes (noisy when noise was applied).
    pub fn amplitudes(&self) -> &CMatrix {
        &self.amplitudes
    }

    /// The exact reference amplitudes, when known.
    pub fn exact_amplitudes(&self) -> Option<&CMatrix> {
        self.exact_amplitudes.as_ref()
    }

    /// The relative noise level the data was perturbed with.
    pub fn delta_star(&self) -> Option<f64> {
        self.delta_star
    }

    /// The absolute noise norm `||A_noisy - A_exact||_F`.
    pub fn delta(&self) -> Option<f64> {
        self.delta
    }

    /// Column `m` of the working amplitudes: one value per direction.
    pub fn amplitude_column(&self, m: usize) -> Vec<Complex64> {
        (0..self.amplitudes.rows()).map(|j| self.amplitudes[(j, m)]).collect()
    }
}

/// Runs the forward pipeline for every candidate wavenumber and collects the
/// exact scattering amplitudes into a dataset.
pub fn generate_dataset(
    grid: &Arc<Grid>,
    q: &RealField,
    directions: &DirectionSet,
    wavenumbers: &[f64],
) -> Result<ScatteringDataset, Error> {
    if wavenumbers.is_empty() {
        return Err(Error::InvalidArgument("dataset needs at least one wavenumber"));
    }
    let mut amplitudes = CMatrix::zeros(directions.len(), wavenumbers.len());
    for (m, &k) in wavenumbers.iter().enumerate() {
        let column = (|| -> Result<Vec<Complex64>, Error> {
            let system = assemble_forward_system(grid, q, k, directions.alpha0())?;
            let u = solve_forward(&system, grid)?;
            let h = h_field(q, &u)?;
            exact_amplitudes(&h, directions.betas(), k)
        })()
        .map_err(|e| Error::AtWavenumber { k, inner: alloc::boxed::Box::new(e) })?;
        for (j, a) in column.into_iter().enumerate() {
            amplitudes[(j, m)] = a;
        }
    }
    ScatteringDataset::exact(directions.clone(), wavenumbers.to_vec(), amplitudes)
}
