//! Cube partitions, direction sets, wavenumber grids, and the elementary
//! wave kernels shared by the forward and inverse paths.
//!
//! The scatterer lives in an axis-aligned cube `D` which is partitioned into
//! `n^3` congruent sub-cubes; every field in this crate is a vector indexed
//! by the resulting cell centers in lexicographic `(i, j, l)` order. Scattered
//! directions are drawn quasi-uniformly from the unit sphere with a golden
//! angle (Fibonacci) lattice, and wavenumbers from an open interval
//! `(k_min, k_max)`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::Error;

/// Tolerance for accepting a direction vector as unit length.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A point or direction in 3D space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    /// First coordinate.
    pub x: f64,
    /// Second coordinate.
    pub y: f64,
    /// Third coordinate.
    pub z: f64,
}

impl Point3 {
    /// The origin.
    pub const ZERO: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    /// Creates a point from its coordinates.
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    /// Euclidean inner product.
    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Euclidean norm.
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Euclidean distance to `other`.
    pub fn distance(self, other: Point3) -> f64 {
        (self - other).norm()
    }

    /// True when every coordinate is finite.
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, rhs: Point3) -> Point3 {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, rhs: Point3) -> Point3 {
        Point3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

/// A partition of an axis-aligned cube into `n^3` congruent sub-cubes.
///
/// Cell `p` corresponds to the lexicographic triple `(i, j, l)` with
/// `p = (i * n + j) * n + l`; its center and volume are exposed through
/// [`Grid::points`] and [`Grid::volumes`].
#[derive(Debug, Clone)]
pub struct Grid {
    center: Point3,
    side: f64,
    n_per_axis: usize,
    points: Vec<Point3>,
    volumes: Vec<f64>,
}

impl PartialEq for Grid {
    /// Two grids are equal when they partition the same cube the same way;
    /// cell centers and volumes are derived data.
    fn eq(&self, other: &Self) -> bool {
        self.center == other.center
            && self.side == other.side
            && self.n_per_axis == other.n_per_axis
    }
}

impl Grid {
    /// Center of the partitioned cube.
    pub fn center(&self) -> Point3 {
        self.center
    }

    /// Side length of the partitioned cube.
    pub fn side(&self) -> f64 {
        self.side
    }

    /// Number of cells per axis.
    pub fn n_per_axis(&self) -> usize {
        self.n_per_axis
    }

    /// Total number of cells `P = n^3`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: a valid partition has at least one cell.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Cell centers in lexicographic order.
    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    /// Cell volumes in the same order as [`Grid::points`].
    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    /// Flat index of the cell with axis indices `(i, j, l)`.
    pub fn flat_index(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.n_per_axis + j) * self.n_per_axis + l
    }

    /// Axis indices `(i, j, l)` of the cell with flat index `p`.
    pub fn axis_indices(&self, p: usize) -> (usize, usize, usize) {
        let n = self.n_per_axis;
        (p / (n * n), (p / n) % n, p % n)
    }
}

/// Partitions the cube with the given `center` and `side` into
/// `n_per_axis^3` congruent sub-cubes and returns their centers and volumes.
///
/// Along each axis the cell centers are
/// `center - side/2 + (idx + 1/2) * side / n_per_axis`, so the union of the
/// cells tiles the cube exactly and every cell has volume
/// `(side / n_per_axis)^3`.
pub fn partition_cube(center: Point3, side: f64, n_per_axis: usize) -> Result<Grid, Error> {
    if !center.is_finite() {
        return Err(Error::InvalidArgument("cube center must be finite"));
    }
    if !(side.is_finite() && side > 0.0) {
        return Err(Error::InvalidArgument("cube side must be finite and positive"));
    }
    if n_per_axis == 0 {
        return Err(Error::InvalidArgument("cells per axis must be at least 1"));
    }

    let n = n_per_axis;
    let h = side / n as f64;
    let origin = center + Point3::new(-side / 2.0, -side / 2.0, -side / 2.0);
    // One shared table of per-axis offsets keeps the three coordinates of a
    // cell bitwise identical to the 1D formula.
    let offsets: Vec<f64> = (0..n).map(|idx| (idx as f64 + 0.5) * h).collect();

    let mut points = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                points.push(origin + Point3::new(offsets[i], offsets[j], offsets[l]));
            }
        }
    }
    let volumes = alloc::vec![h * h * h; n * n * n];

    Ok(Grid { center, side, n_per_axis, points, volumes })
}

/// Returns `count` quasi-uniform unit vectors from the golden angle
/// (Fibonacci) lattice on the sphere.
///
/// Point `i` has height `z_i = 1 - (2i + 1)/count` and azimuth
/// `phi_i = i * pi * (3 - sqrt(5))`; the construction is deterministic and
/// produces pairwise distinct directions for any `count >= 1`.
pub fn sphere_directions(count: usize) -> Result<Vec<Point3>, Error> {
    if count == 0 {
        return Err(Error::InvalidArgument("direction count must be at least 1"));
    }

    let golden_angle = PI * (3.0 - 5.0_f64.sqrt());
    let mut dirs = Vec::with_capacity(count);
    for i in 0..count {
        let z = 1.0 - (2 * i + 1) as f64 / count as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden_angle * i as f64;
        let v = Point3::new(r * phi.cos(), r * phi.sin(), z);
        // Renormalize so the unit-length invariant holds to roundoff even
        // after the trigonometric evaluations.
        let norm = v.norm();
        dirs.push(v * (1.0 / norm));
    }
    Ok(dirs)
}

/// A set of scattered directions together with the fixed incident direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    betas: Vec<Point3>,
    alpha0: Point3,
}

impl DirectionSet {
    /// Validates that `alpha0` and every `beta` are unit vectors (within
    /// [`UNIT_NORM_TOL`]) and that the scattered directions are pairwise
    /// distinct.
    pub fn new(betas: Vec<Point3>, alpha0: Point3) -> Result<Self, Error> {
        if betas.is_empty() {
            return Err(Error::InvalidArgument("at least one scattered direction is required"));
        }
        let unit = |v: Point3| v.is_finite() && (v.norm() - 1.0).abs() <= UNIT_NORM_TOL;
        if !unit(alpha0) {
            return Err(Error::InvalidArgument("incident direction must be a unit vector"));
        }
        if betas.iter().any(|&b| !unit(b)) {
            return Err(Error::InvalidArgument("scattered directions must be unit vectors"));
        }
        for (i, a) in betas.iter().enumerate() {
            for b in betas.iter().skip(i + 1) {
                if a == b {
                    return Err(Error::InvalidArgument(
                        "scattered directions must be pairwise distinct",
                    ));
                }
            }
        }
        Ok(DirectionSet { betas, alpha0 })
    }

    /// Builds a direction set from the golden angle lattice with `count`
    /// scattered directions.
    pub fn fibonacci(count: usize, alpha0: Point3) -> Result<Self, Error> {
        DirectionSet::new(sphere_directions(count)?, alpha0)
    }

    /// Scattered directions.
    pub fn betas(&self) -> &[Point3] {
        &self.betas
    }

    /// Incident direction.
    pub fn alpha0(&self) -> Point3 {
        self.alpha0
    }

    /// Number of scattered directions.
    pub fn len(&self) -> usize {
        self.betas.len()
    }

    /// Always false: construction requires at least one direction.
    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }
}

/// An interval of admissible wavenumbers together with the finite candidate
/// set actually probed by an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct WavenumberGrid {
    k_min: f64,
    k_max: f64,
    candidates: Vec<f64>,
}

impl WavenumberGrid {
    /// Validates `0 <= k_min < k_max` and that the candidates are strictly
    /// increasing and lie strictly inside `(k_min, k_max)`.
    pub fn new(k_min: f64, k_max: f64, candidates: Vec<f64>) -> Result<Self, Error> {
        if !(k_min.is_finite() && k_max.is_finite() && 0.0 <= k_min && k_min < k_max) {
            return Err(Error::InvalidArgument(
                "wavenumber interval must satisfy 0 <= k_min < k_max",
            ));
        }
        if candidates.is_empty() {
            return Err(Error::InvalidArgument("at least one candidate wavenumber is required"));
        }
        let inside = |k: f64| k.is_finite() && k_min < k && k < k_max;
        if !candidates.iter().all(|&k| inside(k)) {
            return Err(Error::InvalidArgument(
                "candidate wavenumbers must lie strictly inside the interval",
            ));
        }
        if candidates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "candidate wavenumbers must be strictly increasing",
            ));
        }
        Ok(WavenumberGrid { k_min, k_max, candidates })
    }

    /// `count` candidates placed at the midpoints of a uniform subdivision of
    /// `[k_min, k_max]`, so they are uniformly spaced and strictly interior.
    pub fn uniform(k_min: f64, k_max: f64, count: usize) -> Result<Self, Error> {
        if count == 0 {
            return Err(Error::InvalidArgument("at least one candidate wavenumber is required"));
        }
        let width = k_max - k_min;
        let candidates = (0..count)
            .map(|i| k_min + width * (i as f64 + 0.5) / count as f64)
            .collect();
        WavenumberGrid::new(k_min, k_max, candidates)
    }

    /// Lower end of the admissible interval.
    pub fn k_min(&self) -> f64 {
        self.k_min
    }

    /// Upper end of the admissible interval.
    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    /// The probed wavenumbers, strictly increasing.
    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }
}

/// The incident plane wave `exp(i k alpha0 . x)`.
pub fn incident_wave(x: Point3, k: f64, alpha0: Point3) -> Complex64 {
    Complex64::cis(k * alpha0.dot(x))
}

/// The outgoing Green's function of the Helmholtz operator,
/// `g(x, y, k) = exp(i k |x - y|) / (4 pi |x - y|)`.
///
/// Returns a singularity error when `x == y`.
pub fn greens_function(x: Point3, y: Point3, k: f64) -> Result<Complex64, Error> {
    let r = x.distance(y);
    if r == 0.0 {
        return Err(Error::Singularity("Green's function evaluated at zero distance"));
    }
    Ok(Complex64::cis(k * r) / (4.0 * PI * r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    /// 1/(4 pi), the static Green's function at unit distance.
    const INV_4PI: f64 = 0.079_577_471_545_947_67;

    #[test]
    fn partition_of_unit_cube_into_thousand_cells() {
        let grid = partition_cube(Point3::ZERO, 1.0, 10).unwrap();
        assert_eq!(grid.len(), 1000);
        assert!(grid.volumes().iter().all(|&v| (v - 1e-3).abs() < 1e-18));

        // Lexicographic order: first cell at (-0.45, -0.45, -0.45), last at
        // (0.45, 0.45, 0.45), and the l index varies fastest.
        let first = grid.points()[0];
        let second = grid.points()[1];
        let last = grid.points()[999];
        assert!((first.x + 0.45).abs() < 1e-15);
        assert!((first.y + 0.45).abs() < 1e-15);
        assert!((first.z + 0.45).abs() < 1e-15);
        assert!((second.z + 0.35).abs() < 1e-15);
        assert_eq!(second.x, first.x);
        assert_eq!(second.y, first.y);
        assert!((last.x - 0.45).abs() < 1e-15);
        assert!((last.y - 0.45).abs() < 1e-15);
        assert!((last.z - 0.45).abs() < 1e-15);

        // Every coordinate is one of +-0.05, +-0.15, ..., +-0.45.
        for p in grid.points() {
            for c in [p.x, p.y, p.z] {
                let scaled = (c * 10.0).abs() * 2.0; // in {1, 3, 5, 7, 9}
                let nearest_odd = 2.0 * ((scaled - 1.0) / 2.0).round() + 1.0;
                assert!((scaled - nearest_odd).abs() < 1e-12, "unexpected coordinate {c}");
            }
        }
    }

    #[test]
    fn partition_single_cell() {
        let grid = partition_cube(Point3::ZERO, 1.0, 1).unwrap();
        assert_eq!(grid.len(), 1);
        assert_eq!(grid.points()[0], Point3::ZERO);
        assert!((grid.volumes()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partition_eight_cells_of_side_two_cube() {
        let grid = partition_cube(Point3::ZERO, 2.0, 2).unwrap();
        assert_eq!(grid.len(), 8);
        let total: f64 = grid.volumes().iter().sum();
        assert!((total - 8.0).abs() < 1e-12);
        for p in grid.points() {
            assert!((p.x.abs() - 0.5).abs() < 1e-15);
            assert!((p.y.abs() - 0.5).abs() < 1e-15);
            assert!((p.z.abs() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn partition_rejects_bad_arguments() {
        assert!(matches!(
            partition_cube(Point3::ZERO, 0.0, 4),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            partition_cube(Point3::ZERO, -1.0, 4),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            partition_cube(Point3::ZERO, f64::NAN, 4),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            partition_cube(Point3::ZERO, 1.0, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            partition_cube(Point3::new(f64::INFINITY, 0.0, 0.0), 1.0, 2),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn flat_and_axis_indices_are_inverse() {
        let grid = partition_cube(Point3::ZERO, 1.0, 7).unwrap();
        for p in 0..grid.len() {
            let (i, j, l) = grid.axis_indices(p);
            assert_eq!(grid.flat_index(i, j, l), p);
        }
    }

    #[test]
    fn single_direction_is_north_pole_image() {
        // count = 1: z = 0, phi = 0, so the direction is (1, 0, 0).
        let dirs = sphere_directions(1).unwrap();
        assert_eq!(dirs.len(), 1);
        assert!((dirs[0].x - 1.0).abs() < 1e-15);
        assert!(dirs[0].y.abs() < 1e-15);
        assert!(dirs[0].z.abs() < 1e-15);
    }

    #[test]
    fn two_directions_point_into_opposite_hemispheres() {
        let dirs = sphere_directions(2).unwrap();
        assert_eq!(dirs.len(), 2);
        assert!((dirs[0].z - 0.5).abs() < 1e-15);
        assert!((dirs[1].z + 0.5).abs() < 1e-15);
        assert!(dirs[0].dot(dirs[1]) < 0.0, "two lattice directions should subtend > 90 degrees");
    }

    #[test]
    fn directions_are_unit_distinct_and_deterministic() {
        let dirs = sphere_directions(1000).unwrap();
        assert_eq!(dirs.len(), 1000);
        for d in &dirs {
            assert!((d.norm() - 1.0).abs() <= UNIT_NORM_TOL);
        }
        // Pairwise distinct with a healthy margin.
        let mut min_dist = f64::INFINITY;
        for (i, a) in dirs.iter().enumerate() {
            for b in dirs.iter().skip(i + 1) {
                min_dist = min_dist.min(a.distance(*b));
            }
        }
        assert!(min_dist > 1e-3, "minimum pairwise separation {min_dist} too small");
        // Deterministic: a second evaluation is bitwise identical.
        let again = sphere_directions(1000).unwrap();
        assert_eq!(dirs, again);
    }

    #[test]
    fn sphere_directions_rejects_zero_count() {
        assert!(matches!(sphere_directions(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn direction_set_validates_inputs() {
        let e1 = Point3::new(1.0, 0.0, 0.0);
        let e2 = Point3::new(0.0, 1.0, 0.0);
        assert!(DirectionSet::new(vec![e1, e2], e1).is_ok());
        // Non-unit incident direction.
        assert!(DirectionSet::new(vec![e1], Point3::new(2.0, 0.0, 0.0)).is_err());
        // Non-unit scattered direction.
        assert!(DirectionSet::new(vec![Point3::new(0.5, 0.0, 0.0)], e1).is_err());
        // Duplicate scattered directions.
        assert!(DirectionSet::new(vec![e1, e1], e1).is_err());
        // Empty set.
        assert!(DirectionSet::new(vec![], e1).is_err());
    }

    #[test]
    fn wavenumber_grid_validates_inputs() {
        assert!(WavenumberGrid::new(50.0, 100.0, vec![60.0, 75.0, 90.0]).is_ok());
        // Candidates must be strictly inside the interval.
        assert!(WavenumberGrid::new(50.0, 100.0, vec![50.0, 75.0]).is_err());
        assert!(WavenumberGrid::new(50.0, 100.0, vec![75.0, 100.0]).is_err());
        // Strictly increasing.
        assert!(WavenumberGrid::new(50.0, 100.0, vec![75.0, 75.0]).is_err());
        assert!(WavenumberGrid::new(50.0, 100.0, vec![90.0, 60.0]).is_err());
        // Interval must be ordered and nonnegative.
        assert!(WavenumberGrid::new(-1.0, 100.0, vec![50.0]).is_err());
        assert!(WavenumberGrid::new(100.0, 50.0, vec![75.0]).is_err());
        assert!(WavenumberGrid::new(50.0, 100.0, vec![]).is_err());
    }

    #[test]
    fn uniform_wavenumbers_are_interior_midpoints() {
        let grid = WavenumberGrid::uniform(50.0, 100.0, 11).unwrap();
        let ks = grid.candidates();
        assert_eq!(ks.len(), 11);
        // Midpoint rule: first at 50 + 50/22, last at 100 - 50/22, spacing 50/11.
        let h = 50.0 / 11.0;
        for (i, &k) in ks.iter().enumerate() {
            let expected = 50.0 + (i as f64 + 0.5) * h;
            assert!((k - expected).abs() < 1e-12);
            assert!(50.0 < k && k < 100.0);
        }
    }

    #[test]
    fn incident_wave_matches_hand_values() {
        let alpha0 = Point3::new(1.0, 0.0, 0.0);
        // Perpendicular displacement: phase zero.
        let v = incident_wave(Point3::new(0.0, 0.3, -0.2), 57.0, alpha0);
        assert!((v.re - 1.0).abs() < 1e-15 && v.im.abs() < 1e-15);
        // Zero wavenumber: phase zero.
        let v = incident_wave(Point3::new(0.4, 0.1, 0.2), 0.0, alpha0);
        assert!((v.re - 1.0).abs() < 1e-15 && v.im.abs() < 1e-15);
        // k = pi along the incident direction at unit distance: exp(i pi) = -1.
        let v = incident_wave(Point3::new(1.0, 0.0, 0.0), PI, alpha0);
        assert!((v.re + 1.0).abs() < 1e-15 && v.im.abs() < 1e-12);
    }

    #[test]
    fn greens_function_matches_hand_values() {
        let x = Point3::new(1.0, 0.0, 0.0);
        // Static kernel at unit distance: 1/(4 pi).
        let g = greens_function(x, Point3::ZERO, 0.0).unwrap();
        assert!((g.re - INV_4PI).abs() < 1e-16);
        assert!(g.im.abs() < 1e-16);
        // k = pi at unit distance: exp(i pi)/(4 pi) = -1/(4 pi).
        let g = greens_function(x, Point3::ZERO, PI).unwrap();
        assert!((g.re + INV_4PI).abs() < 1e-16);
        assert!(g.im.abs() < 1e-16);
        // Coincident points are singular.
        assert!(matches!(greens_function(x, x, 1.0), Err(Error::Singularity(_))));
    }

    fn small_coord() -> impl Strategy<Value = f64> {
        -10.0..10.0f64
    }

    proptest! {
        #[test]
        fn incident_wave_has_unit_modulus(
            x in small_coord(), y in small_coord(), z in small_coord(),
            k in 0.0..200.0f64,
        ) {
            let alpha0 = Point3::new(0.0, 0.6, 0.8);
            let v = incident_wave(Point3::new(x, y, z), k, alpha0);
            prop_assert!((v.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn greens_function_is_symmetric_and_decays(
            x in small_coord(), y in small_coord(), z in small_coord(),
            k in 0.0..200.0f64,
        ) {
            let a = Point3::new(x, y, z);
            let b = Point3::new(z + 11.0, x, y); // never equal to `a`
            let g_ab = greens_function(a, b, k).unwrap();
            let g_ba = greens_function(b, a, k).unwrap();
            prop_assert!((g_ab - g_ba).norm() < 1e-15 * g_ab.norm().max(1.0));
            // |g| = 1 / (4 pi r).
            let r = a.distance(b);
            prop_assert!((g_ab.norm() - INV_4PI / r).abs() < 1e-12 * (INV_4PI / r));
        }

        #[test]
        fn cell_volumes_tile_the_cube(n in 1usize..=12) {
            let grid = partition_cube(Point3::new(0.3, -1.0, 2.0), 1.7, n).unwrap();
            let total: f64 = grid.volumes().iter().sum();
            let cube = 1.7f64.powi(3);
            prop_assert!((total - cube).abs() <= 1e-12 * cube);
            prop_assert_eq!(grid.len(), n * n * n);
        }

        #[test]
        fn lattice_directions_are_unit(count in 1usize..300) {
            let dirs = sphere_directions(count).unwrap();
            for d in dirs {
                prop_assert!((d.norm() - 1.0).abs() <= UNIT_NORM_TOL);
            }
        }
    }
}
